"""Ranking-revision rules and their exhaustive analysis.

A voter that accepted a set of messages ``{(candidate, sign)}`` revises
her ranking.  A single surviving message moves its candidate exactly one
position (up for ``+``, down for ``-``); opposite messages about the same
candidate cancel.  With several messages the outcome depends on the order
in which the one-step moves are applied, and a revision rule resolves
that ambiguity.

Built-in rules:

* ``pessimistic`` -- candidates below the second position can never become
  most preferred; among the remaining order-achievable winners it keeps
  the strongest claim (a boosted runner-up overtakes an unboosted leader,
  a demoted leader loses to an untouched runner-up).
* ``optimistic`` -- grants low-ranked candidates the maximal benefit of the
  ambiguity: a demoted candidate falls below every candidate that was not
  itself demoted, while a boost is worth one position; the winner is the
  best-scoring candidate among the order-achievable winners.
* ``score_based(epsilon)`` -- positional scores (``|C|`` down to ``1``)
  shifted by ``1 + epsilon`` per message, ranking by descending score.
  Any ``epsilon`` in (0, 0.5) makes score ties impossible.
* ``custom(table)`` -- explicit lookup table over (ranking, canonical
  message set) pairs.

All rules are pure and hashable; revisions are memoised process-wide.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Mapping

from .errors import CapacityError, RuleIncompleteError, StructuralError
from .model import CandidateId, Ranking

POSITIVE = "+"
NEGATIVE = "-"
SIGNS = (POSITIVE, NEGATIVE)

Message = tuple[CandidateId, str]
MessageSet = frozenset[Message]

DEFAULT_EPSILON = 0.25
RISE_WEIGHT = 1.0 + DEFAULT_EPSILON

EXHAUSTIVE_CANDIDATE_CAP = 5


def _check_messages(messages: Iterable[Message]) -> frozenset[Message]:
    ms = frozenset(messages)
    for c, q in ms:
        if q not in SIGNS:
            raise StructuralError(f"message sign {q!r} must be '+' or '-'")
        if c < 0:
            raise StructuralError(f"bad candidate id {c}")
    return ms


def cancel_pairs(message_set: Iterable[Message]) -> MessageSet:
    """Drop every {(c,+),(c,-)} pair; a voter ignores contradicting news."""
    ms = _check_messages(message_set)
    cancelled = {c for c, _ in ms if (c, POSITIVE) in ms and (c, NEGATIVE) in ms}
    return frozenset(m for m in ms if m[0] not in cancelled)


def apply_single(ranking: Ranking, message: Message) -> Ranking:
    """One adjacent transposition: ``+`` swaps up, ``-`` swaps down.

    A positive message about the leader and a negative one about the last
    candidate are the identity.
    """
    c, q = message
    i = ranking.index(c)
    r = list(ranking)
    if q == POSITIVE and i > 0:
        r[i - 1], r[i] = r[i], r[i - 1]
    elif q == NEGATIVE and i < len(r) - 1:
        r[i + 1], r[i] = r[i], r[i + 1]
    return tuple(r)


@lru_cache(maxsize=None)
def enumerate_orderings(ranking: Ranking, message_set: MessageSet) -> frozenset[Ranking]:
    """All rankings reachable by applying the messages in some order.

    ``message_set`` must already be pair-cancelled, so it holds at most one
    message per candidate and the permutation count stays at ``|R|!``.
    """
    outcomes = set()
    for perm in itertools.permutations(sorted(message_set)):
        r = ranking
        for m in perm:
            r = apply_single(r, m)
        outcomes.add(r)
    return frozenset(outcomes)


def _ordering_tops(ranking: Ranking, message_set: MessageSet) -> set[CandidateId]:
    return {r[0] for r in enumerate_orderings(ranking, message_set)}


def _displacement_scores(
    ranking: Ranking, message_set: MessageSet, rise: float, fall: float
) -> dict[CandidateId, float]:
    """Positional scores shifted by per-message displacement weights."""
    n = len(ranking)
    sign = dict(message_set)
    scores = {}
    for i, c in enumerate(ranking):
        s = float(n - i)
        q = sign.get(c)
        if q == POSITIVE:
            s += rise
        elif q == NEGATIVE:
            s -= fall
        scores[c] = s
    return scores


def _complete_from_orderings(
    ranking: Ranking, message_set: MessageSet, top: CandidateId
) -> Ranking:
    """Lexicographically smallest order-achievable outcome with this winner."""
    outcomes = [r for r in enumerate_orderings(ranking, message_set) if r[0] == top]
    return min(outcomes)


@dataclass(frozen=True)
class PessimisticRule:
    """Extremal rule that never promotes a candidate from below position 2."""

    name = "pessimistic"

    def revise(self, ranking: Ranking, message_set: MessageSet) -> Ranking:
        tops = _ordering_tops(ranking, message_set)
        allowed = [c for c in ranking[:2] if c in tops] or sorted(
            tops, key=ranking.index
        )
        scores = _displacement_scores(
            ranking, message_set, RISE_WEIGHT, len(ranking) - 0.5
        )
        top = max(allowed, key=lambda c: scores[c])
        return _complete_from_orderings(ranking, message_set, top)


@dataclass(frozen=True)
class OptimisticRule:
    """Extremal rule that favours the worst-ranked contender in ambiguities."""

    name = "optimistic"

    def revise(self, ranking: Ranking, message_set: MessageSet) -> Ranking:
        tops = _ordering_tops(ranking, message_set)
        scores = _displacement_scores(
            ranking, message_set, RISE_WEIGHT, len(ranking) - 0.5
        )
        top = max(tops, key=lambda c: scores[c])
        return _complete_from_orderings(ranking, message_set, top)


@dataclass(frozen=True)
class ScoreBasedRule:
    """Positional scores shifted by ``1 + epsilon`` per accepted message."""

    epsilon: float = DEFAULT_EPSILON

    name = "score_based"

    def __post_init__(self) -> None:
        if not 0.0 < self.epsilon < 0.5:
            raise StructuralError(
                f"epsilon={self.epsilon} outside (0, 0.5); ties would become possible"
            )

    def revise(self, ranking: Ranking, message_set: MessageSet) -> Ranking:
        w = 1.0 + self.epsilon
        scores = _displacement_scores(ranking, message_set, w, w)
        # Stable sort: equal scores cannot occur for epsilon in (0, 0.5),
        # but keep original order as the documented fallback.
        return tuple(sorted(ranking, key=lambda c: -scores[c]))


@dataclass(frozen=True, eq=False)
class CustomRule:
    """Table-driven rule over (ranking, canonical message set) pairs.

    The table must map pair-cancelled message sets; an empty message set
    never reaches the table (it is the identity for every rule).  Missing
    entries raise :class:`RuleIncompleteError`.
    """

    candidate_count: int
    table: Mapping[tuple[Ranking, MessageSet], Ranking]
    name = "custom"

    def revise(self, ranking: Ranking, message_set: MessageSet) -> Ranking:
        key = (ranking, message_set)
        try:
            return self.table[key]
        except KeyError:
            raise RuleIncompleteError(
                f"custom rule has no entry for ranking={ranking} messages={sorted(message_set)}"
            ) from None

    @classmethod
    def from_function(
        cls,
        func: Callable[[Ranking, MessageSet], Ranking],
        candidate_count: int,
    ) -> "CustomRule":
        """Materialise a total table by evaluating ``func`` exhaustively."""
        table = {}
        for ranking in itertools.permutations(range(candidate_count)):
            for ms in all_canonical_message_sets(candidate_count):
                if not ms:
                    continue
                table[(ranking, ms)] = func(ranking, ms)
        return cls(candidate_count, table)


RevisionRule = PessimisticRule | OptimisticRule | ScoreBasedRule | CustomRule

PESSIMISTIC = PessimisticRule()
OPTIMISTIC = OptimisticRule()


@lru_cache(maxsize=None)
def _revise_cached(rule: RevisionRule, ranking: Ranking, canonical: MessageSet) -> Ranking:
    return rule.revise(ranking, canonical)


def revise(rule: RevisionRule, ranking: Ranking, message_set: Iterable[Message]) -> Ranking:
    """Apply ``rule`` to ``ranking`` given the received messages.

    Pair cancellation happens here, so callers may pass raw unions of
    received messages.  An empty (post-cancellation) set is the identity.
    """
    canonical = cancel_pairs(message_set)
    for c, _ in canonical:
        if c >= len(ranking):
            raise StructuralError(f"message about unknown candidate {c}")
    if not canonical:
        return tuple(ranking)
    if isinstance(rule, CustomRule):
        return rule.revise(tuple(ranking), canonical)
    return _revise_cached(rule, tuple(ranking), canonical)


def revised_top(rule: RevisionRule, ranking: Ranking, message_set: Iterable[Message]) -> CandidateId:
    return revise(rule, ranking, message_set)[0]


def all_canonical_message_sets(
    candidate_count: int, signs: str = "+-"
) -> tuple[MessageSet, ...]:
    """Every pair-cancelled message set over the allowed signs (incl. empty)."""
    options = [(None, *signs)] * candidate_count
    sets = []
    for combo in itertools.product(*options):
        sets.append(
            frozenset((c, q) for c, q in enumerate(combo) if q is not None)
        )
    return tuple(sets)


@dataclass(frozen=True)
class AxiomViolation:
    axiom: int
    ranking: Ranking
    message_set: MessageSet
    alt_ranking: Ranking | None
    alt_message_set: MessageSet | None
    expected_top: CandidateId
    actual_top: CandidateId


def check_axioms(
    rule: RevisionRule,
    candidate_count: int,
    cap: int = EXHAUSTIVE_CANDIDATE_CAP,
) -> list[AxiomViolation]:
    """Exhaustively test the two admissibility axioms; return violations.

    Axiom 1: a winner distinct from ``c_i`` survives turning ``c_i``'s
    message into a negative one.  Axiom 2: a winner keeps winning when its
    own initial position improves, everything else equal.
    """
    if candidate_count > cap:
        raise CapacityError(
            f"axiom check is exhaustive; candidate_count={candidate_count} exceeds cap={cap}"
        )
    violations: list[AxiomViolation] = []
    rankings = list(itertools.permutations(range(candidate_count)))
    sets = all_canonical_message_sets(candidate_count)

    for pi in rankings:
        for ms in sets:
            sign = dict(ms)
            cj = revised_top(rule, pi, ms)
            for ci in range(candidate_count):
                if ci == cj or sign.get(ci) == NEGATIVE:
                    continue
                ms2 = frozenset((c, q) for c, q in ms if c != ci) | {(ci, NEGATIVE)}
                got = revised_top(rule, pi, ms2)
                if got != cj:
                    violations.append(
                        AxiomViolation(1, pi, ms, None, ms2, cj, got)
                    )

    for pi_worse in rankings:
        for j_pos in range(candidate_count):
            cj = pi_worse[j_pos]
            rest = [c for c in pi_worse if c != cj]
            for better in range(j_pos):
                pi_better = tuple(rest[:better] + [cj] + rest[better:])
                for ms in sets:
                    if revised_top(rule, pi_worse, ms) != cj:
                        continue
                    got = revised_top(rule, pi_better, ms)
                    if got != cj:
                        violations.append(
                            AxiomViolation(2, pi_better, ms, pi_worse, None, cj, got)
                        )
    return violations


def full_promotion_set(candidate_count: int) -> MessageSet:
    """Positive about candidate 0 plus a negative about everyone else."""
    return frozenset(
        [(0, POSITIVE)] + [(c, NEGATIVE) for c in range(1, candidate_count)]
    )


def is_least_candidate_manipulable(rule: RevisionRule, candidate_count: int) -> bool:
    """Does the full promotion set always lift a last-ranked candidate 0?"""
    full = full_promotion_set(candidate_count)
    for pi in itertools.permutations(range(candidate_count)):
        if pi[-1] != 0:
            continue
        if revised_top(rule, pi, full) != 0:
            return False
    return True


@dataclass(frozen=True)
class UniversalMessageSetResult:
    """Smallest message set that tops candidate 0 from every ranking."""

    exists: bool
    tau: int | None = None
    witness: MessageSet | None = None


def allowed_signs(sign_restriction: str) -> str:
    if sign_restriction == "both":
        return "+-"
    if sign_restriction == "positive_only":
        return "+"
    if sign_restriction == "negative_only":
        return "-"
    raise StructuralError(f"unknown sign restriction {sign_restriction!r}")


def min_universal_message_set(
    rule: RevisionRule,
    candidate_count: int,
    sign_restriction: str = "both",
    cap: int = EXHAUSTIVE_CANDIDATE_CAP,
) -> UniversalMessageSetResult:
    """Search message sets in ascending size for a universal candidate-0 win.

    Returns the smallest set making candidate 0 most preferred for every
    initial ranking, or ``exists=False``.  The search space honours the
    sign restriction and covers every pair-cancelled set, so the answer is
    exact for ``candidate_count <= cap``.
    """
    if candidate_count > cap:
        raise CapacityError(
            f"universal-set search is exhaustive; candidate_count={candidate_count} "
            f"exceeds cap={cap}"
        )
    signs = allowed_signs(sign_restriction)
    rankings = list(itertools.permutations(range(candidate_count)))
    for size in range(1, candidate_count + 1):
        for cands in itertools.combinations(range(candidate_count), size):
            for qs in itertools.product(signs, repeat=size):
                ms = frozenset(zip(cands, qs))
                if all(revised_top(rule, pi, ms) == 0 for pi in rankings):
                    return UniversalMessageSetResult(True, size, ms)
    return UniversalMessageSetResult(False)
