"""Seed-selection algorithms and the frontier-greedy framework.

``universal_greedy`` (named after its guarantee: it is applicable
exactly when a universal message set exists) picks ``floor(B/tau)`` seeds
by lazy greedy influence maximization and lets each of them send the
minimal universal message set.  ``greedy_approach_loop`` is the generic
frontier-iterating class of algorithms that the trap instances defeat.
"""

from __future__ import annotations

import heapq
import itertools
import logging
import math
from dataclasses import dataclass, field, replace

from .diffusion import (
    LiveGraph,
    MessageVector,
    Solution,
    diffuse,
    make_vector,
    message_count,
    reachable_from_set,
    replicate_rng,
    vector_messages,
)
from .errors import CapacityError, InapplicableError, StructuralError
from .estimation import (
    DEFAULT_EXACT_CAP,
    EXACT,
    IC,
    MONTE_CARLO,
    enumerate_live_graphs,
    exact_mode_available,
    sample_live_graph,
)
from .model import Instance, NodeId
from .revision import (
    MessageSet,
    RevisionRule,
    allowed_signs,
    min_universal_message_set,
)

log = logging.getLogger(__name__)

FRONTIER_CANDIDATE_CAP = 5


@dataclass(frozen=True)
class OptimizerConfig:
    """Shared knobs for the optimizers and the exact oracle."""

    budget: float
    rule: RevisionRule
    sign_restriction: str = "both"
    model: str = IC
    bribed: bool = False
    mode: str = "auto"  # exact | mc | auto (exact when within caps)
    replicates: int = 1000
    master_seed: int = 0
    exact_cap: int = DEFAULT_EXACT_CAP

    def __post_init__(self) -> None:
        if self.budget < 0:
            raise ValueError("budget must be non-negative")
        allowed_signs(self.sign_restriction)

    def resolved_mode(self, instance: Instance) -> str:
        if self.mode != "auto":
            return self.mode
        if exact_mode_available(instance.network, self.model, self.exact_cap):
            return EXACT
        return MONTE_CARLO


def _weighted_live_graphs(
    instance: Instance, config: OptimizerConfig
) -> list[tuple[LiveGraph, float]]:
    """A common weighted live-graph collection for one optimizer run.

    Exact mode enumerates; Monte Carlo reuses one fixed sample set across
    all evaluations, which keeps the estimated influence exactly monotone
    and submodular during a greedy run.
    """
    mode = config.resolved_mode(instance)
    if mode == EXACT:
        return list(
            enumerate_live_graphs(instance.network, config.model, config.exact_cap)
        )
    if mode != MONTE_CARLO:
        raise StructuralError(f"unknown estimation mode {mode!r}")
    w = 1.0 / config.replicates
    graphs = []
    for i in range(config.replicates):
        rng = replicate_rng(config.master_seed, i)
        graphs.append((sample_live_graph(instance.network, config.model, rng), w))
    return graphs


def _expected_influence(
    seeds: tuple[NodeId, ...], graphs: list[tuple[LiveGraph, float]]
) -> float:
    if not seeds:
        return 0.0
    total = 0.0
    for H, w in graphs:
        total += w * len(reachable_from_set(H.adjacency(), seeds))
    return total


def greedy_influence_seeds(
    instance: Instance,
    k: int,
    config: OptimizerConfig,
    graphs: list[tuple[LiveGraph, float]] | None = None,
) -> list[NodeId]:
    """Lazy (stale-bound) greedy maximization of expected influence.

    Submodularity of reach over a fixed live-graph collection justifies
    re-evaluating only the top stale entry; ties break on the lowest node
    id.  Returns the seeds in selection order.
    """
    if k > instance.node_count:
        raise ValueError("k exceeds the node count")
    if k <= 0:
        return []
    if graphs is None:
        graphs = _weighted_live_graphs(instance, config)

    selected: list[NodeId] = []
    current = 0.0
    # heap entries: (-gain, node, round_evaluated)
    heap = [
        (-_expected_influence((v,), graphs), v, 0) for v in instance.nodes()
    ]
    heapq.heapify(heap)
    for round_no in range(1, k + 1):
        while True:
            neg_gain, node, evaluated = heapq.heappop(heap)
            if evaluated == round_no:
                selected.append(node)
                current += -neg_gain
                break
            gain = _expected_influence(tuple(selected + [node]), graphs) - current
            heapq.heappush(heap, (-gain, node, round_no))
    return selected


def universal_set_or_raise(
    rule: RevisionRule, candidate_count: int, sign_restriction: str
) -> tuple[int, MessageSet]:
    result = min_universal_message_set(rule, candidate_count, sign_restriction)
    if not result.exists:
        raise InapplicableError(
            "no universal message set exists for "
            f"rule={getattr(rule, 'name', rule)!r}, candidates={candidate_count}, "
            f"signs={sign_restriction!r}: the last-ranked candidate cannot be "
            "promoted to the top, so the greedy guarantee does not apply"
        )
    return result.tau, result.witness


def _vector_from_message_set(candidate_count: int, ms: MessageSet) -> MessageVector:
    return make_vector(candidate_count, {c: q for c, q in ms})


def universal_greedy(instance: Instance, config: OptimizerConfig) -> Solution:
    """Greedy universal-message algorithm: ``floor(B/tau)`` influence-greedy
    seeds, each sending the minimal universal message set."""
    tau, witness = universal_set_or_raise(
        config.rule, instance.candidate_count, config.sign_restriction
    )
    budget = int(config.budget)
    if budget < tau:
        raise ValueError(f"budget {budget} is below tau={tau}")
    k = budget // tau
    seeds = greedy_influence_seeds(instance, k, config)
    vec = _vector_from_message_set(instance.candidate_count, witness)
    return Solution.of({s: vec for s in seeds})


def approximation_ratio(budget: float, tau: int) -> float:
    """Guaranteed fraction of the optimum: (B - tau + 1) / (2 tau B) (1 - 1/e)."""
    if tau < 1:
        raise ValueError("tau must be at least 1")
    if budget < tau:
        raise ValueError("budget must be at least tau")
    return (budget - tau + 1) / (2.0 * tau * budget) * (1.0 - 1.0 / math.e)


def budgeted_greedy(instance: Instance, config: OptimizerConfig) -> Solution:
    """Cost-aware variant: cost-benefit greedy versus the best affordable
    singleton, keeping whichever seed set has the larger expected influence.

    Seeding node ``s`` costs ``tau * w(s)`` (one per-message cost per
    universal message).  Comes with a ``1 - 1/sqrt(e)``-style guarantee
    through the same argument as the uniform-cost algorithm.
    """
    tau, witness = universal_set_or_raise(
        config.rule, instance.candidate_count, config.sign_restriction
    )
    graphs = _weighted_live_graphs(instance, config)
    cost_of = lambda s: tau * instance.network.cost_of(s)
    budget = config.budget

    cheapest = min((cost_of(s) for s in instance.nodes()), default=math.inf)
    if cheapest > budget:
        log.warning(
            "budget %.3f is below the cheapest seeding cost %.3f; returning "
            "the empty solution",
            budget,
            cheapest,
        )
        return Solution.empty()

    selected: list[NodeId] = []
    spent = 0.0
    current = 0.0
    remaining_nodes = set(instance.nodes())
    while True:
        best = None
        for s in sorted(remaining_nodes):
            if spent + cost_of(s) > budget:
                continue
            gain = _expected_influence(tuple(selected + [s]), graphs) - current
            ratio = gain / cost_of(s)
            if best is None or ratio > best[0] + 1e-12:
                best = (ratio, s, gain)
        if best is None:
            break
        _, s, gain = best
        selected.append(s)
        remaining_nodes.discard(s)
        spent += cost_of(s)
        current += gain

    singleton = None
    for s in sorted(instance.nodes()):
        if cost_of(s) <= budget:
            value = _expected_influence((s,), graphs)
            if singleton is None or value > singleton[0] + 1e-12:
                singleton = (value, s)

    vec = _vector_from_message_set(instance.candidate_count, witness)
    greedy_solution = Solution.of({s: vec for s in selected})
    greedy_value = current
    if singleton is not None and singleton[0] > greedy_value + 1e-12:
        return Solution.of({singleton[1]: vec})
    return greedy_solution


@dataclass(frozen=True)
class FrontierEntry:
    """An augmentation that strictly improves some tracked expectation."""

    node: NodeId
    vector: MessageVector
    gain_mov: float
    gain_c0_votes: float
    gain_runner_up: float  # change in the best rival's expected votes


def candidate_vectors(
    candidate_count: int, max_messages: int, sign_restriction: str = "both"
) -> list[MessageVector]:
    """Every message vector with 1..max_messages entries, canonical order."""
    if candidate_count > FRONTIER_CANDIDATE_CAP:
        raise CapacityError(
            f"vector enumeration covers 3^{candidate_count} combinations; "
            f"cap is {FRONTIER_CANDIDATE_CAP} candidates"
        )
    signs = allowed_signs(sign_restriction)
    vectors = []
    for size in range(1, max(0, max_messages) + 1):
        if size > candidate_count:
            break
        for cands in itertools.combinations(range(candidate_count), size):
            for qs in itertools.product(signs, repeat=size):
                vectors.append(make_vector(candidate_count, dict(zip(cands, qs))))
    return vectors


def _solution_expectations(
    instance: Instance,
    solution: Solution,
    config: OptimizerConfig,
    graphs: list[tuple[LiveGraph, float]],
) -> tuple[float, float, float]:
    """(expected margin, expected candidate-0 votes, expected best-rival votes)."""
    mov = c0 = rival = 0.0
    for H, w in graphs:
        out = diffuse(instance, solution, H, config.rule, bribed=config.bribed)
        mov += w * out.mov
        c0 += w * out.final_tally.of(0)
        rival += w * max(out.final_tally.votes[1:])
    return mov, c0, rival


def frontier(
    instance: Instance,
    current: Solution,
    config: OptimizerConfig,
    graphs: list[tuple[LiveGraph, float]] | None = None,
) -> list[FrontierEntry]:
    """All single-seed augmentations that strictly increase the expected
    margin of victory or candidate 0's expected votes, with their gains."""
    if graphs is None:
        graphs = _weighted_live_graphs(instance, config)
    remaining = int(config.budget - current.cost(instance.network.node_costs))
    if remaining < 1:
        return []
    base_mov, base_c0, base_rival = _solution_expectations(
        instance, current, config, graphs
    )
    vectors = candidate_vectors(
        instance.candidate_count, remaining, config.sign_restriction
    )
    taken = set(current.seeds)
    entries = []
    assignment = dict(current.assignments)
    for node in instance.nodes():
        if node in taken:
            continue
        for vec in vectors:
            assignment[node] = vec
            trial = Solution(tuple(sorted(assignment.items())))
            mov, c0, rival = _solution_expectations(instance, trial, config, graphs)
            if mov > base_mov + 1e-12 or c0 > base_c0 + 1e-12:
                entries.append(
                    FrontierEntry(
                        node=node,
                        vector=vec,
                        gain_mov=mov - base_mov,
                        gain_c0_votes=c0 - base_c0,
                        gain_runner_up=rival - base_rival,
                    )
                )
        del assignment[node]
    return entries


def select_max_gain(entries: list[FrontierEntry]) -> FrontierEntry:
    """Default policy: best margin gain, then candidate-0 gain, then the
    cheapest vector, then the lowest node id."""
    return min(
        entries,
        key=lambda e: (
            -e.gain_mov,
            -e.gain_c0_votes,
            message_count(e.vector),
            e.node,
            e.vector,
        ),
    )


def select_runner_up_attrition(entries: list[FrontierEntry]) -> FrontierEntry:
    """Alternative policy: prefer augmentations that cost the strongest
    rival the most expected votes."""
    return min(
        entries,
        key=lambda e: (
            e.gain_runner_up,
            -e.gain_mov,
            -e.gain_c0_votes,
            message_count(e.vector),
            e.node,
            e.vector,
        ),
    )


def greedy_approach_loop(
    instance: Instance,
    config: OptimizerConfig,
    selection_policy=select_max_gain,
) -> Solution:
    """Iterate: while some augmentation improves the expected margin or
    candidate 0's votes and budget remains, add the policy's pick."""
    graphs = _weighted_live_graphs(instance, config)
    solution = Solution.empty()
    while True:
        entries = frontier(instance, solution, config, graphs)
        if not entries:
            return solution
        chosen = selection_policy(entries)
        assignment = dict(solution.assignments)
        assignment[chosen.node] = chosen.vector
        solution = Solution.of(assignment)
