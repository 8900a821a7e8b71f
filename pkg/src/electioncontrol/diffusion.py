"""Live-graph sampling and the multi-message cascade.

Diffusion is evaluated per *live graph*: a random subgraph that realizes
which influence attempts succeed.  Under independent-cascade semantics
each edge survives independently with its probability; under threshold
semantics each node keeps at most one incoming edge (its triggering
selection).  Given a live graph, every seed's messages reach exactly the
nodes reachable from it, each node processes a message once and forwards
everything, and finally every voter revises her ranking with the full set
of messages she accepted.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import ConfigurationError, StructuralError
from .model import (
    Instance,
    NodeId,
    Ranking,
    Tally,
    VoterNetwork,
    delta_mov,
    margin_of_victory,
    tally,
)
from .revision import NEGATIVE, POSITIVE, Message, MessageSet, RevisionRule, revise

NO_MESSAGE = "."

# Per-candidate signs: '+', '-', or '.' for silence.
MessageVector = tuple[str, ...]


def make_vector(candidate_count: int, messages: Mapping[int, str]) -> MessageVector:
    """Build a message vector from {candidate: sign}."""
    vec = [NO_MESSAGE] * candidate_count
    for c, q in messages.items():
        if q not in (POSITIVE, NEGATIVE):
            raise StructuralError(f"sign {q!r} must be '+' or '-'")
        if not 0 <= c < candidate_count:
            raise StructuralError(f"candidate {c} outside range")
        vec[c] = q
    return tuple(vec)


def vector_messages(vector: MessageVector) -> MessageSet:
    return frozenset((c, q) for c, q in enumerate(vector) if q != NO_MESSAGE)


def message_count(vector: MessageVector) -> int:
    return sum(1 for q in vector if q != NO_MESSAGE)


@dataclass(frozen=True, eq=True)
class Solution:
    """Seed nodes with the message vector each of them originates."""

    assignments: tuple[tuple[NodeId, MessageVector], ...]

    def __post_init__(self) -> None:
        seen = set()
        for node, vec in self.assignments:
            if node in seen:
                raise StructuralError(f"node {node} appears twice in solution")
            seen.add(node)
            if message_count(vec) < 1:
                raise StructuralError(f"seed {node} sends no messages")

    @classmethod
    def of(cls, assignment: Mapping[NodeId, MessageVector]) -> "Solution":
        return cls(tuple(sorted(assignment.items())))

    @classmethod
    def empty(cls) -> "Solution":
        return cls(())

    @property
    def seeds(self) -> tuple[NodeId, ...]:
        return tuple(node for node, _ in self.assignments)

    def vector_of(self, node: NodeId) -> MessageVector:
        for n, vec in self.assignments:
            if n == node:
                return vec
        raise KeyError(node)

    def cost(self, node_costs: Mapping[NodeId, float] | None = None) -> float:
        """Total messages sent, weighted by per-node cost when given."""
        total = 0.0
        for node, vec in self.assignments:
            w = 1.0 if node_costs is None else node_costs.get(node, 1.0)
            total += message_count(vec) * w
        return total


def validate_solution(
    instance: Instance, solution: Solution, sign_restriction: str = "both"
) -> None:
    """Check seeds exist and vectors respect the sign restriction."""
    for node, vec in solution.assignments:
        if not 0 <= node < instance.node_count:
            raise StructuralError(f"unknown seed node {node}")
        if len(vec) != instance.candidate_count:
            raise StructuralError(
                f"seed {node} vector has length {len(vec)}, "
                f"expected {instance.candidate_count}"
            )
        if sign_restriction == "positive_only" and NEGATIVE in vec:
            raise StructuralError(f"seed {node} sends a negative message")
        if sign_restriction == "negative_only" and POSITIVE in vec:
            raise StructuralError(f"seed {node} sends a positive message")


@dataclass(frozen=True)
class LiveGraph:
    """An edge subset of the instance's network."""

    node_count: int
    included_edges: frozenset[tuple[NodeId, NodeId]]

    def adjacency(self) -> dict[NodeId, list[NodeId]]:
        adj: dict[NodeId, list[NodeId]] = {v: [] for v in range(self.node_count)}
        for u, v in sorted(self.included_edges):
            adj[u].append(v)
        return adj


def full_live_graph(network: VoterNetwork) -> LiveGraph:
    return LiveGraph(network.node_count, frozenset((u, v) for u, v, _ in network.edges))


def replicate_rng(master_seed: int, replicate_index: int) -> random.Random:
    """Independent deterministic stream for one replicate."""
    return random.Random((master_seed << 32) ^ (replicate_index + 0x9E3779B9))


def sample_live_graph_ic(network: VoterNetwork, rng: random.Random) -> LiveGraph:
    """Independent Bernoulli inclusion of each edge with its probability."""
    included = set()
    for u, v, p in network.edges:
        if rng.random() < p:
            included.add((u, v))
    return LiveGraph(network.node_count, frozenset(included))


def lt_selection_options(
    network: VoterNetwork,
) -> dict[NodeId, list[tuple[tuple[NodeId, NodeId] | None, float]]]:
    """Per node: possible triggering selections with their probabilities."""
    if network.lt_weights is None:
        raise ConfigurationError("threshold model requires lt_weights on the network")
    options: dict[NodeId, list[tuple[tuple[NodeId, NodeId] | None, float]]] = {}
    in_adj = network.in_edges()
    for v in range(network.node_count):
        opts: list[tuple[tuple[NodeId, NodeId] | None, float]] = []
        total = 0.0
        for u, _ in sorted(in_adj[v]):
            w = network.lt_weights.get((u, v), 0.0)
            if w > 0.0:
                opts.append(((u, v), w))
                total += w
        none_p = 1.0 - total
        if none_p > 1e-12:
            opts.append((None, none_p))
        options[v] = opts
    return options


def sample_live_graph_lt(network: VoterNetwork, rng: random.Random) -> LiveGraph:
    """Triggering-set sampling: each node keeps at most one incoming edge.

    Edge (u,v) is selected with probability ``w(u,v)``; with probability
    ``1 - sum of incoming weights`` the node selects nothing.
    """
    options = lt_selection_options(network)
    included = set()
    for v in range(network.node_count):
        opts = options[v]
        if not opts:
            continue
        r = rng.random()
        acc = 0.0
        for edge, p in opts:
            acc += p
            if r < acc:
                if edge is not None:
                    included.add(edge)
                break
    return LiveGraph(network.node_count, frozenset(included))


def reachable_from(adj: Mapping[NodeId, list[NodeId]], source: NodeId) -> set[NodeId]:
    """Nodes reachable from ``source`` including itself."""
    seen = {source}
    stack = [source]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


def reachable_from_set(
    adj: Mapping[NodeId, list[NodeId]], sources: Iterable[NodeId]
) -> set[NodeId]:
    seen = set(sources)
    stack = list(seen)
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


@dataclass(frozen=True)
class DiffusionOutcome:
    """Everything observable at the end of one cascade."""

    received: Mapping[NodeId, MessageSet]
    final_rankings: Mapping[NodeId, Ranking]
    final_tally: Tally
    mov: int
    delta_mov: int
    c0_wins: bool


def _outcome_from_received(
    instance: Instance,
    solution: Solution,
    received: dict[NodeId, set[Message]],
    rule: RevisionRule,
    bribed: bool,
) -> DiffusionOutcome:
    if bribed:
        for node, vec in solution.assignments:
            received[node] = set(vector_messages(vec))
    final_received = {v: frozenset(received[v]) for v in instance.nodes()}
    final_rankings = {
        v: revise(rule, instance.rankings[v], final_received[v])
        if final_received[v]
        else tuple(instance.rankings[v])
        for v in instance.nodes()
    }
    final_tally = tally(instance, final_rankings)
    mov = margin_of_victory(final_tally)
    baseline = margin_of_victory(tally(instance, instance.rankings))
    return DiffusionOutcome(
        received=final_received,
        final_rankings=final_rankings,
        final_tally=final_tally,
        mov=mov,
        delta_mov=delta_mov(mov, baseline),
        c0_wins=mov > 0,
    )


def diffuse(
    instance: Instance,
    solution: Solution,
    live_graph: LiveGraph,
    rule: RevisionRule,
    bribed: bool = False,
) -> DiffusionOutcome:
    """Reachability form of the cascade.

    A node accepts message (c,q) exactly when it is reachable in the live
    graph from some seed sending it (every node reaches itself, so seeds
    accept their own messages).  With ``bribed=True`` a seed's own ranking
    and reported messages are restricted to what she sends herself; the
    forwarding dynamics are unchanged.
    """
    validate_solution(instance, solution)
    adj = live_graph.adjacency()
    received: dict[NodeId, set[Message]] = {v: set() for v in instance.nodes()}
    for node, vec in solution.assignments:
        msgs = vector_messages(vec)
        for v in reachable_from(adj, node):
            received[v].update(msgs)
    return _outcome_from_received(instance, solution, received, rule, bribed)


def diffuse_timed(
    instance: Instance,
    solution: Solution,
    live_graph: LiveGraph,
    rule: RevisionRule,
    bribed: bool = False,
) -> DiffusionOutcome:
    """Literal layered cascade; cross-check for :func:`diffuse`.

    Keeps, per message, the set of voters activated at each step; a voter
    processes a message once and forwards all messages it accepted in the
    previous step.  The final outcome provably equals the reachability
    shortcut and is retained as an executable oracle of that fact.
    """
    validate_solution(instance, solution)
    adj = live_graph.adjacency()

    frontier: dict[Message, set[NodeId]] = {}
    seen: dict[Message, set[NodeId]] = {}
    for node, vec in solution.assignments:
        for m in vector_messages(vec):
            frontier.setdefault(m, set()).add(node)
            seen.setdefault(m, set()).add(node)

    while True:
        additions: dict[Message, set[NodeId]] = {}
        for m, active in frontier.items():
            if not active:
                continue
            seen_m = seen[m]
            new_m: set[NodeId] = set()
            for s in active:
                for v in adj[s]:
                    if v not in seen_m:
                        new_m.add(v)
            if new_m:
                additions[m] = new_m
        if not additions:
            break
        for m, new_m in additions.items():
            seen[m] |= new_m
        frontier = additions

    received: dict[NodeId, set[Message]] = {v: set() for v in instance.nodes()}
    for m, nodes in seen.items():
        for v in nodes:
            received[v].add(m)
    return _outcome_from_received(instance, solution, received, rule, bribed)


def influence(seed_set: Iterable[NodeId], live_graph: LiveGraph) -> int:
    """Number of voters reachable from the seed set (seeds included)."""
    seeds = list(seed_set)
    if not seeds:
        return 0
    return len(reachable_from_set(live_graph.adjacency(), seeds))
