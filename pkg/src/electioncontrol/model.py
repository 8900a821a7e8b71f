"""Core domain types: candidates, rankings, voter networks, tallies, margins.

Candidates are integers ``0..candidate_count-1``; candidate ``0`` is the
manipulator's candidate.  A ranking is a tuple of candidate ids, most
preferred first.  Every voter casts a plurality vote for the first entry
of their (possibly revised) ranking.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .errors import StructuralError

CandidateId = int
NodeId = int
Ranking = tuple[CandidateId, ...]
Edge = tuple[NodeId, NodeId, float]


def validate_ranking(ranking: Ranking, candidate_count: int) -> None:
    if sorted(ranking) != list(range(candidate_count)):
        raise StructuralError(
            f"ranking {ranking!r} is not a permutation of 0..{candidate_count - 1}"
        )


@dataclass(frozen=True, eq=False)
class VoterNetwork:
    """Directed influence graph with per-edge acceptance probabilities.

    Undirected networks are stored as two directed edges with identical
    parameters; ``directed=False`` only records the intent for
    serialization.  ``lt_weights`` (per directed edge, in-sums at most 1)
    enable the threshold diffusion model; ``node_costs`` enable the
    heterogeneous seeding-cost variant.
    """

    node_count: int
    edges: tuple[Edge, ...]
    lt_weights: Mapping[tuple[NodeId, NodeId], float] | None = None
    node_costs: Mapping[NodeId, float] | None = None
    directed: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "edges", tuple(sorted(self.edges)))
        seen: set[tuple[int, int]] = set()
        for u, v, p in self.edges:
            if u == v:
                raise StructuralError(f"self-loop on node {u}")
            if not (0 <= u < self.node_count and 0 <= v < self.node_count):
                raise StructuralError(f"edge ({u},{v}) outside node range")
            if not 0.0 < p <= 1.0:
                raise StructuralError(f"edge ({u},{v}) has p={p} outside (0,1]")
            if (u, v) in seen:
                raise StructuralError(f"duplicate edge ({u},{v})")
            seen.add((u, v))
        if self.lt_weights is not None:
            incoming: dict[int, float] = {}
            for (u, v), w in self.lt_weights.items():
                if (u, v) not in seen:
                    raise StructuralError(f"lt weight for unknown edge ({u},{v})")
                if not 0.0 <= w <= 1.0:
                    raise StructuralError(f"lt weight {w} outside [0,1]")
                incoming[v] = incoming.get(v, 0.0) + w
            for v, total in incoming.items():
                if total > 1.0 + 1e-9:
                    raise StructuralError(f"node {v} incoming lt weights sum to {total} > 1")
        if self.node_costs is not None:
            for v, c in self.node_costs.items():
                if c <= 0:
                    raise StructuralError(f"node {v} has non-positive cost {c}")

    def out_edges(self) -> dict[NodeId, list[tuple[NodeId, float]]]:
        adj: dict[NodeId, list[tuple[NodeId, float]]] = {v: [] for v in range(self.node_count)}
        for u, v, p in self.edges:
            adj[u].append((v, p))
        return adj

    def in_edges(self) -> dict[NodeId, list[tuple[NodeId, float]]]:
        adj: dict[NodeId, list[tuple[NodeId, float]]] = {v: [] for v in range(self.node_count)}
        for u, v, p in self.edges:
            adj[v].append((u, p))
        return adj

    def cost_of(self, node: NodeId) -> float:
        if self.node_costs is None:
            return 1.0
        return self.node_costs.get(node, 1.0)


def undirected_network(
    node_count: int,
    pairs: list[tuple[NodeId, NodeId, float]],
    lt_weights: Mapping[tuple[NodeId, NodeId], float] | None = None,
) -> VoterNetwork:
    """Build a symmetric network from one entry per undirected edge."""
    edges = []
    for u, v, p in pairs:
        edges.append((u, v, p))
        edges.append((v, u, p))
    sym_weights = None
    if lt_weights is not None:
        sym_weights = dict(lt_weights)
    return VoterNetwork(node_count, tuple(edges), lt_weights=sym_weights, directed=False)


@dataclass(frozen=True, eq=False)
class Instance:
    """A voter network plus per-voter initial rankings."""

    network: VoterNetwork
    rankings: Mapping[NodeId, Ranking]
    candidate_count: int

    def __post_init__(self) -> None:
        if self.candidate_count < 1:
            raise StructuralError("candidate_count must be at least 1")
        for v in range(self.network.node_count):
            if v not in self.rankings:
                raise StructuralError(f"missing ranking for node {v}")
        if len(self.rankings) != self.network.node_count:
            raise StructuralError("rankings reference unknown nodes")
        for v, r in self.rankings.items():
            validate_ranking(tuple(r), self.candidate_count)

    @property
    def node_count(self) -> int:
        return self.network.node_count

    def nodes(self) -> range:
        return range(self.network.node_count)


@dataclass(frozen=True)
class Tally:
    """Per-candidate counts of first-place votes."""

    votes: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(c < 0 for c in self.votes):
            raise StructuralError("negative vote count")

    def of(self, candidate: CandidateId) -> int:
        return self.votes[candidate]

    @property
    def total(self) -> int:
        return sum(self.votes)

    def as_dict(self) -> dict[CandidateId, int]:
        return dict(enumerate(self.votes))


def tally(instance: Instance, rankings: Mapping[NodeId, Ranking]) -> Tally:
    """Count first-place votes under the given rankings (one per node)."""
    counts = [0] * instance.candidate_count
    for v in instance.nodes():
        if v not in rankings:
            raise StructuralError(f"missing ranking for node {v}")
        counts[rankings[v][0]] += 1
    return Tally(tuple(counts))


def margin_of_victory(t: Tally) -> int:
    """Votes of candidate 0 minus the best rival's votes (may be negative)."""
    if len(t.votes) < 2:
        raise StructuralError("margin of victory needs at least two candidates")
    return t.votes[0] - max(t.votes[1:])


def delta_mov(final_mov: int, baseline_mov: int) -> int:
    """Margin-of-victory increase relative to the do-nothing baseline."""
    return final_mov - baseline_mov
