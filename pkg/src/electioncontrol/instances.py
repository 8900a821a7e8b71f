"""Constructors for every benchmark instance family, plus random instances.

The hardness-reduction builders check their own vote tallies at
construction time; the greedy-trap builders run a full verifier (oracle
optimum, empty frontier, greedy-loop value) before returning, and raise
:class:`ConstructionError` if any property fails.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Mapping, Sequence

from .diffusion import Solution, make_vector
from .errors import ConstructionError, StructuralError
from .model import (
    Instance,
    NodeId,
    Ranking,
    VoterNetwork,
    margin_of_victory,
    tally,
    undirected_network,
)


@dataclass(frozen=True)
class SetCoverInstance:
    """Universe ``0..n_elements-1`` and a bound ``h`` on the cover size."""

    n_elements: int
    sets: tuple[frozenset[int], ...]
    h: int

    def __post_init__(self) -> None:
        for s in self.sets:
            if any(not 0 <= z < self.n_elements for z in s):
                raise StructuralError("set contains an element outside the universe")
        if self.h > len(self.sets):
            raise StructuralError("h exceeds the number of sets")

    def has_cover(self, h: int | None = None) -> bool:
        """Independent exhaustive check for a cover of size at most h."""
        bound = self.h if h is None else h
        universe = frozenset(range(self.n_elements))
        for k in range(0, bound + 1):
            for combo in itertools.combinations(self.sets, k):
                covered = frozenset().union(*combo) if combo else frozenset()
                if covered == universe:
                    return True
        return False


@dataclass(frozen=True)
class VertexCoverInstance:
    """Simple undirected graph and a bound ``k`` on the cover size."""

    node_count: int
    edges: tuple[tuple[int, int], ...]
    k: int

    def __post_init__(self) -> None:
        seen = set()
        for u, v in self.edges:
            if u == v or not (0 <= u < self.node_count and 0 <= v < self.node_count):
                raise StructuralError(f"bad edge ({u},{v})")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise StructuralError(f"duplicate edge ({u},{v})")
            seen.add(key)

    def has_cover(self, k: int | None = None) -> bool:
        bound = self.k if k is None else k
        for size in range(0, bound + 1):
            for combo in itertools.combinations(range(self.node_count), size):
                chosen = set(combo)
                if all(u in chosen or v in chosen for u, v in self.edges):
                    return True
        return False


def _fill_ranking(prefix: Sequence[int], candidate_count: int) -> Ranking:
    """Complete a ranking by appending the unused candidates in index order."""
    rest = [c for c in range(candidate_count) if c not in prefix]
    return tuple(prefix) + tuple(rest)


def demo_clique() -> Instance:
    """Five voters on a complete certainty graph with five candidates.

    One voter prefers candidate 0 then 4; one prefers 1 then 0; one 1 then
    3; one 2 then 3; one 2 then 4 (remaining candidates in index order).
    """
    prefixes = [(0, 4), (1, 0), (1, 3), (2, 3), (2, 4)]
    rankings = {v: _fill_ranking(p, 5) for v, p in enumerate(prefixes)}
    edges = tuple((u, v, 1.0) for u in range(5) for v in range(5) if u != v)
    return Instance(VoterNetwork(5, edges), rankings, 5)


@dataclass(frozen=True)
class ReductionBuild:
    """A reduction instance with its recommended budget and node roles."""

    instance: Instance
    recommended_budget: int
    set_nodes: tuple[NodeId, ...]
    element_nodes: tuple[NodeId, ...]
    g2_nodes: tuple[NodeId, ...]
    g3_nodes: tuple[NodeId, ...]
    g4_nodes: tuple[NodeId, ...]


def _reduction_rankings(candidate_count: int) -> dict[str, Ranking]:
    """The ranking templates shared by both hardness reductions."""
    ell = candidate_count - 1
    tail = list(range(3, ell + 1))
    return {
        "c2_first": tuple([2, 1] + tail + [0]),
        "c1_first": tuple([1, 2] + tail + [0]),
        "c0_first": tuple(range(candidate_count)),
    }


def _ci_first_ranking(i: int, candidate_count: int) -> Ranking:
    ell = candidate_count - 1
    tail = [c for c in range(3, ell + 1) if c != i]
    return tuple([i, 2, 1] + tail + [0])


def _component_check(
    instance: Instance, m_plus_n: int, candidate_count: int, gadget_c2: int
) -> None:
    t = tally(instance, instance.rankings)
    expected_c0 = 3 * m_plus_n + 2
    if t.of(0) != expected_c0 or t.of(1) != expected_c0:
        raise ConstructionError(
            f"candidates 0/1 tally {t.of(0)}/{t.of(1)}, expected {expected_c0}"
        )
    if t.of(2) != gadget_c2 + 2 * m_plus_n:
        raise ConstructionError(
            f"candidate 2 tally {t.of(2)} != {gadget_c2 + 2 * m_plus_n}"
        )
    for i in range(3, candidate_count):
        if t.of(i) != 3 * m_plus_n + 1:
            raise ConstructionError(f"candidate {i} tally {t.of(i)} != {3 * m_plus_n + 1}")
    if margin_of_victory(t) != 0:
        raise ConstructionError("empty-solution margin of victory is not 0")


def _reduction_g2_blocks(
    m: int, n: int, h: int, candidate_count: int
) -> list[tuple[int, Ranking]]:
    """Itemised (count, ranking) blocks of the big mixed clique.

    Sized from the itemised list (which reproduces the intended tallies),
    not from any closed-form header.
    """
    r = _reduction_rankings(candidate_count)
    blocks = [
        (2 * (m + n), r["c2_first"]),
        (2 * (m + n) + m - h + 1, r["c1_first"]),
    ]
    for i in range(3, candidate_count):
        blocks.append((3 * (m + n) + 1, _ci_first_ranking(i, candidate_count)))
    return blocks


def set_cover_reduction(sc: SetCoverInstance, candidate_count: int = 3) -> ReductionBuild:
    """Election instance whose manipulability decides the cover question.

    Four disconnected components on a certainty graph: a bipartite gadget
    carrying the cover structure (set node -> each of its elements), one
    big mixed clique, a clique of ``n+h+1`` candidate-1 voters, and a
    clique of ``3(m+n)+2`` candidate-0 voters.  The empty-solution margin
    is exactly zero and the recommended budget is ``h+1``.
    """
    if candidate_count < 3:
        raise ValueError("the reduction needs at least three candidates")
    m, n, h = len(sc.sets), sc.n_elements, sc.h
    r = _reduction_rankings(candidate_count)

    rankings: dict[NodeId, Ranking] = {}
    edges: list[tuple[int, int, float]] = []
    next_id = 0

    set_nodes = []
    for _ in range(m):
        set_nodes.append(next_id)
        rankings[next_id] = r["c2_first"]
        next_id += 1
    element_nodes = []
    for _ in range(n):
        element_nodes.append(next_id)
        rankings[next_id] = r["c2_first"]
        next_id += 1
    for i, s in enumerate(sc.sets):
        for z in sorted(s):
            edges.append((set_nodes[i], element_nodes[z], 1.0))

    def add_clique(members: list[NodeId]) -> None:
        for u in members:
            for v in members:
                if u != v:
                    edges.append((u, v, 1.0))

    g2_nodes = []
    for count, ranking in _reduction_g2_blocks(m, n, h, candidate_count):
        for _ in range(count):
            g2_nodes.append(next_id)
            rankings[next_id] = ranking
            next_id += 1
    add_clique(g2_nodes)

    g3_nodes = []
    for _ in range(n + h + 1):
        g3_nodes.append(next_id)
        rankings[next_id] = r["c1_first"]
        next_id += 1
    add_clique(g3_nodes)

    g4_nodes = []
    for _ in range(3 * (m + n) + 2):
        g4_nodes.append(next_id)
        rankings[next_id] = r["c0_first"]
        next_id += 1
    add_clique(g4_nodes)

    instance = Instance(VoterNetwork(next_id, tuple(edges)), rankings, candidate_count)
    _component_check(instance, m + n, candidate_count, gadget_c2=m + n)
    return ReductionBuild(
        instance=instance,
        recommended_budget=h + 1,
        set_nodes=tuple(set_nodes),
        element_nodes=tuple(element_nodes),
        g2_nodes=tuple(g2_nodes),
        g3_nodes=tuple(g3_nodes),
        g4_nodes=tuple(g4_nodes),
    )


def set_cover_certificate(
    build: ReductionBuild, sc: SetCoverInstance, cover: Sequence[int]
) -> Solution:
    """The witness solution for a cover: boost candidate 1 from the chosen
    set nodes and candidate 2 from one node of the candidate-1 clique.

    A cover smaller than ``h`` is padded with arbitrary extra sets.
    """
    chosen = list(dict.fromkeys(cover))
    for i in range(len(sc.sets)):
        if len(chosen) >= sc.h:
            break
        if i not in chosen:
            chosen.append(i)
    cc = build.instance.candidate_count
    assignment = {build.set_nodes[i]: make_vector(cc, {1: "+"}) for i in chosen}
    assignment[build.g3_nodes[0]] = make_vector(cc, {2: "+"})
    return Solution.of(assignment)


def vertex_cover_lt_reduction(
    vc: VertexCoverInstance, candidate_count: int = 3, amplifier: int = 2
) -> ReductionBuild:
    """Threshold-model reduction: the cover graph plus three directed rings.

    The gadget component is the input graph with incoming threshold
    weights ``1/deg``, where every graph node additionally carries
    ``amplifier`` weight-1 leaf voters that accept whatever their node
    accepts.  The other components are weight-1 directed rings (one
    message activates a whole ring): with ``G = m * (1 + amplifier)``
    gadget voters, the mixed ring holds ``2G`` rival-2 and ``2G + 1``
    rival-1 voters, the boostable ring ``G + 1`` rival-1 voters, and the
    leader ring ``3G + 2`` voters, so the empty margin is zero, a budget
    of ``k + 1`` wins exactly when a vertex cover of size ``k`` exists
    (full gadget activation is almost sure only for covers), and every
    activation shortfall costs ``1 + amplifier`` votes in that live
    graph, which makes partial probabilistic activation unprofitable in
    expectation.
    """
    if candidate_count < 3:
        raise ValueError("the reduction needs at least three candidates")
    if amplifier < 1:
        raise ValueError("amplifier must be at least 1")
    m, k = vc.node_count, vc.k
    if k > m:
        raise ValueError("k exceeds the graph size")
    r = _reduction_rankings(candidate_count)
    gadget_votes = m * (1 + amplifier)

    rankings: dict[NodeId, Ranking] = {}
    edges: list[tuple[int, int, float]] = []
    lt_weights: dict[tuple[int, int], float] = {}
    next_id = 0

    graph_nodes = []
    leaf_nodes = []
    for _ in range(m):
        graph_nodes.append(next_id)
        rankings[next_id] = r["c2_first"]
        next_id += 1
    for v in range(m):
        for _ in range(amplifier):
            leaf_nodes.append(next_id)
            rankings[next_id] = r["c2_first"]
            edge = (graph_nodes[v], next_id)
            edges.append((*edge, 1.0))
            lt_weights[edge] = 1.0
            next_id += 1
    degree = {v: 0 for v in range(m)}
    for u, v in vc.edges:
        degree[u] += 1
        degree[v] += 1
    for u, v in vc.edges:
        for a, b in ((u, v), (v, u)):
            edge = (graph_nodes[a], graph_nodes[b])
            edges.append((*edge, 1.0))
            lt_weights[edge] = 1.0 / degree[b]

    def add_ring(members: list[NodeId]) -> None:
        size = len(members)
        for i in range(size):
            edge = (members[i], members[(i + 1) % size])
            edges.append((*edge, 1.0))
            lt_weights[edge] = 1.0

    g2_blocks = [
        (2 * gadget_votes, r["c2_first"]),
        (2 * gadget_votes + 1, r["c1_first"]),
    ]
    for i in range(3, candidate_count):
        g2_blocks.append((3 * gadget_votes + 1, _ci_first_ranking(i, candidate_count)))
    g2_nodes = []
    for count, ranking in g2_blocks:
        for _ in range(count):
            g2_nodes.append(next_id)
            rankings[next_id] = ranking
            next_id += 1
    add_ring(g2_nodes)

    g3_nodes = []
    for _ in range(gadget_votes + 1):
        g3_nodes.append(next_id)
        rankings[next_id] = r["c1_first"]
        next_id += 1
    add_ring(g3_nodes)

    g4_nodes = []
    for _ in range(3 * gadget_votes + 2):
        g4_nodes.append(next_id)
        rankings[next_id] = r["c0_first"]
        next_id += 1
    add_ring(g4_nodes)

    network = VoterNetwork(next_id, tuple(edges), lt_weights=lt_weights)
    instance = Instance(network, rankings, candidate_count)
    _component_check(instance, gadget_votes, candidate_count, gadget_c2=gadget_votes)
    return ReductionBuild(
        instance=instance,
        recommended_budget=k + 1,
        set_nodes=tuple(graph_nodes),
        element_nodes=tuple(leaf_nodes),
        g2_nodes=tuple(g2_nodes),
        g3_nodes=tuple(g3_nodes),
        g4_nodes=tuple(g4_nodes),
    )


def bribed_blowup(base: Instance, rho_prime: int, h: int) -> Instance:
    """Replace every node by a certainty clique of ``(h+1)*rho_prime``
    identically ranked copies; original edges become complete bipartite
    certainty edges between the copy cliques."""
    if rho_prime < 1:
        raise ValueError("rho_prime must be at least 1")
    size = (h + 1) * rho_prime
    rankings: dict[NodeId, Ranking] = {}
    copies: dict[NodeId, list[NodeId]] = {}
    next_id = 0
    for v in base.nodes():
        copies[v] = list(range(next_id, next_id + size))
        for c in copies[v]:
            rankings[c] = base.rankings[v]
        next_id += size
    edges: list[tuple[int, int, float]] = []
    for v in base.nodes():
        for a in copies[v]:
            for b in copies[v]:
                if a != b:
                    edges.append((a, b, 1.0))
    for u, v, _ in base.network.edges:
        for a in copies[u]:
            for b in copies[v]:
                edges.append((a, b, 1.0))
    return Instance(VoterNetwork(next_id, tuple(edges)), rankings, base.candidate_count)


def epsilon_connect(
    instance: Instance, extra_edges: Sequence[tuple[int, int]], epsilon: float
) -> Instance:
    """Add low-probability edges (e.g. to make a reduction strongly
    connected) without materially changing exact expectations."""
    if not 0.0 < epsilon <= 1.0:
        raise ValueError(f"epsilon={epsilon} outside (0,1]")
    existing = {(u, v) for u, v, _ in instance.network.edges}
    new_edges = list(instance.network.edges)
    for u, v in extra_edges:
        if (u, v) in existing:
            raise StructuralError(f"edge ({u},{v}) already present")
        existing.add((u, v))
        new_edges.append((u, v, epsilon))
    network = VoterNetwork(
        instance.network.node_count,
        tuple(new_edges),
        lt_weights=instance.network.lt_weights,
        node_costs=instance.network.node_costs,
        directed=instance.network.directed,
    )
    return Instance(network, dict(instance.rankings), instance.candidate_count)


def _trap_components() -> list[tuple[str, int, Ranking]]:
    """(shape, size, ranking) blocks of the degree-two greedy trap."""
    return [
        ("cycle", 7, (0, 1, 2)),   # leader's voters
        ("cycle", 4, (1, 2, 0)),   # larger rival-1 block
        ("cycle", 3, (1, 2, 0)),   # designated rival-1 block (seed a '+2' here)
        ("path", 2, (2, 1, 0)),    # designated rival-2 block (seed a '+1' here)
        ("path", 3, (2, 1, 0)),    # remaining rival-2 voters
    ]


def greedy_trap_ring() -> Instance:
    """19 voters of degree at most two on which frontier greedy stalls.

    Certainty edges, three candidates, tally {7, 7, 5}.  With budget 2 the
    optimum raises the margin by exactly 1 (boost candidate 2 in the
    three-node block, boost candidate 1 in the two-node block), yet no
    single augmentation improves the margin or candidate 0's votes, so
    every frontier-greedy run returns the empty solution.  Verified at
    construction by :func:`verify_greedy_trap_ring`.
    """
    rankings: dict[NodeId, Ranking] = {}
    pairs: list[tuple[int, int, float]] = []
    next_id = 0
    for shape, size, ranking in _trap_components():
        members = list(range(next_id, next_id + size))
        next_id += size
        for v in members:
            rankings[v] = ranking
        for i in range(len(members) - 1):
            pairs.append((members[i], members[i + 1], 1.0))
        if shape == "cycle" and size > 2:
            pairs.append((members[-1], members[0], 1.0))
    instance = Instance(undirected_network(next_id, pairs), rankings, 3)
    verify_greedy_trap_ring(instance)
    return instance


def _trap_tree_stars(r: int) -> list[tuple[int, Ranking]]:
    return [
        (2 * r, (1, 2, 0)),  # designated rival-1 star (optimal '+2' seed = root)
        (5 * r, (1, 2, 0)),  # bulk rival-1 star
        (r, (2, 1, 0)),      # designated rival-2 star (optimal '+1' seed = root)
        (4 * r, (2, 1, 0)),  # bulk rival-2 star
        (7 * r, (0, 1, 2)),  # leader's star
    ]


def greedy_trap_tree(r: int) -> Instance:
    """A directed forest of ``19*r`` voters where greedy earns 2, not ``r``.

    Five out-directed stars with certainty edges and three candidates,
    tally {7r, 7r, 5r}.  The budget-2 optimum is ``r`` (boost candidate 2
    at the ``2r``-star root, candidate 1 at the ``r``-star root); every
    frontier-greedy run can only flip two single leaves for a margin
    increase of exactly 2.  Verified at construction by
    :func:`verify_greedy_trap_tree`.
    """
    if r < 2:
        raise ValueError("r must be at least 2")
    rankings: dict[NodeId, Ranking] = {}
    edges: list[tuple[int, int, float]] = []
    next_id = 0
    roots = []
    for size, ranking in _trap_tree_stars(r):
        root = next_id
        roots.append(root)
        members = list(range(next_id, next_id + size))
        next_id += size
        for v in members:
            rankings[v] = ranking
        for leaf in members[1:]:
            edges.append((root, leaf, 1.0))
    instance = Instance(VoterNetwork(next_id, tuple(edges)), rankings, 3)
    verify_greedy_trap_tree(instance, r)
    return instance


def _trap_oracle_checks(
    instance: Instance, budget: int, expect_empty_frontier: bool
) -> tuple[float, float]:
    # Imported here: the oracle and optimizer already depend on this module.
    from .estimation import DELTA_MOV, estimate
    from .optimize import OptimizerConfig, frontier, greedy_approach_loop
    from .oracle import solve_exact
    from .revision import PESSIMISTIC

    config = OptimizerConfig(budget=budget, rule=PESSIMISTIC)
    result = solve_exact(instance, config)
    if expect_empty_frontier and frontier(instance, Solution.empty(), config):
        raise ConstructionError("trap instance has a non-empty initial frontier")
    loop_solution = greedy_approach_loop(instance, config)
    loop_value = estimate(
        instance, loop_solution, PESSIMISTIC, DELTA_MOV, mode="exact"
    ).value
    return result.best_value, loop_value


def verify_greedy_trap_ring(instance: Instance) -> None:
    degree = {v: 0 for v in instance.nodes()}
    for u, v, _ in instance.network.edges:
        degree[u] += 1
    if max(degree.values()) > 4:  # symmetric pairs: undirected degree 2
        raise ConstructionError("a node exceeds undirected degree 2")
    undirected = {frozenset((u, v)) for u, v, _ in instance.network.edges}
    per_node = {v: 0 for v in instance.nodes()}
    for e in undirected:
        for v in e:
            per_node[v] += 1
    if max(per_node.values()) > 2:
        raise ConstructionError("a node exceeds undirected degree 2")
    t = tally(instance, instance.rankings)
    if t.votes != (7, 7, 5):
        raise ConstructionError(f"initial tally {t.votes} != (7, 7, 5)")
    best, loop_value = _trap_oracle_checks(instance, budget=2, expect_empty_frontier=True)
    if best != 1:
        raise ConstructionError(f"budget-2 optimum {best} != 1")
    if loop_value != 0:
        raise ConstructionError(f"greedy loop achieved {loop_value} != 0")


def verify_greedy_trap_tree(instance: Instance, r: int) -> None:
    t = tally(instance, instance.rankings)
    if t.votes != (7 * r, 7 * r, 5 * r):
        raise ConstructionError(f"initial tally {t.votes} != (7r, 7r, 5r)")
    if instance.node_count != 19 * r:
        raise ConstructionError("node count is not 19r")
    best, loop_value = _trap_oracle_checks(instance, budget=2, expect_empty_frontier=False)
    if best != r:
        raise ConstructionError(f"budget-2 optimum {best} != r={r}")
    if loop_value != 2:
        raise ConstructionError(f"greedy loop achieved {loop_value} != 2")


def random_instance(
    node_count: int,
    edge_probability: float,
    p_range: tuple[float, float],
    candidate_count: int,
    seed: int,
    lt: bool = False,
) -> Instance:
    """Erdos-Renyi style directed instance with uniform random rankings.

    Edge probabilities are drawn uniformly from ``p_range``; with ``lt``
    the incoming threshold weights are uniform ``1/in_degree``.
    Deterministic given ``seed``.
    """
    if not 0.0 <= edge_probability <= 1.0:
        raise ValueError("edge_probability outside [0,1]")
    lo, hi = p_range
    if not (0.0 < lo <= hi <= 1.0):
        raise ValueError("p_range must satisfy 0 < lo <= hi <= 1")
    rng = random.Random(seed)
    edges = []
    for u in range(node_count):
        for v in range(node_count):
            if u != v and rng.random() < edge_probability:
                p = lo if lo == hi else rng.uniform(lo, hi)
                edges.append((u, v, p))
    rankings = {}
    base = list(range(candidate_count))
    for v in range(node_count):
        order = base[:]
        rng.shuffle(order)
        rankings[v] = tuple(order)
    lt_weights = None
    if lt:
        in_deg: dict[int, int] = {}
        for u, v, _ in edges:
            in_deg[v] = in_deg.get(v, 0) + 1
        lt_weights = {(u, v): 1.0 / in_deg[v] for u, v, _ in edges}
    network = VoterNetwork(node_count, tuple(edges), lt_weights=lt_weights)
    return Instance(network, rankings, candidate_count)
