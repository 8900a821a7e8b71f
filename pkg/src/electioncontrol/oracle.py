"""Exact brute-force optimizer over all feasible seed/message choices.

Ground truth for approximation-ratio tests and reduction verification.
Enumeration is pruned by *seed-interchangeability* classes: two nodes are
interchangeable when swapping them in any solution provably yields the
same diffusion outcome on every live graph.  Three safe criteria are
used (finer-than-necessary classes only cost time, never correctness):

* nodes mutually reachable through deterministic edges (probability-1
  edges, or threshold selections forced by a single weight-1 in-edge);
* nodes of a fully deterministic component with equal rankings and equal
  reach/inreach profiles apart from themselves (e.g. leaves of a star);
* structurally interchangeable nodes of a uniform stochastic clique or a
  uniform single-ranking ring (component automorphisms).

The oracle refuses stochastic instances beyond the exact-enumeration cap
unless sampling is explicitly configured.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .diffusion import (
    MessageVector,
    Solution,
    reachable_from,
    replicate_rng,
    vector_messages,
)
from .errors import CapacityError
from .estimation import (
    DELTA_MOV,
    IC,
    MONTE_CARLO,
    Objective,
    enumerate_live_graphs,
    exact_mode_available,
    sample_live_graph,
)
from .model import Instance, NodeId, Ranking, margin_of_victory, tally
from .optimize import OptimizerConfig, candidate_vectors
from .revision import revised_top

DEFAULT_CLASS_CAP = 25
DEFAULT_BUDGET_CAP = 4
DEFAULT_ORACLE_CANDIDATE_CAP = 5


@dataclass(frozen=True)
class OracleResult:
    best_value: float
    best_solution: Solution
    explored: int


def _deterministic_edges(instance: Instance, model: str) -> set[tuple[int, int]]:
    if model == IC:
        return {(u, v) for u, v, p in instance.network.edges if p >= 1.0}
    det = set()
    weights = instance.network.lt_weights or {}
    in_adj = instance.network.in_edges()
    for v in range(instance.node_count):
        positive = [(u, weights.get((u, v), 0.0)) for u, _ in in_adj[v]]
        positive = [(u, w) for u, w in positive if w > 0.0]
        if len(positive) == 1 and positive[0][1] >= 1.0 - 1e-12:
            det.add((positive[0][0], v))
    return det


def _nodes_on_stochastic_edges(instance: Instance, model: str) -> set[int]:
    det = _deterministic_edges(instance, model)
    touched = set()
    for u, v, _ in instance.network.edges:
        if (u, v) not in det:
            touched.add(u)
            touched.add(v)
    return touched


def _weak_components(instance: Instance) -> list[set[int]]:
    parent = list(range(instance.node_count))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v, _ in instance.network.edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    groups: dict[int, set[int]] = {}
    for v in range(instance.node_count):
        groups.setdefault(find(v), set()).add(v)
    return list(groups.values())


def _uniform_clique_component(instance: Instance, comp: set[int]) -> bool:
    inner = [(u, v, p) for u, v, p in instance.network.edges if u in comp and v in comp]
    if len(inner) != len(comp) * (len(comp) - 1):
        return False
    params = {(p, (instance.network.lt_weights or {}).get((u, v))) for u, v, p in inner}
    return len(params) <= 1


def _uniform_ring_component(instance: Instance, comp: set[int]) -> bool:
    inner = [(u, v, p) for u, v, p in instance.network.edges if u in comp and v in comp]
    if not inner:
        return False
    params = {(p, (instance.network.lt_weights or {}).get((u, v))) for u, v, p in inner}
    if len(params) > 1:
        return False
    out_deg: dict[int, int] = {v: 0 for v in comp}
    in_deg: dict[int, int] = {v: 0 for v in comp}
    pairs = {(u, v) for u, v, _ in inner}
    for u, v in pairs:
        out_deg[u] += 1
        in_deg[v] += 1
    directed_cycle = all(out_deg[v] == 1 and in_deg[v] == 1 for v in comp)
    symmetric_cycle = all((v, u) in pairs for u, v in pairs) and all(
        out_deg[v] == 2 for v in comp
    )
    if not (directed_cycle or symmetric_cycle):
        return False
    rankings = {instance.rankings[v] for v in comp}
    return len(rankings) == 1


def symmetry_classes(
    instance: Instance, model: str = IC, bribed: bool = False
) -> list[list[NodeId]]:
    """Partition nodes into seed-interchangeability classes."""
    det = _deterministic_edges(instance, model)
    det_adj: dict[int, list[int]] = {v: [] for v in range(instance.node_count)}
    det_in: dict[int, set[int]] = {v: set() for v in range(instance.node_count)}
    for u, v in det:
        det_adj[u].append(v)
        det_in[v].add(u)
    det_reach = {v: frozenset(reachable_from(det_adj, v)) for v in instance.nodes()}
    cost_of = instance.network.cost_of
    stochastic_nodes = _nodes_on_stochastic_edges(instance, model)

    keys: dict[NodeId, tuple] = {}
    # mutual deterministic reachability
    scc_of: dict[NodeId, frozenset] = {}
    for v in instance.nodes():
        members = frozenset(u for u in det_reach[v] if v in det_reach[u])
        scc_of[v] = members

    components = _weak_components(instance)
    comp_of: dict[int, int] = {}
    for i, comp in enumerate(components):
        for v in comp:
            comp_of[v] = i
    comp_struct: dict[int, str] = {}
    for i, comp in enumerate(components):
        if _uniform_clique_component(instance, comp):
            comp_struct[i] = "clique"
        elif _uniform_ring_component(instance, comp):
            comp_struct[i] = "ring"
        else:
            comp_struct[i] = ""

    for v in instance.nodes():
        ranking_key = instance.rankings[v] if bribed else None
        if len(scc_of[v]) > 1:
            keys[v] = ("scc", scc_of[v], ranking_key, cost_of(v))
        elif v not in stochastic_nodes:
            # Every edge at v is deterministic, so v's reach and inreach in
            # any live graph are the shared closures of its deterministic
            # neighbourhoods; equal profiles make seeds interchangeable.
            keys[v] = (
                "iso",
                instance.rankings[v],
                det_reach[v] - {v},
                frozenset(det_in[v]) - {v},
                cost_of(v),
            )
        elif comp_struct[comp_of[v]] == "clique":
            keys[v] = ("clique", comp_of[v], instance.rankings[v], cost_of(v))
        elif comp_struct[comp_of[v]] == "ring" and not bribed:
            keys[v] = ("ring", comp_of[v], cost_of(v))
        elif comp_struct[comp_of[v]] == "ring":
            keys[v] = ("ring", comp_of[v], instance.rankings[v], cost_of(v))
        else:
            keys[v] = ("node", v)

    grouped: dict[tuple, list[NodeId]] = {}
    for v in instance.nodes():
        grouped.setdefault(keys[v], []).append(v)
    classes = [sorted(members) for members in grouped.values()]
    classes.sort(key=lambda c: c[0])
    return classes


@dataclass
class _GraphView:
    weight: float
    cells: list[tuple[int, Ranking, int]]  # (reach mask over reps, ranking, count)
    rep_mask: dict[NodeId, int]
    rep_reach: list[frozenset[NodeId]]


def _graph_views(
    instance: Instance, reps: list[NodeId], graphs
) -> list[_GraphView]:
    views = []
    for H, weight in graphs:
        adj = H.adjacency()
        reach = [frozenset(reachable_from(adj, r)) for r in reps]
        mask = [0] * instance.node_count
        for i, rs in enumerate(reach):
            bit = 1 << i
            for v in rs:
                mask[v] |= bit
        cells: dict[tuple[int, Ranking], int] = {}
        for v in instance.nodes():
            key = (mask[v], instance.rankings[v])
            cells[key] = cells.get(key, 0) + 1
        views.append(
            _GraphView(
                weight=weight,
                cells=[(m, r, c) for (m, r), c in cells.items()],
                rep_mask={r: mask[r] for r in reps},
                rep_reach=reach,
            )
        )
    return views


def _enumerate_class_solutions(
    classes: list[list[NodeId]],
    vectors: list[MessageVector],
    budget: int,
):
    """Yield canonical solutions as ((rep_node, vector), ...) tuples.

    Within one class, seeds are assigned a multiset of vectors to the
    first representatives; across classes a depth-first product respects
    the remaining message budget.
    """
    vector_sizes = [sum(1 for q in vec if q != ".") for vec in vectors]

    def per_class_choices(members: list[NodeId], budget_left: int):
        max_seeds = min(len(members), budget_left)
        yield (), 0
        for count in range(1, max_seeds + 1):
            for combo in itertools.combinations_with_replacement(
                range(len(vectors)), count
            ):
                cost = sum(vector_sizes[i] for i in combo)
                if cost <= budget_left:
                    yield tuple(
                        (members[j], vectors[i]) for j, i in enumerate(combo)
                    ), cost

    def rec(idx: int, budget_left: int, acc: tuple):
        if idx == len(classes):
            yield acc
            return
        for choice, cost in per_class_choices(classes[idx], budget_left):
            yield from rec(idx + 1, budget_left - cost, acc + choice)

    yield from rec(0, budget, ())


def solve_exact(
    instance: Instance,
    config: OptimizerConfig,
    objective: Objective = DELTA_MOV,
    prune: bool = True,
    class_cap: int = DEFAULT_CLASS_CAP,
    budget_cap: int = DEFAULT_BUDGET_CAP,
) -> OracleResult:
    """Maximize the objective over every feasible solution, up to symmetry.

    Ties break toward lower cost, then canonical enumeration order.  With
    ``prune=False`` every node is its own class (full enumeration).
    """
    budget = int(config.budget)
    if budget > budget_cap:
        raise CapacityError(f"budget {budget} exceeds oracle cap {budget_cap}")
    if instance.candidate_count > DEFAULT_ORACLE_CANDIDATE_CAP:
        raise CapacityError(
            f"candidate_count {instance.candidate_count} exceeds oracle cap "
            f"{DEFAULT_ORACLE_CANDIDATE_CAP}"
        )

    if config.mode == MONTE_CARLO:
        graphs = [
            (
                sample_live_graph(
                    instance.network, config.model, replicate_rng(config.master_seed, i)
                ),
                1.0 / config.replicates,
            )
            for i in range(config.replicates)
        ]
    else:
        if not exact_mode_available(instance.network, config.model, config.exact_cap):
            raise CapacityError(
                "exact live-graph enumeration is beyond the cap for this instance; "
                "the oracle refuses to substitute sampling silently "
                "(configure mode='mc' explicitly to allow it)"
            )
        graphs = list(
            enumerate_live_graphs(instance.network, config.model, config.exact_cap)
        )

    if prune:
        classes = symmetry_classes(instance, config.model, config.bribed)
    else:
        classes = [[v] for v in instance.nodes()]
    if len(classes) > class_cap:
        raise CapacityError(
            f"{len(classes)} symmetry classes exceed oracle cap {class_cap}"
        )

    reps: list[NodeId] = []
    for members in classes:
        reps.extend(members[: min(len(members), budget)])
    reps = sorted(set(reps))
    views = _graph_views(instance, reps, graphs)
    rep_bit = {r: i for i, r in enumerate(reps)}

    baseline = margin_of_victory(tally(instance, instance.rankings))
    rule = config.rule
    bribed = config.bribed
    kind = objective.kind
    cc = instance.candidate_count
    top_cache: dict[tuple[Ranking, frozenset], int] = {}

    def top_of(ranking: Ranking, msgs: frozenset) -> int:
        key = (ranking, msgs)
        cached = top_cache.get(key)
        if cached is None:
            cached = revised_top(rule, ranking, msgs)
            top_cache[key] = cached
        return cached

    vectors = candidate_vectors(cc, budget, config.sign_restriction)

    def evaluate(chosen: tuple) -> float:
        seeds = [(rep_bit[node], vector_messages(vec), node, vec) for node, vec in chosen]
        total = 0.0
        for view in views:
            if kind == "expected_influence":
                if seeds:
                    union: set[int] = set()
                    for bit, _, _, _ in seeds:
                        union |= view.rep_reach[bit]
                    total += view.weight * len(union)
                continue
            votes = [0] * cc
            union_cache: dict[tuple, frozenset] = {}
            for mask, ranking, count in view.cells:
                sel = tuple(bit for bit, _, _, _ in seeds if mask >> bit & 1)
                if not sel:
                    votes[ranking[0]] += count
                    continue
                msgs = union_cache.get(sel)
                if msgs is None:
                    msgs = frozenset().union(*(m for b, m, _, _ in seeds if b in sel))
                    union_cache[sel] = msgs
                votes[top_of(ranking, msgs)] += count
            if bribed:
                for bit, own, node, _ in seeds:
                    ranking = instance.rankings[node]
                    mask = view.rep_mask[node]
                    sel = tuple(b for b, _, _, _ in seeds if mask >> b & 1)
                    full = frozenset().union(*(m for b, m, _, _ in seeds if b in sel))
                    votes[top_of(ranking, full)] -= 1
                    votes[top_of(ranking, own)] += 1
            mov = votes[0] - max(votes[1:])
            if kind == "expected_delta_mov":
                value = mov - baseline
            elif kind == "expected_c0_votes":
                value = votes[0]
            else:  # probability objectives share the win indicator
                value = 1.0 if mov > 0 else 0.0
            total += view.weight * value
        return total

    best_value = -math.inf
    best_solution = Solution.empty()
    best_cost = math.inf
    explored = 0
    for chosen in _enumerate_class_solutions(classes, vectors, budget):
        explored += 1
        value = evaluate(chosen)
        cost = sum(sum(1 for q in vec if q != ".") for _, vec in chosen)
        if value > best_value + 1e-12 or (
            abs(value - best_value) <= 1e-12 and cost < best_cost
        ):
            best_value = value
            best_cost = cost
            best_solution = Solution(tuple(sorted(chosen)))
    return OracleResult(best_value=best_value, best_solution=best_solution, explored=explored)
