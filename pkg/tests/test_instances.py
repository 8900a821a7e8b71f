import itertools
import math

import pytest

from electioncontrol import (
    DELTA_MOV,
    Instance,
    OPTIMISTIC,
    PESSIMISTIC,
    OptimizerConfig,
    SetCoverInstance,
    Solution,
    StructuralError,
    VertexCoverInstance,
    VoterNetwork,
    bribed_blowup,
    diffuse,
    epsilon_connect,
    estimate,
    demo_clique,
    full_live_graph,
    greedy_trap_ring,
    greedy_trap_tree,
    make_vector,
    margin_of_victory,
    random_instance,
    set_cover_certificate,
    set_cover_reduction,
    solve_exact,
    tally,
    vertex_cover_lt_reduction,
)

SC_333 = SetCoverInstance(
    3, (frozenset({0, 1}), frozenset({1, 2}), frozenset({0, 2})), 2
)


def test_demo_clique_shape():
    inst = demo_clique()
    assert inst.node_count == 5
    assert inst.candidate_count == 5
    assert len(inst.network.edges) == 20
    t = tally(inst, inst.rankings)
    assert t.votes == (1, 2, 2, 0, 0)
    assert margin_of_victory(t) == -1


def test_set_cover_reduction_sizes_and_tallies():
    build = set_cover_reduction(SC_333, 3)
    assert len(build.set_nodes) + len(build.element_nodes) == 6
    assert len(build.g2_nodes) == 26
    assert len(build.g3_nodes) == 6
    assert len(build.g4_nodes) == 20
    t = tally(build.instance, build.instance.rankings)
    assert t.as_dict() == {0: 20, 1: 20, 2: 18}
    assert margin_of_victory(t) == 0
    assert build.recommended_budget == 3


def test_set_cover_reduction_more_candidates():
    build = set_cover_reduction(SC_333, 4)
    t = tally(build.instance, build.instance.rankings)
    assert t.of(0) == t.of(1) == 20
    assert t.of(2) == 18
    assert t.of(3) == 19
    assert margin_of_victory(t) == 0


def test_set_cover_reduction_needs_three_candidates():
    with pytest.raises(ValueError):
        set_cover_reduction(SC_333, 2)


def test_certificate_reaches_margin_one():
    build = set_cover_reduction(SC_333, 3)
    cert = set_cover_certificate(build, SC_333, [0, 1])
    out = diffuse(
        build.instance, cert, full_live_graph(build.instance.network), PESSIMISTIC
    )
    assert out.mov == 1
    assert out.delta_mov == 1


def test_certificate_pads_small_covers():
    sc = SetCoverInstance(2, (frozenset({0, 1}), frozenset({1})), 2)
    build = set_cover_reduction(sc, 3)
    cert = set_cover_certificate(build, sc, [0])
    assert len(cert.seeds) == 3  # h seeds plus the booster
    out = diffuse(
        build.instance, cert, full_live_graph(build.instance.network), PESSIMISTIC
    )
    assert out.mov == 1


def test_set_cover_has_cover():
    assert SC_333.has_cover()
    assert not SetCoverInstance(
        3, (frozenset({0}), frozenset({1}), frozenset({2})), 1
    ).has_cover()


def test_vertex_cover_reduction_properties():
    vc = VertexCoverInstance(3, ((0, 1), (1, 2), (0, 2)), 2)
    build = vertex_cover_lt_reduction(vc, 3)
    t = tally(build.instance, build.instance.rankings)
    assert margin_of_victory(t) == 0
    assert t.of(0) == t.of(1)
    assert build.recommended_budget == 3
    # each ring component is one strongly connected directed cycle
    for members in (build.g2_nodes, build.g3_nodes, build.g4_nodes):
        members = set(members)
        ring_edges = [
            (u, v)
            for u, v, _ in build.instance.network.edges
            if u in members and v in members
        ]
        assert len(ring_edges) == len(members)
        succ = dict(ring_edges)
        node = next(iter(members))
        seen = set()
        while node not in seen:
            seen.add(node)
            node = succ[node]
        assert seen == members


def test_vertex_cover_has_cover():
    assert VertexCoverInstance(3, ((0, 1), (1, 2), (0, 2)), 2).has_cover()
    assert not VertexCoverInstance(3, ((0, 1), (1, 2), (0, 2)), 1).has_cover()


def test_bribed_blowup_doubles_with_unit_parameters():
    base = demo_clique()
    blown = bribed_blowup(base, 1, 1)
    assert blown.node_count == base.node_count * 2
    t = tally(blown, blown.rankings)
    assert t.votes == tuple(2 * v for v in tally(base, base.rankings).votes)


def test_epsilon_connect():
    inst = demo_clique()
    assert epsilon_connect(inst, [], 0.5).network.edges == inst.network.edges
    with pytest.raises(StructuralError):
        epsilon_connect(inst, [(0, 1)], 0.5)

    chain = Instance(
        VoterNetwork(3, ((0, 1, 1.0),)),
        {0: (0, 1, 2), 1: (1, 0, 2), 2: (2, 1, 0)},
        3,
    )
    eps1 = epsilon_connect(chain, [(1, 2)], 1.0)
    out = diffuse(
        eps1,
        Solution.of({0: make_vector(3, {1: "-"})}),
        full_live_graph(eps1.network),
        PESSIMISTIC,
    )
    assert out.received[2] == frozenset({(1, "-")})


def test_epsilon_connect_expectation_shift_bound():
    # 10 certainty nodes in a chain; r=2 epsilon edges closing cycles
    n, r, eps = 10, 2, 1e-6
    edges = tuple((i, i + 1, 1.0) for i in range(n - 1))
    rankings = {v: ((0, 1, 2) if v < 4 else (1, 0, 2) if v < 7 else (2, 1, 0)) for v in range(n)}
    inst = Instance(VoterNetwork(n, edges), rankings, 3)
    sol = Solution.of({4: make_vector(3, {2: "+"})})
    base = estimate(inst, sol, PESSIMISTIC, DELTA_MOV, mode="exact").value
    connected = epsilon_connect(inst, [(n - 1, 0), (5, 0)], eps)
    shifted = estimate(connected, sol, PESSIMISTIC, DELTA_MOV, mode="exact").value
    assert abs(shifted - base) <= 4 * (2**r - 1) * n * eps


def test_trap_ring_construction():
    inst = greedy_trap_ring()
    assert inst.node_count == 19
    assert tally(inst, inst.rankings).votes == (7, 7, 5)
    undirected = {frozenset((u, v)) for u, v, _ in inst.network.edges}
    deg = {}
    for e in undirected:
        for v in e:
            deg[v] = deg.get(v, 0) + 1
    assert max(deg.values()) <= 2


def test_trap_ring_designated_solution():
    inst = greedy_trap_ring()
    # one node of the three-node rival-1 block boosts candidate 2; one node
    # of the two-node rival-2 block boosts candidate 1
    block_a = [v for v in inst.nodes() if inst.rankings[v] == (1, 2, 0)][4:]
    block_b = [v for v in inst.nodes() if inst.rankings[v] == (2, 1, 0)][:2]
    sol = Solution.of(
        {
            block_a[0]: make_vector(3, {2: "+"}),
            block_b[0]: make_vector(3, {1: "+"}),
        }
    )
    out = diffuse(inst, sol, full_live_graph(inst.network), PESSIMISTIC)
    assert out.delta_mov == 1


def test_trap_tree_construction():
    inst = greedy_trap_tree(4)
    assert inst.node_count == 19 * 4
    assert tally(inst, inst.rankings).votes == (28, 28, 20)
    # a directed forest: no node has two parents, no cycles
    in_deg = {}
    for u, v, _ in inst.network.edges:
        in_deg[v] = in_deg.get(v, 0) + 1
    assert max(in_deg.values()) == 1


def test_trap_tree_requires_r_at_least_two():
    with pytest.raises(ValueError):
        greedy_trap_tree(1)


def test_random_instance_determinism_and_edge_stats():
    a = random_instance(12, 0.2, (0.5, 1.0), 3, seed=42)
    b = random_instance(12, 0.2, (0.5, 1.0), 3, seed=42)
    assert a.network.edges == b.network.edges
    assert a.rankings == b.rankings

    assert len(random_instance(10, 0.0, (1.0, 1.0), 3, seed=1).network.edges) == 0

    total = 0
    draws = 100
    for s in range(draws):
        total += len(random_instance(12, 0.2, (1.0, 1.0), 3, seed=s).network.edges)
    mean = total / draws
    expected = 12 * 11 * 0.2
    sigma = math.sqrt(12 * 11 * 0.2 * 0.8 / draws)
    assert abs(mean - expected) <= 3 * sigma


def test_random_instance_lt_weights_normalized():
    inst = random_instance(8, 0.4, (0.5, 1.0), 3, seed=9, lt=True)
    incoming = {}
    for (u, v), w in inst.network.lt_weights.items():
        incoming[v] = incoming.get(v, 0.0) + w
    for total in incoming.values():
        assert total == pytest.approx(1.0)
