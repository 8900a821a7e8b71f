import math

import pytest

from electioncontrol import (
    CapacityError,
    DELTA_MOV,
    INFLUENCE,
    Instance,
    OPTIMISTIC,
    PESSIMISTIC,
    PROBABILITY_OF_VICTORY,
    Solution,
    VoterNetwork,
    baseline_mov,
    estimate,
    demo_clique,
    make_vector,
    meets_threshold,
    random_instance,
    victory_above_threshold,
)
from electioncontrol.estimation import Objective, enumerate_live_graphs


def two_node_instance():
    net = VoterNetwork(2, ((0, 1, 0.5),))
    return Instance(net, {0: (0, 1, 2), 1: (1, 0, 2)}, 3)


def seed_zero(inst, messages={0: "+"}):
    return Solution.of({0: make_vector(inst.candidate_count, messages)})


def test_exact_expected_influence():
    inst = two_node_instance()
    est = estimate(inst, seed_zero(inst), PESSIMISTIC, INFLUENCE, mode="exact")
    assert est.value == pytest.approx(1.5)
    assert est.std_error == 0.0
    assert est.mode == "exact"


def test_probability_of_victory_deterministic_win():
    net = VoterNetwork(3, ((0, 1, 1.0), (0, 2, 1.0)))
    inst = Instance(net, {v: (1, 0, 2) for v in range(3)}, 3)
    sol = Solution.of({0: make_vector(3, {1: "-"})})
    est = estimate(inst, sol, PESSIMISTIC, PROBABILITY_OF_VICTORY, mode="exact")
    assert est.value == 1.0


def test_monte_carlo_matches_exact_within_three_sigma():
    inst = two_node_instance()
    sol = seed_zero(inst)
    mc = estimate(
        inst, sol, PESSIMISTIC, INFLUENCE, mode="mc", replicates=10000, master_seed=4
    )
    assert mc.std_error > 0
    assert abs(mc.value - 1.5) <= 3 * mc.std_error


def test_estimate_deterministic_given_seed():
    inst = random_instance(8, 0.3, (0.2, 1.0), 3, seed=5)
    sol = seed_zero(inst)
    a = estimate(inst, sol, PESSIMISTIC, DELTA_MOV, mode="mc", replicates=300, master_seed=9)
    b = estimate(inst, sol, PESSIMISTIC, DELTA_MOV, mode="mc", replicates=300, master_seed=9)
    assert a == b


def test_worker_count_does_not_change_values():
    inst = random_instance(6, 0.3, (0.3, 1.0), 3, seed=6)
    sol = seed_zero(inst)
    serial = estimate(
        inst, sol, PESSIMISTIC, DELTA_MOV, mode="mc", replicates=60, master_seed=3
    )
    parallel = estimate(
        inst,
        sol,
        PESSIMISTIC,
        DELTA_MOV,
        mode="mc",
        replicates=60,
        master_seed=3,
        workers=2,
    )
    assert serial == parallel


def test_certain_instance_monte_carlo_zero_variance():
    inst = demo_clique()
    sol = Solution.of({0: make_vector(5, {0: "+", 2: "-"})})
    mc = estimate(inst, sol, PESSIMISTIC, DELTA_MOV, mode="mc", replicates=50, master_seed=0)
    exact = estimate(inst, sol, PESSIMISTIC, DELTA_MOV, mode="exact")
    assert mc.std_error == 0.0
    assert mc.value == exact.value == 2.0


def test_expected_delta_mov_of_empty_solution_is_zero():
    inst = random_instance(7, 0.3, (0.4, 1.0), 3, seed=11)
    for mode, reps in (("exact", None), ("mc", 200)):
        est = estimate(
            inst, Solution.empty(), PESSIMISTIC, DELTA_MOV, mode=mode, replicates=reps,
            master_seed=2,
        )
        assert est.value == 0.0


def test_exact_cap_enforced():
    inst = random_instance(12, 0.5, (0.2, 0.9), 3, seed=1)
    assert sum(1 for _, _, p in inst.network.edges if p < 1.0) > 20
    with pytest.raises(CapacityError):
        estimate(inst, Solution.empty(), PESSIMISTIC, DELTA_MOV, mode="exact")


def test_replicates_required_for_monte_carlo():
    inst = two_node_instance()
    with pytest.raises(ValueError):
        estimate(inst, Solution.empty(), PESSIMISTIC, DELTA_MOV, mode="mc", replicates=0)


def test_exact_weights_sum_to_one():
    inst = random_instance(5, 0.4, (0.3, 0.9), 3, seed=3)
    weights = [w for _, w in enumerate_live_graphs(inst.network, "ic")]
    assert math.fsum(weights) == pytest.approx(1.0)
    lt_inst = random_instance(5, 0.4, (1.0, 1.0), 3, seed=3, lt=True)
    weights = [w for _, w in enumerate_live_graphs(lt_inst.network, "lt")]
    assert math.fsum(weights) == pytest.approx(1.0)


def test_victory_threshold_objective():
    inst = demo_clique()
    winning = Solution.of({0: make_vector(5, {0: "+", 2: "-"})})
    objective = victory_above_threshold(0.8)
    est = estimate(inst, winning, PESSIMISTIC, objective, mode="exact")
    assert est.value == 1.0
    assert meets_threshold(est, objective)
    losing = Solution.of({0: make_vector(5, {3: "+"})})
    est = estimate(inst, losing, PESSIMISTIC, objective, mode="exact")
    assert est.value == 0.0
    assert not meets_threshold(est, objective)


def test_exact_and_monte_carlo_agree_on_lt():
    inst = random_instance(6, 0.35, (1.0, 1.0), 3, seed=13, lt=True)
    sol = seed_zero(inst, {1: "-"})
    exact = estimate(inst, sol, PESSIMISTIC, DELTA_MOV, model="lt", mode="exact")
    mc = estimate(
        inst, sol, PESSIMISTIC, DELTA_MOV, model="lt", mode="mc", replicates=8000,
        master_seed=21,
    )
    tol = max(3 * mc.std_error, 1e-9)
    assert abs(mc.value - exact.value) <= tol


def test_baseline_mov():
    assert baseline_mov(demo_clique()) == -1


def test_unknown_objective_rejected():
    with pytest.raises(Exception):
        Objective("maximize_vibes")
