"""Expected values over live graphs: exact enumeration and Monte Carlo.

The exact mode enumerates every live graph with positive probability
(independent-cascade: subsets of the non-certain edges; threshold model:
the product of per-node triggering selections) and is therefore capped.
Monte Carlo draws replicates from independent per-replicate streams
derived from a master seed, so results are bit-reproducible and the
replicates may be evaluated in any partition across workers.
"""

from __future__ import annotations

import itertools
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterator

from .diffusion import (
    LiveGraph,
    Solution,
    diffuse,
    influence,
    lt_selection_options,
    replicate_rng,
    sample_live_graph_ic,
    sample_live_graph_lt,
)
from .errors import CapacityError, StructuralError
from .model import Instance, margin_of_victory, tally
from .revision import RevisionRule

DEFAULT_EXACT_CAP = 20

IC = "ic"
LT = "lt"
EXACT = "exact"
MONTE_CARLO = "mc"


@dataclass(frozen=True)
class Objective:
    """What to average over live graphs.

    ``victory_above_threshold`` estimates the same quantity as
    ``probability_of_victory`` (the win indicator's expectation); the
    threshold is applied by the caller via :func:`meets_threshold`.
    """

    kind: str
    threshold: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in (
            "expected_delta_mov",
            "expected_c0_votes",
            "expected_influence",
            "probability_of_victory",
            "victory_above_threshold",
        ):
            raise StructuralError(f"unknown objective {self.kind!r}")
        if self.kind == "victory_above_threshold":
            if self.threshold is None or not 0.0 <= self.threshold <= 1.0:
                raise StructuralError("victory_above_threshold needs t in [0,1]")


DELTA_MOV = Objective("expected_delta_mov")
C0_VOTES = Objective("expected_c0_votes")
INFLUENCE = Objective("expected_influence")
PROBABILITY_OF_VICTORY = Objective("probability_of_victory")


def victory_above_threshold(t: float) -> Objective:
    return Objective("victory_above_threshold", t)


@dataclass(frozen=True)
class Estimate:
    """A value with its sampling error (zero in exact mode)."""

    value: float
    std_error: float
    replicates: int
    mode: str


def meets_threshold(estimate: Estimate, objective: Objective) -> bool:
    if objective.kind != "victory_above_threshold":
        raise StructuralError("objective carries no threshold")
    return estimate.value >= objective.threshold


def objective_evaluator(
    instance: Instance,
    solution: Solution,
    rule: RevisionRule,
    objective: Objective,
    bribed: bool,
) -> Callable[[LiveGraph], float]:
    """Per-live-graph value whose expectation realizes the objective."""
    if objective.kind == "expected_influence":
        seeds = solution.seeds
        return lambda H: float(influence(seeds, H))

    def evaluate(H: LiveGraph) -> float:
        out = diffuse(instance, solution, H, rule, bribed=bribed)
        if objective.kind == "expected_delta_mov":
            return float(out.delta_mov)
        if objective.kind == "expected_c0_votes":
            return float(out.final_tally.of(0))
        return 1.0 if out.c0_wins else 0.0

    return evaluate


def enumerate_live_graphs_ic(
    network, exact_cap: int = DEFAULT_EXACT_CAP
) -> Iterator[tuple[LiveGraph, float]]:
    """All IC live graphs with their probabilities (certain edges fixed)."""
    certain = [(u, v) for u, v, p in network.edges if p >= 1.0]
    uncertain = [(u, v, p) for u, v, p in network.edges if p < 1.0]
    if len(uncertain) > exact_cap:
        raise CapacityError(
            f"{len(uncertain)} non-certain edges exceed exact enumeration cap "
            f"{exact_cap}"
        )
    for mask in range(1 << len(uncertain)):
        included = set(certain)
        weight = 1.0
        for i, (u, v, p) in enumerate(uncertain):
            if mask >> i & 1:
                included.add((u, v))
                weight *= p
            else:
                weight *= 1.0 - p
        yield LiveGraph(network.node_count, frozenset(included)), weight


def enumerate_live_graphs_lt(
    network, exact_cap: int = DEFAULT_EXACT_CAP
) -> Iterator[tuple[LiveGraph, float]]:
    """All triggering selections with their probabilities."""
    options = lt_selection_options(network)
    ordered = sorted(options.items())
    combos = 1
    for _, opts in ordered:
        combos *= max(1, len(opts))
        if combos > (1 << exact_cap):
            raise CapacityError(
                f"threshold selections exceed exact enumeration cap 2^{exact_cap}"
            )
    per_node = [opts if opts else [(None, 1.0)] for _, opts in ordered]
    for combo in itertools.product(*per_node):
        included = set()
        weight = 1.0
        for edge, p in combo:
            weight *= p
            if edge is not None:
                included.add(edge)
        if weight > 0.0:
            yield LiveGraph(network.node_count, frozenset(included)), weight


def enumerate_live_graphs(
    network, model: str, exact_cap: int = DEFAULT_EXACT_CAP
) -> Iterator[tuple[LiveGraph, float]]:
    if model == IC:
        return enumerate_live_graphs_ic(network, exact_cap)
    if model == LT:
        return enumerate_live_graphs_lt(network, exact_cap)
    raise StructuralError(f"unknown diffusion model {model!r}")


def exact_mode_available(network, model: str, exact_cap: int = DEFAULT_EXACT_CAP) -> bool:
    try:
        if model == IC:
            uncertain = sum(1 for _, _, p in network.edges if p < 1.0)
            return uncertain <= exact_cap
        options = lt_selection_options(network)
        combos = 1
        for opts in options.values():
            combos *= max(1, len(opts))
            if combos > (1 << exact_cap):
                return False
        return True
    except Exception:
        return False


def sample_live_graph(network, model: str, rng) -> LiveGraph:
    if model == IC:
        return sample_live_graph_ic(network, rng)
    if model == LT:
        return sample_live_graph_lt(network, rng)
    raise StructuralError(f"unknown diffusion model {model!r}")


def _replicate_chunk(args) -> list[float]:
    (instance, solution, rule, objective, model, bribed, master_seed, indices) = args
    evaluate = objective_evaluator(instance, solution, rule, objective, bribed)
    values = []
    for i in indices:
        rng = replicate_rng(master_seed, i)
        values.append(evaluate(sample_live_graph(instance.network, model, rng)))
    return values


def estimate(
    instance: Instance,
    solution: Solution,
    rule: RevisionRule,
    objective: Objective,
    model: str = IC,
    bribed: bool = False,
    mode: str = EXACT,
    replicates: int | None = None,
    master_seed: int = 0,
    exact_cap: int = DEFAULT_EXACT_CAP,
    workers: int = 1,
) -> Estimate:
    """Exact expectation or an unbiased Monte Carlo estimate.

    Exact mode enumerates live graphs and returns ``std_error=0``.  Monte
    Carlo returns the sample mean of ``replicates`` independent cascades
    with standard error ``stdev / sqrt(replicates)``; the result depends
    only on ``(master_seed, replicates)``, never on worker count.
    """
    if mode == EXACT:
        evaluate = objective_evaluator(instance, solution, rule, objective, bribed)
        terms = [
            weight * evaluate(H)
            for H, weight in enumerate_live_graphs(instance.network, model, exact_cap)
        ]
        return Estimate(value=math.fsum(terms), std_error=0.0, replicates=0, mode=EXACT)

    if mode != MONTE_CARLO:
        raise StructuralError(f"unknown estimation mode {mode!r}")
    if replicates is None or replicates < 1:
        raise ValueError("Monte Carlo estimation needs replicates >= 1")

    indices = list(range(replicates))
    if workers > 1:
        chunks = [indices[i::workers] for i in range(workers)]
        args = [
            (instance, solution, rule, objective, model, bribed, master_seed, chunk)
            for chunk in chunks
            if chunk
        ]
        by_index: dict[int, float] = {}
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for chunk, values in zip([a[-1] for a in args], pool.map(_replicate_chunk, args)):
                for i, v in zip(chunk, values):
                    by_index[i] = v
        values = [by_index[i] for i in indices]
    else:
        values = _replicate_chunk(
            (instance, solution, rule, objective, model, bribed, master_seed, indices)
        )

    mean = math.fsum(values) / replicates
    spread = statistics.stdev(values) if replicates > 1 else 0.0
    return Estimate(
        value=mean,
        std_error=spread / math.sqrt(replicates),
        replicates=replicates,
        mode=MONTE_CARLO,
    )


def baseline_mov(instance: Instance, live_graph: LiveGraph | None = None) -> int:
    """Margin of victory of the initial rankings.

    No messages flow in the empty solution, so the value is independent of
    the live graph; the parameter documents the per-live-graph contract.
    """
    return margin_of_victory(tally(instance, instance.rankings))
