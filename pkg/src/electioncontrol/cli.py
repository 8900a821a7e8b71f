"""Command-line driver.

Subcommands compose through shell pipelines: ``build`` writes an instance
file to stdout, every analysis subcommand reads one from ``--instance``
(default ``-`` = stdin) and emits machine-readable JSON (or flattened CSV
for scalar results) on stdout.  Output is bit-identical for identical
arguments and seeds; timing goes to stderr.

Exit codes: 0 success, 1 library error, 2 usage error, 3 capacity error,
4 algorithm inapplicable (no universal message set).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time

from . import formats, instances
from .diffusion import (
    Solution,
    diffuse,
    diffuse_timed,
    full_live_graph,
    replicate_rng,
    validate_solution,
)
from .errors import (
    CapacityError,
    ElectionControlError,
    InapplicableError,
    StructuralError,
)
from .estimation import (
    Objective,
    baseline_mov,
    estimate,
    meets_threshold,
    sample_live_graph,
)
from .model import margin_of_victory, tally
from .optimize import (
    OptimizerConfig,
    approximation_ratio,
    budgeted_greedy,
    frontier,
    greedy_approach_loop,
    universal_greedy,
)
from .oracle import solve_exact
from .revision import (
    OPTIMISTIC,
    PESSIMISTIC,
    ScoreBasedRule,
    check_axioms,
    is_least_candidate_manipulable,
    min_universal_message_set,
)

SIGN_CHOICES = {"both": "both", "pos": "positive_only", "neg": "negative_only"}


def _parse_rule(spec: str, candidate_count: int | None = None):
    if spec == "pessimistic":
        return PESSIMISTIC
    if spec == "optimistic":
        return OPTIMISTIC
    if spec == "score":
        return ScoreBasedRule()
    if spec.startswith("score:"):
        return ScoreBasedRule(epsilon=float(spec.split(":", 1)[1]))
    if spec.startswith("custom:"):
        path = spec.split(":", 1)[1]
        if candidate_count is None:
            raise StructuralError("custom rules need a known candidate count")
        with open(path, "r", encoding="utf-8") as fh:
            return formats.load_rule_table(fh.read(), candidate_count)
    raise StructuralError(f"unknown rule {spec!r}")


def _parse_objective(spec: str) -> Objective:
    mapping = {
        "delta-mov": "expected_delta_mov",
        "c0-votes": "expected_c0_votes",
        "influence": "expected_influence",
        "victory-prob": "probability_of_victory",
    }
    if spec in mapping:
        return Objective(mapping[spec])
    if spec.startswith("victory-threshold:"):
        return Objective("victory_above_threshold", float(spec.split(":", 1)[1]))
    raise StructuralError(f"unknown objective {spec!r}")


def _read_instance(args):
    if args.instance == "-":
        text = sys.stdin.read()
    else:
        with open(args.instance, "r", encoding="utf-8") as fh:
            text = fh.read()
    return formats.load_instance(text)


def _read_solution(path: str, candidate_count: int) -> Solution:
    with open(path, "r", encoding="utf-8") as fh:
        return formats.load_solution(fh.read(), candidate_count)


def _emit(result: dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(result, indent=2, sort_keys=True))
        return
    scalars = {
        k: v for k, v in sorted(result.items()) if isinstance(v, (int, float, str, bool))
    }
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(scalars.keys())
    writer.writerow(scalars.values())
    print(buf.getvalue(), end="")


def _add_common(parser: argparse.ArgumentParser, instance: bool = True) -> None:
    if instance:
        parser.add_argument("--instance", default="-", help="instance file or - for stdin")
    parser.add_argument("--rule", default="pessimistic",
                        help="pessimistic | optimistic | score[:eps] | custom:FILE")
    parser.add_argument("--model", choices=["ic", "lt"], default="ic")
    parser.add_argument("--signs", choices=["both", "pos", "neg"], default="both")
    parser.add_argument("--bribed", action="store_true")
    parser.add_argument("--mode", choices=["auto", "exact", "mc"], default="auto")
    parser.add_argument("--replicates", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int,
                        default=int(os.environ.get("ELECTIONCONTROL_WORKERS", "1")))
    parser.add_argument("--format", choices=["json", "csv"], default="json")


def _config(args, instance, budget: float = 0) -> OptimizerConfig:
    return OptimizerConfig(
        budget=budget,
        rule=_parse_rule(args.rule, instance.candidate_count if instance else None),
        sign_restriction=SIGN_CHOICES[args.signs],
        model=args.model,
        bribed=args.bribed,
        mode=args.mode,
        replicates=args.replicates,
        master_seed=args.seed,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="electioncontrol",
        description="Election control through social influence: simulation, "
        "estimation, seed optimization, exact oracle, instance generators.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="emit an instance file")
    bsub = p.add_subparsers(dest="family", required=True)
    bsub.add_parser("demo-clique")
    q = bsub.add_parser("setcover")
    q.add_argument("--setcover", required=True, help="JSON file {n, sets, h}")
    q.add_argument("--candidates", type=int, default=3)
    q = bsub.add_parser("vertexcover")
    q.add_argument("--vertexcover", required=True, help="JSON file {nodes, edges, k}")
    q.add_argument("--candidates", type=int, default=3)
    q = bsub.add_parser("blowup")
    q.add_argument("--instance", default="-")
    q.add_argument("--rho", type=int, required=True)
    q.add_argument("--h", type=int, required=True)
    q = bsub.add_parser("epsilon-connect")
    q.add_argument("--instance", default="-")
    q.add_argument("--edge", action="append", default=[], help="u:v, repeatable")
    q.add_argument("--eps", type=float, required=True)
    bsub.add_parser("trap-ring")
    q = bsub.add_parser("trap-tree")
    q.add_argument("--r", type=int, default=4)
    q = bsub.add_parser("random")
    q.add_argument("--nodes", type=int, required=True)
    q.add_argument("--edge-prob", type=float, required=True)
    q.add_argument("--p-min", type=float, default=1.0)
    q.add_argument("--p-max", type=float, default=1.0)
    q.add_argument("--candidates", type=int, default=3)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--lt", action="store_true")

    p = sub.add_parser("simulate", help="one cascade on a sampled live graph")
    _add_common(p)
    p.add_argument("--solution", required=True)
    p.add_argument("--timed", action="store_true", help="use the layered process")

    p = sub.add_parser("estimate", help="expected objective value")
    _add_common(p)
    p.add_argument("--solution", required=True)
    p.add_argument("--objective", default="delta-mov")

    p = sub.add_parser("greedy", help="universal-message greedy seed selection")
    _add_common(p)
    p.add_argument("--budget", type=int, required=True)

    p = sub.add_parser("budgeted", help="cost-aware greedy seed selection")
    _add_common(p)
    p.add_argument("--budget", type=float, required=True)

    p = sub.add_parser("frontier", help="improving single-seed augmentations")
    _add_common(p)
    p.add_argument("--budget", type=int, required=True)
    p.add_argument("--solution", default=None, help="current solution file")

    p = sub.add_parser("greedy-loop", help="frontier-greedy loop")
    _add_common(p)
    p.add_argument("--budget", type=int, required=True)
    p.add_argument("--policy", choices=["max-gain", "runner-up"], default="max-gain")

    p = sub.add_parser("oracle", help="exact brute-force optimum")
    _add_common(p)
    p.add_argument("--budget", type=int, required=True)
    p.add_argument("--objective", default="delta-mov")
    p.add_argument("--no-prune", action="store_true")

    p = sub.add_parser("tau", help="smallest universal message set")
    p.add_argument("--rule", default="pessimistic")
    p.add_argument("--candidates", type=int, required=True)
    p.add_argument("--signs", choices=["both", "pos", "neg"], default="both")
    p.add_argument("--format", choices=["json", "csv"], default="json")

    p = sub.add_parser("check-axioms", help="exhaustive axiom verification")
    p.add_argument("--rule", default="pessimistic")
    p.add_argument("--candidates", type=int, required=True)
    p.add_argument("--rule-table", default=None, help="custom rule table file")
    p.add_argument("--format", choices=["json", "csv"], default="json")

    p = sub.add_parser("verify-reduction", help="cover decision vs oracle optimum")
    p.add_argument("--setcover", required=True)
    p.add_argument("--h", type=int, default=None, help="override the file's bound")
    p.add_argument("--candidates", type=int, default=3)
    p.add_argument("--format", choices=["json", "csv"], default="json")

    return parser


def _cmd_build(args) -> dict | None:
    if args.family == "demo-clique":
        instance = instances.demo_clique()
    elif args.family == "setcover":
        with open(args.setcover, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        sc = instances.SetCoverInstance(
            n_elements=int(doc["n"]),
            sets=tuple(frozenset(map(int, s)) for s in doc["sets"]),
            h=int(doc["h"]),
        )
        build = instances.set_cover_reduction(sc, args.candidates)
        print(formats.dump_instance(build.instance))
        print(f"recommended budget: {build.recommended_budget}", file=sys.stderr)
        return None
    elif args.family == "vertexcover":
        with open(args.vertexcover, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        vc = instances.VertexCoverInstance(
            node_count=int(doc["nodes"]),
            edges=tuple((int(u), int(v)) for u, v in doc["edges"]),
            k=int(doc["k"]),
        )
        build = instances.vertex_cover_lt_reduction(vc, args.candidates)
        print(formats.dump_instance(build.instance))
        print(f"recommended budget: {build.recommended_budget}", file=sys.stderr)
        return None
    elif args.family == "blowup":
        base = _read_instance(args)
        instance = instances.bribed_blowup(base, args.rho, args.h)
    elif args.family == "epsilon-connect":
        base = _read_instance(args)
        extra = []
        for text in args.edge:
            u, v = text.split(":")
            extra.append((int(u), int(v)))
        instance = instances.epsilon_connect(base, extra, args.eps)
    elif args.family == "trap-ring":
        instance = instances.greedy_trap_ring()
    elif args.family == "trap-tree":
        instance = instances.greedy_trap_tree(args.r)
    elif args.family == "random":
        instance = instances.random_instance(
            node_count=args.nodes,
            edge_probability=args.edge_prob,
            p_range=(args.p_min, args.p_max),
            candidate_count=args.candidates,
            seed=args.seed,
            lt=args.lt,
        )
    else:  # pragma: no cover - argparse enforces choices
        raise StructuralError(f"unknown family {args.family}")
    print(formats.dump_instance(instance))
    return None


def _cmd_simulate(args) -> dict:
    instance = _read_instance(args)
    rule = _parse_rule(args.rule, instance.candidate_count)
    solution = _read_solution(args.solution, instance.candidate_count)
    validate_solution(instance, solution, SIGN_CHOICES[args.signs])
    rng = replicate_rng(args.seed, 0)
    live = sample_live_graph(instance.network, args.model, rng)
    run = diffuse_timed if args.timed else diffuse
    out = run(instance, solution, live, rule, bribed=args.bribed)
    return {
        "tally": list(out.final_tally.votes),
        "mov": out.mov,
        "delta_mov": out.delta_mov,
        "c0_wins": out.c0_wins,
        "live_edges": len(live.included_edges),
    }


def _cmd_estimate(args) -> dict:
    instance = _read_instance(args)
    rule = _parse_rule(args.rule, instance.candidate_count)
    solution = _read_solution(args.solution, instance.candidate_count)
    validate_solution(instance, solution, SIGN_CHOICES[args.signs])
    objective = _parse_objective(args.objective)
    mode = args.mode
    if mode == "auto":
        config = _config(args, instance)
        mode = config.resolved_mode(instance)
    est = estimate(
        instance,
        solution,
        rule,
        objective,
        model=args.model,
        bribed=args.bribed,
        mode=mode,
        replicates=args.replicates,
        master_seed=args.seed,
        workers=args.workers,
    )
    result = {
        "objective": args.objective,
        "value": est.value,
        "std_error": est.std_error,
        "replicates": est.replicates,
        "mode": est.mode,
        "baseline_mov": baseline_mov(instance),
    }
    if objective.kind == "victory_above_threshold":
        result["threshold_met"] = meets_threshold(est, objective)
    return result


def _cmd_greedy(args) -> dict:
    instance = _read_instance(args)
    config = _config(args, instance, budget=args.budget)
    result = min_universal_message_set(
        config.rule, instance.candidate_count, config.sign_restriction
    )
    solution = universal_greedy(instance, config)
    return {
        "tau": result.tau,
        "ratio": approximation_ratio(args.budget, result.tau),
        "seeds": len(solution.seeds),
        "cost": solution.cost(instance.network.node_costs),
        "solution": formats.solution_to_json(solution),
    }


def _cmd_budgeted(args) -> dict:
    instance = _read_instance(args)
    config = _config(args, instance, budget=args.budget)
    solution = budgeted_greedy(instance, config)
    return {
        "cost": solution.cost(instance.network.node_costs),
        "solution": formats.solution_to_json(solution),
    }


def _cmd_frontier(args) -> dict:
    instance = _read_instance(args)
    config = _config(args, instance, budget=args.budget)
    current = (
        _read_solution(args.solution, instance.candidate_count)
        if args.solution
        else Solution.empty()
    )
    entries = frontier(instance, current, config)
    return {
        "count": len(entries),
        "entries": [
            {
                "node": e.node,
                "vector": "".join(e.vector),
                "gain_mov": e.gain_mov,
                "gain_c0_votes": e.gain_c0_votes,
                "gain_runner_up": e.gain_runner_up,
            }
            for e in sorted(entries, key=lambda e: (e.node, e.vector))
        ],
    }


def _cmd_greedy_loop(args) -> dict:
    from .optimize import select_max_gain, select_runner_up_attrition

    instance = _read_instance(args)
    config = _config(args, instance, budget=args.budget)
    policy = select_max_gain if args.policy == "max-gain" else select_runner_up_attrition
    solution = greedy_approach_loop(instance, config, policy)
    est = estimate(
        instance,
        solution,
        config.rule,
        Objective("expected_delta_mov"),
        model=args.model,
        bribed=args.bribed,
        mode=config.resolved_mode(instance),
        replicates=args.replicates,
        master_seed=args.seed,
    )
    return {
        "delta_mov": est.value,
        "cost": solution.cost(instance.network.node_costs),
        "solution": formats.solution_to_json(solution),
    }


def _cmd_oracle(args) -> dict:
    instance = _read_instance(args)
    config = _config(args, instance, budget=args.budget)
    result = solve_exact(
        instance,
        config,
        objective=_parse_objective(args.objective),
        prune=not args.no_prune,
    )
    return {
        "best_value": result.best_value,
        "explored": result.explored,
        "cost": result.best_solution.cost(instance.network.node_costs),
        "best_solution": formats.solution_to_json(result.best_solution),
    }


def _cmd_tau(args) -> dict:
    rule = _parse_rule(args.rule, args.candidates)
    result = min_universal_message_set(rule, args.candidates, SIGN_CHOICES[args.signs])
    out: dict = {"exists": result.exists, "tau": result.tau}
    if result.exists:
        out["witness"] = {str(c): q for c, q in sorted(result.witness)}
        out["lcm"] = is_least_candidate_manipulable(rule, args.candidates)
    else:
        out["lcm"] = is_least_candidate_manipulable(rule, args.candidates)
    return out


def _cmd_check_axioms(args) -> dict:
    if args.rule_table:
        with open(args.rule_table, "r", encoding="utf-8") as fh:
            rule = formats.load_rule_table(fh.read(), args.candidates)
    else:
        rule = _parse_rule(args.rule, args.candidates)
    violations = check_axioms(rule, args.candidates)
    return {
        "ok": not violations,
        "violations": [
            {
                "axiom": v.axiom,
                "ranking": list(v.ranking),
                "messages": sorted(f"{c}{q}" for c, q in v.message_set),
                "expected_top": v.expected_top,
                "actual_top": v.actual_top,
            }
            for v in violations[:50]
        ],
        "violation_count": len(violations),
    }


def _cmd_verify_reduction(args) -> dict:
    with open(args.setcover, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    h = args.h if args.h is not None else int(doc["h"])
    sc = instances.SetCoverInstance(
        n_elements=int(doc["n"]),
        sets=tuple(frozenset(map(int, s)) for s in doc["sets"]),
        h=h,
    )
    build = instances.set_cover_reduction(sc, args.candidates)
    config = OptimizerConfig(
        budget=build.recommended_budget, rule=PESSIMISTIC, mode="exact"
    )
    result = solve_exact(build.instance, config)
    cover_exists = sc.has_cover()
    iff_holds = (result.best_value >= 1) == cover_exists
    return {
        "cover_exists": cover_exists,
        "oracle_delta_mov": result.best_value,
        "budget": build.recommended_budget,
        "iff_holds": iff_holds,
        "status": "PASS" if iff_holds else "FAIL",
    }


COMMANDS = {
    "build": _cmd_build,
    "simulate": _cmd_simulate,
    "estimate": _cmd_estimate,
    "greedy": _cmd_greedy,
    "budgeted": _cmd_budgeted,
    "frontier": _cmd_frontier,
    "greedy-loop": _cmd_greedy_loop,
    "oracle": _cmd_oracle,
    "tau": _cmd_tau,
    "check-axioms": _cmd_check_axioms,
    "verify-reduction": _cmd_verify_reduction,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    try:
        result = COMMANDS[args.command](args)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 3
    except InapplicableError as exc:
        print(f"inapplicable: {exc}", file=sys.stderr)
        return 4
    except (ElectionControlError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if result is not None:
        _emit(result, args.format)
    print(
        f"[{args.command}] {time.perf_counter() - started:.3f}s",
        file=sys.stderr,
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
