"""On-disk formats: instance files, solution files, custom rule tables.

Instance file (JSON)::

    {
      "candidates": 3,
      "directed": true,
      "nodes": [{"id": 0, "ranking": [2, 1, 0], "cost": 2.0}, ...],
      "edges": [{"from": 0, "to": 1, "p": 1.0, "lt_weight": 0.5}, ...]
    }

``cost`` and ``lt_weight`` are optional.  Undirected instances list each
edge once (lower id first); parsing expands them to symmetric pairs.

Solution file (JSON)::

    [{"node": 3, "messages": {"0": "+", "2": "-"}}, ...]

Custom rule table (text): one line per entry, ``#`` comments allowed::

    <ranking> | <message-vector> -> <ranking>
    0 1 2     | .-+              -> 0 2 1

Rankings are candidate ids most-preferred first; the message vector has
one character per candidate out of ``+ - .``.  Entries must be keyed by
pair-cancelled message sets (a vector slot holds one sign, so any file in
this grammar is canonical).
"""

from __future__ import annotations

import json
from typing import Any

from .diffusion import MessageVector, Solution, make_vector
from .errors import StructuralError
from .model import Instance, VoterNetwork
from .revision import NEGATIVE, POSITIVE, CustomRule


def instance_to_json(instance: Instance) -> dict[str, Any]:
    nodes = []
    costs = instance.network.node_costs or {}
    for v in instance.nodes():
        entry: dict[str, Any] = {"id": v, "ranking": list(instance.rankings[v])}
        if v in costs:
            entry["cost"] = costs[v]
        nodes.append(entry)
    edges = []
    weights = instance.network.lt_weights or {}
    emitted = set()
    for u, v, p in instance.network.edges:
        if not instance.network.directed:
            if (v, u) in emitted:
                continue
            emitted.add((u, v))
        entry = {"from": u, "to": v, "p": p}
        if (u, v) in weights:
            entry["lt_weight"] = weights[(u, v)]
        edges.append(entry)
    return {
        "candidates": instance.candidate_count,
        "directed": instance.network.directed,
        "nodes": nodes,
        "edges": edges,
    }


def dump_instance(instance: Instance) -> str:
    return json.dumps(instance_to_json(instance), indent=2, sort_keys=True)


def instance_from_json(doc: dict[str, Any]) -> Instance:
    try:
        candidates = int(doc["candidates"])
        directed = bool(doc.get("directed", True))
        rankings = {}
        costs = {}
        for entry in doc["nodes"]:
            v = int(entry["id"])
            rankings[v] = tuple(int(c) for c in entry["ranking"])
            if "cost" in entry:
                costs[v] = float(entry["cost"])
        edges = []
        weights = {}
        for entry in doc["edges"]:
            u, v, p = int(entry["from"]), int(entry["to"]), float(entry["p"])
            pairs = [(u, v)] if directed else [(u, v), (v, u)]
            for a, b in pairs:
                edges.append((a, b, p))
                if "lt_weight" in entry:
                    weights[(a, b)] = float(entry["lt_weight"])
    except (KeyError, TypeError, ValueError) as exc:
        raise StructuralError(f"malformed instance file: {exc}") from exc
    network = VoterNetwork(
        node_count=len(rankings),
        edges=tuple(edges),
        lt_weights=weights or None,
        node_costs=costs or None,
        directed=directed,
    )
    return Instance(network, rankings, candidates)


def load_instance(text: str) -> Instance:
    return instance_from_json(json.loads(text))


def solution_to_json(solution: Solution) -> list[dict[str, Any]]:
    out = []
    for node, vec in solution.assignments:
        messages = {
            str(c): q for c, q in enumerate(vec) if q in (POSITIVE, NEGATIVE)
        }
        out.append({"node": node, "messages": messages})
    return out


def dump_solution(solution: Solution) -> str:
    return json.dumps(solution_to_json(solution), indent=2, sort_keys=True)


def solution_from_json(doc: list[dict[str, Any]], candidate_count: int) -> Solution:
    try:
        assignment = {}
        for entry in doc:
            node = int(entry["node"])
            messages = {int(c): q for c, q in entry["messages"].items()}
            assignment[node] = make_vector(candidate_count, messages)
    except (KeyError, TypeError, ValueError) as exc:
        raise StructuralError(f"malformed solution file: {exc}") from exc
    return Solution.of(assignment)


def load_solution(text: str, candidate_count: int) -> Solution:
    return solution_from_json(json.loads(text), candidate_count)


def _parse_ranking(text: str) -> tuple[int, ...]:
    parts = text.replace(",", " ").split()
    return tuple(int(p) for p in parts)


def load_rule_table(text: str, candidate_count: int) -> CustomRule:
    """Parse the custom rule grammar into a :class:`CustomRule`."""
    table = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            left, target = line.split("->")
            ranking_text, vector_text = left.split("|")
            ranking = _parse_ranking(ranking_text)
            vector = vector_text.strip()
            target_ranking = _parse_ranking(target)
        except ValueError as exc:
            raise StructuralError(f"rule table line {lineno}: {exc}") from exc
        if len(vector) != candidate_count:
            raise StructuralError(
                f"rule table line {lineno}: vector {vector!r} length "
                f"!= {candidate_count}"
            )
        messages = frozenset(
            (c, q) for c, q in enumerate(vector) if q in (POSITIVE, NEGATIVE)
        )
        table[(ranking, messages)] = target_ranking
    return CustomRule(candidate_count, table)


def dump_rule_table(rule: CustomRule) -> str:
    lines = []
    for (ranking, messages), target in sorted(rule.table.items()):
        vector = ["."] * rule.candidate_count
        for c, q in messages:
            vector[c] = q
        lines.append(
            f"{' '.join(map(str, ranking))} | {''.join(vector)} -> "
            f"{' '.join(map(str, target))}"
        )
    return "\n".join(lines) + "\n"
