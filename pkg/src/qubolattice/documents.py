"""JSON document formats tying the compilers together for file pipelines."""

from __future__ import annotations

import json
from typing import Mapping

from .hamcycle import HamcycleInstance
from .knapsack import KnapsackInstance
from .coloring import ColoringInstance
from .numpart import PartitionInstance


class DocumentError(ValueError):
    """Malformed document."""


def parse_instance(doc: Mapping):
    """Tagged-union instance documents -> typed instances."""
    if not isinstance(doc, Mapping) or len(doc) != 1:
        raise DocumentError("instance document must have exactly one top-level tag")
    tag, body = next(iter(doc.items()))
    try:
        if tag == "partition":
            return PartitionInstance(tuple(int(x) for x in body["numbers"]))
        if tag == "knapsack":
            return KnapsackInstance(
                tuple(int(x) for x in body["values"]),
                tuple(int(x) for x in body["weights"]),
                int(body["capacity"]),
            )
        if tag == "coloring":
            return ColoringInstance(
                tuple((int(u), int(v)) for u, v in body.get("edges", [])),
                int(body["q"]),
                int(body["num_vertices"]) if "num_vertices" in body else None,
            )
        if tag == "hamcycle":
            return HamcycleInstance(
                tuple((int(u), int(v)) for u, v in body.get("edges", [])),
                int(body["num_vertices"]) if "num_vertices" in body else None,
            )
        if tag == "unary":
            return {"kind": "unary", "n": int(body["n"]), "allow_zero": bool(body.get("allow_zero", False))}
        if tag == "adder":
            return {"kind": "adder", "n": int(body["n"])}
    except (KeyError, TypeError) as err:
        raise DocumentError(f"malformed {tag!r} instance: {err}") from None
    raise DocumentError(f"unknown instance tag {tag!r}")


def instance_to_doc(inst) -> dict:
    if isinstance(inst, PartitionInstance):
        return {"partition": {"numbers": list(inst.numbers)}}
    if isinstance(inst, KnapsackInstance):
        return {
            "knapsack": {
                "values": list(inst.values),
                "weights": list(inst.weights),
                "capacity": inst.capacity,
            }
        }
    if isinstance(inst, ColoringInstance):
        return {
            "coloring": {
                "edges": [list(e) for e in inst.edges],
                "q": inst.q,
                "num_vertices": inst.n,
            }
        }
    if isinstance(inst, HamcycleInstance):
        return {
            "hamcycle": {
                "edges": [list(e) for e in inst.edges],
                "num_vertices": inst.n,
            }
        }
    if isinstance(inst, dict) and inst.get("kind") == "unary":
        return {"unary": {"n": inst["n"], "allow_zero": inst.get("allow_zero", False)}}
    if isinstance(inst, dict) and inst.get("kind") == "adder":
        return {"adder": {"n": inst["n"]}}
    raise DocumentError(f"cannot serialize {type(inst).__name__}")


def dumps(doc) -> str:
    """Canonical serialization: sorted keys, fixed separators, newline end."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise DocumentError(f"invalid JSON at line {err.lineno}, column {err.colno}") from None
