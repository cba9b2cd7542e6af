"""JSON serialization for reports, graphs, shortcuts and circuits.

Reports are written with sorted keys and no wall-clock data by default, so
identical configurations produce byte-identical files.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .graph import ExplicitGraph, LayeredGraph, materialize
from .shortcut import ExplicitShortcut, ShortcutSet


def jsonable(obj: Any) -> Any:
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}" if obj.denominator != 1 else str(obj.numerator)
    if isinstance(obj, float):
        if math.isinf(obj):
            return "unbounded"
        return obj
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if hasattr(obj, "as_dict"):
        return jsonable(obj.as_dict())
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2) + "\n"


@dataclass
class Report:
    config: dict
    counts: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)
    runtime_ms: int | None = None

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.check_dicts() if c.get("mode") != "informational")

    def check_dicts(self) -> list[dict]:
        return [c if isinstance(c, dict) else c.as_dict() for c in self.checks]

    def add(self, checks, prefix: str = "") -> None:
        for c in checks:
            d = dict(c if isinstance(c, dict) else c.as_dict())
            if prefix:
                d["name"] = f"{prefix}.{d['name']}"
            self.checks.append(d)

    def as_dict(self) -> dict:
        out = {
            "config": self.config,
            "counts": self.counts,
            "checks": self.check_dicts(),
            "pass": self.passed,
            "runtime_ms": self.runtime_ms,
        }
        out.update(self.extra)
        return out

    def to_json(self) -> str:
        return dumps(self.as_dict())


# --------------------------------------------------------------------------
# graph and shortcut files


def graph_to_json(g: LayeredGraph, include_edges: bool = False) -> dict:
    out = {
        "coding": dict(g.coding),
        "layers": list(g.layer_sizes),
        "steiner": [v for v in range(g.n) if g.is_steiner(v)] if include_edges else [],
        "vertices": g.n,
    }
    if include_edges:
        m = g if isinstance(g, ExplicitGraph) else materialize(g)
        out["edges"] = [[u, v] for u, v in m.edges()]
    return out


def shortcut_to_json(sc: ShortcutSet) -> dict:
    return {
        "coding": dict(sc.coding),
        "base_vertices": sc.base_n,
        "steiner": [{"id": v, **sc.describe_steiner(v)} for v in sc.steiner_vertices()],
        "edges": [{"from": u, "to": w, "kind": kind} for u, w, kind in sc.edges()],
    }


def shortcut_from_json(data: dict) -> ExplicitShortcut:
    steiner = data["steiner"]
    base_n = data["base_vertices"]
    layers = [s.get("layer", 0) for s in sorted(steiner, key=lambda s: s["id"])]
    ids = [s["id"] for s in steiner]
    if ids != list(range(base_n, base_n + len(ids))):
        raise ValueError("Steiner ids must be consecutive after the original vertices")
    edges = [(e["from"], e["to"], e["kind"]) for e in data["edges"]]
    return ExplicitShortcut(base_n, len(ids), edges, steiner_layers=layers, coding=data.get("coding"))


def explicit_graph_from_json(data: dict) -> ExplicitGraph:
    n = data["vertices"]
    return ExplicitGraph(n, [tuple(e) for e in data["edges"]], steiner=data.get("steiner", ()),
                         coding=data.get("coding"), layer_sizes=data.get("layers"))
