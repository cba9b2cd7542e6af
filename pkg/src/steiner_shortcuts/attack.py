"""The k-thick Steiner shortcut for 𝒢_k and its end-to-end verifier.

Steiner layer S_i (1 <= i <= k-1) is a copy of the vertex box. Edge group
E_0 leaves the source box and moves block 0 by ℓ·v; E_i moves block i by
ℓ·v between consecutive Steiner layers; E_{k-1} lands in the last layer.
Every critical pair therefore gets a path of exactly k hops.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import prod
from typing import Sequence

from .analysis import (
    UNBOUNDED,
    assign_critical_shortest_paths,
    efficiency,
    hop_distances_for_pairs,
    normalize,
    replay_check,
    tc_equivalent,
    thickness,
    volume_check,
)
from .errors import ContractViolation
from .graph import segment_certificate
from .hesse import Check, CriticalPair, CriticalSet, HesseGraph, HesseParams
from .shortcut import AugmentedGraph, ShortcutSet


class HesseShortcut(ShortcutSet):
    """Rule-generated shortcut E_0 ∪ ... ∪ E_{k-1} over Steiner layers S_1..S_{k-1}."""

    def __init__(self, g: HesseGraph):
        if g.k < 2:
            raise ContractViolation("the attack needs k >= 2 (no Steiner layers for k = 1)")
        self.g = g
        self.params = g.params
        self.base_n = g.n
        self.num_steiner = (g.k - 1) * g.N
        self.kinds = tuple(f"E{i}" for i in range(g.k))
        self.ell = g.params.ell
        self.coding = {"family": "hesse-attack", **g.params.as_dict(), "steiner_layers": g.k - 1}
        self._src = g.params.source_box

    # Steiner id of local code x in S_i
    def steiner_id(self, i: int, x: int) -> int:
        return self.base_n + (i - 1) * self.g.N + x

    def steiner_layer(self, v: int) -> int | None:
        if not self.is_steiner(v):
            return None
        return (v - self.base_n) // self.g.N + 1

    def decode_steiner(self, v: int) -> tuple[int, tuple]:
        i = self.steiner_layer(v)
        if i is None:
            raise ContractViolation(f"{v} is not a Steiner vertex")
        _, blocks = self.g.decode((v - self.base_n) % self.g.N)
        return i, blocks

    def describe_steiner(self, v: int) -> dict:
        i, blocks = self.decode_steiner(v)
        return {"layer": i, "coords": [list(b) for b in blocks]}

    def _shift(self, x: int, block: int, vec, sign: int) -> int | None:
        g = self.g
        base = block * g.d
        out = x
        for a in range(g.d):
            c = g._coord(x, base + a) + sign * self.ell * vec[a]
            if not -g.B < c <= g.B:
                return None
            out += sign * self.ell * vec[a] * g.strides[base + a]
        return out

    def _in_source_box(self, x: int) -> bool:
        return all(-self._src < self.g._coord(x, m) <= self._src for m in range(self.g.dims))

    def rule_out(self, v: int) -> list[tuple[str, int]]:
        g = self.g
        k = g.k
        out = []
        if v < self.base_n:
            if v >= g.N or not self._in_source_box(v):
                return out
            for u in g.dirs:
                y = self._shift(v, 0, u, 1)
                if y is not None:
                    out.append(("E0", self.steiner_id(1, y)))
            return out
        i = self.steiner_layer(v)
        x = (v - self.base_n) % g.N
        for u in g.dirs:
            y = self._shift(x, i, u, 1)
            if y is None:
                continue
            if i < k - 1:
                out.append((f"E{i}", self.steiner_id(i + 1, y)))
            else:
                out.append((f"E{i}", (g.params.num_layers - 1) * g.N + y))
        return out

    def rule_in(self, v: int) -> list[tuple[str, int]]:
        g = self.g
        k = g.k
        out = []
        if v < self.base_n:
            if g.layer_of(v) != g.params.num_layers - 1:
                return out
            x = v % g.N
            for u in g.dirs:
                y = self._shift(x, k - 1, u, -1)
                if y is not None:
                    out.append((f"E{k - 1}", self.steiner_id(k - 1, y)))
            return out
        i = self.steiner_layer(v)
        x = (v - self.base_n) % g.N
        for u in g.dirs:
            y = self._shift(x, i - 1, u, -1)
            if y is None:
                continue
            if i == 1:
                if self._in_source_box(y):
                    out.append(("E0", y))
            else:
                out.append((f"E{i - 1}", self.steiner_id(i - 1, y)))
        return out

    def edge_sources(self):
        g = self.g
        yield from range(g.N)
        yield from self.steiner_vertices()


def build_attack(params: HesseParams, g: HesseGraph | None = None) -> HesseShortcut:
    if params.k < 2:
        raise ContractViolation("the attack needs k >= 2 (no Steiner layers for k = 1)")
    return HesseShortcut(g if g is not None else HesseGraph(params))


# --------------------------------------------------------------------------
# closed forms


def _clipped_block_moves(params: HesseParams, step: int) -> int:
    """Σ_v Π_c (2B - step·|v_c|): valid (point, direction) moves of one block."""
    side = 2 * params.box
    return sum(prod(side - step * abs(c) for c in v) for v in params.subdirections)


def base_edge_count_formula(params: HesseParams) -> int:
    side = 2 * params.box
    per_transition = side ** (params.d * (params.k - 1)) * _clipped_block_moves(params, 1)
    return params.k * params.ell * per_transition


def shortcut_edge_count_formula(params: HesseParams) -> dict[str, int]:
    side = 2 * params.box
    sources = (2 * params.source_box) ** (params.d * params.k)
    out = {"E0": sources * params.delta}
    inner = side ** (params.d * (params.k - 1)) * _clipped_block_moves(params, params.ell)
    for i in range(1, params.k):
        out[f"E{i}"] = inner
    return out


# --------------------------------------------------------------------------
# verification


@dataclass
class AttackReport:
    checks: list[Check]
    counts: dict
    notes: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.mode != "informational")

    def check(self, name: str) -> Check:
        return next(c for c in self.checks if c.name == name)

    def as_dict(self) -> dict:
        return {
            "checks": [c.as_dict() for c in self.checks],
            "counts": self.counts,
            "notes": self.notes,
        }


def check_distance(g_plus, pairs: Sequence[CriticalPair], k: int, mode: str) -> Check:
    dist = hop_distances_for_pairs(g_plus, [(p.s, p.t) for p in pairs], max_depth=k)
    bad = [{"s": s, "t": t, "dist": d} for (s, t), d in dist.items() if d != k]
    worst = max((d for d in dist.values() if d is not None), default=0)
    return Check("distance", mode, not bad, value=worst, bound=k, witnesses=bad[:5])


def check_tc(g, g_plus, mode: str, seed: int) -> Check:
    res = tc_equivalent(g, g_plus, mode=mode, seed=seed)
    wit = []
    if not res.equal:
        u, v = res.witness
        wit.append({"u": u, "v": v, "reachable_in_shortcut_only": res.witness_extra})
    label = "full" if res.mode == "full" else f"sample:{res.sources_checked}"
    return Check("tc_equal", label, res.equal, value=res.sources_checked, witnesses=wit)


def check_tc_segments(g, g_plus) -> Check:
    res = segment_certificate(g, g_plus)
    wit = [] if res.equal else [{"u": res.witness[0], "v": res.witness[1]}]
    return Check("tc_segments", "full", res.equal, value=res.sources_checked, witnesses=wit)


def check_thickness(g_plus, k: int) -> Check:
    t = thickness(g_plus)
    shown = "unbounded" if t == UNBOUNDED else t
    return Check("thickness", "full", t == k, value=shown, bound=k,
                 witnesses=[] if t == k else [{"thickness": shown}])


def chain_checks(g: HesseGraph, sc: HesseShortcut, criticals: CriticalSet) -> list[Check]:
    """Provenance confinement of every shortcut edge and soundness of every
    source-to-last-layer chain."""
    k = g.k
    last = g.params.num_layers - 1
    bad_conf = []
    for u, w, kind in sc.edges():
        i = int(kind[1:])
        if i == 0:
            ok = u < g.N and criticals.is_source(u) and sc.steiner_layer(w) == 1
        elif i < k - 1:
            ok = sc.steiner_layer(u) == i and sc.steiner_layer(w) == i + 1
        else:
            ok = sc.steiner_layer(u) == k - 1 and w < g.n and g.layer_of(w) == last
        if ok:
            # endpoints differ only in block i, by ℓ·v
            bu = sc.decode_steiner(u)[1] if u >= g.n else g.decode(u)[1]
            bw = sc.decode_steiner(w)[1] if w >= g.n else g.decode(w)[1]
            diffs = [b for b in range(k) if bu[b] != bw[b]]
            step = tuple((y - x) for x, y in zip(bu[i], bw[i]))
            ok = diffs == [i] and any(
                step == tuple(g.params.ell * c for c in v) for v in g.dirs
            )
        if not ok:
            bad_conf.append({"edge": [u, w], "kind": kind})
    checks = [Check("chain_confinement", "full", not bad_conf, value=sc.num_edges(), witnesses=bad_conf[:5])]

    bad_sound = []
    chains = 0
    ell = g.params.ell
    for s in criticals.sources():
        _, sb = g.decode(s)
        stack = [(s, ())]
        while stack:
            v, steps = stack.pop()
            for kind, w in sc.out(v):
                i = int(kind[1:])
                bv = sc.decode_steiner(v)[1] if v >= g.n else sb
                bw = sc.decode_steiner(w)[1] if w >= g.n else g.decode(w)[1]
                step = tuple((y - x) // ell for x, y in zip(bv[i], bw[i]))
                if w >= g.n:
                    stack.append((w, steps + (step,)))
                    continue
                chains += 1
                dirs = steps + (step,)
                expect = criticals.make_pair(s, dirs).t if len(dirs) == k else None
                if expect != w or any(tuple(v_) not in g.dirs for v_ in dirs):
                    bad_sound.append({"s": s, "t": w})
    checks.append(Check("chain_soundness", "full", not bad_sound, value=chains, witnesses=bad_sound[:5]))
    return checks


def verify_attack(
    g: HesseGraph,
    sc: HesseShortcut,
    criticals: CriticalSet,
    mode: str = "full",
    seed: int = 0,
    extended: bool = True,
) -> AttackReport:
    """Distance k on critical pairs, closure equality, thickness k and
    shortcut edge counts. ``mode`` is ``full`` or ``sample:N`` (N pairs and
    N closure sources)."""
    params = g.params
    k = params.k
    g_plus = AugmentedGraph(g, sc)
    if mode == "full":
        pairs = list(criticals.pairs())
        tc_mode = "full"
    else:
        n = int(mode.split(":", 1)[1])
        pairs = criticals.sample(n, seed)
        tc_mode = f"sample:{min(n, 200)}"
    checks = [
        check_distance(g_plus, pairs, k, "full" if mode == "full" else f"sample:{len(pairs)}"),
        check_tc(g, g_plus, tc_mode, seed),
    ]
    if mode == "full":
        checks.append(check_tc_segments(g, g_plus))
    checks.append(check_thickness(g_plus, k))
    enumerated = sc.edge_counts()
    formula = shortcut_edge_count_formula(params)
    checks.append(Check("shortcut_edge_count", "full", enumerated == formula,
                        value=sum(enumerated.values()), bound=sum(formula.values()),
                        witnesses=[] if enumerated == formula else [{"enumerated": enumerated, "formula": formula}]))
    degs = [(len(sc.out(v)), len(sc.into(v))) for v in sc.steiner_vertices()]
    max_deg = max((max(a, b) for a, b in degs), default=0)
    checks.append(Check("steiner_degree", "full", max_deg <= params.delta, value=max_deg, bound=params.delta))
    if extended:
        checks.extend(chain_checks(g, sc, criticals))
    base_edges = base_edge_count_formula(params)
    n_short = sum(enumerated.values())
    counts = {
        "vertices": g.n,
        "edges": base_edges,
        "steiner_vertices": sc.num_steiner,
        "shortcut_edges": n_short,
        "shortcut_edges_by_kind": enumerated,
        "critical_pairs": len(criticals),
    }
    notes = {
        "steiner_vertex_count_stated": k * g.N,
        "shortcut_to_base_edge_ratio": str(Fraction(n_short, base_edges)),
        "shortcut_edges_times_ell_over_base": str(Fraction(n_short * params.ell, base_edges)),
    }
    return AttackReport(checks, counts, notes)


def attack_diagnostics(
    g: HesseGraph, sc: HesseShortcut, criticals: CriticalSet
) -> dict:
    """Designated paths, normalized components with their efficiency, the
    volume bound and the normalization replay (exhaustive over pairs)."""
    params = g.params
    g_plus = AugmentedGraph(g, sc)
    pairs = [(p.s, p.t) for p in criticals.pairs()]
    assignment = assign_critical_shortest_paths(g_plus, pairs)
    comps = normalize(g, g_plus, params.k)
    effs = {c.key: efficiency(c, assignment, g) for c in comps}
    vol = volume_check(g_plus, assignment, params.delta**params.k)
    replay = replay_check(g, comps, assignment, params.k)
    return {
        "assignment": assignment,
        "components": comps,
        "efficiency": effs,
        "volume": vol,
        "replay": replay,
        "g_plus": g_plus,
    }
