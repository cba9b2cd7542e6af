"""The layered lattice families 𝒢₁ and 𝒢_k, their critical pairs, and
brute-force validators for the uniqueness and intersection properties.

A vertex is ``(layer, blocks)`` where ``blocks`` is a tuple of k points of
Z^d, each coordinate in the half-open box (-B, B] with B = (r+1)·r·ℓ.
Layer ``i*k + j`` plays the role of L_{i,j}; an edge out of it moves block j
by one critical subdirection.
"""

from __future__ import annotations

import itertools
import random
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Sequence

from .errors import ContractViolation, ParameterError, ResourceError
from .graph import LayeredGraph, materialize_cap, path_counts_from
from .lattice import LatticeVector, SubdirectionSet, extreme_points

Blocks = tuple[LatticeVector, ...]

DEFAULT_SAMPLE = 1000
EXHAUSTIVE_PAIR_CAP = 200_000


@dataclass(frozen=True)
class HesseParams:
    k: int
    d: int
    r: int
    ell: int

    def __post_init__(self):
        for name in ("k", "d", "r", "ell"):
            val = getattr(self, name)
            if not isinstance(val, int) or val < 1:
                raise ParameterError(f"{name} must be a positive integer, got {val!r}")

    @property
    def box(self) -> int:
        """Half-width B: coordinates live in (-B, B]."""
        return (self.r + 1) * self.r * self.ell

    @property
    def source_box(self) -> int:
        """Source coordinates live in (-r²ℓ, r²ℓ]."""
        return self.r * self.r * self.ell

    @property
    def num_layers(self) -> int:
        return self.k * self.ell + 1

    @property
    def layer_size(self) -> int:
        return (2 * self.box) ** (self.k * self.d)

    @property
    def num_vertices(self) -> int:
        return self.num_layers * self.layer_size

    @property
    def subdirections(self) -> SubdirectionSet:
        return extreme_points(self.r, self.d)

    @property
    def delta(self) -> int:
        return len(self.subdirections)

    def critical_pair_formula(self) -> int:
        """N·Δ^k·r^{dk}/(r+1)^{dk}; the division is always exact."""
        num = self.layer_size * self.delta**self.k * self.r ** (self.d * self.k)
        den = (self.r + 1) ** (self.d * self.k)
        q, rem = divmod(num, den)
        assert rem == 0
        return q

    def as_dict(self) -> dict:
        return {"k": self.k, "d": self.d, "r": self.r, "ell": self.ell}


def _check_budget(count: int) -> None:
    cap = materialize_cap()
    if count > cap:
        raise ResourceError(f"graph has {count} vertices, above the budget of {cap}", count)


class HesseGraph(LayeredGraph):
    """Implicit 𝒢_k (𝒢₁ when k = 1). ``subdirections`` may be overridden to
    build adversarial variants; the default is the extreme-point set."""

    def __init__(self, params: HesseParams, subdirections: Sequence[LatticeVector] | None = None):
        self.params = params
        self.dirs: tuple[LatticeVector, ...] = (
            tuple(params.subdirections) if subdirections is None else tuple(map(tuple, subdirections))
        )
        p = params
        self.k, self.d, self.B = p.k, p.d, p.box
        self.side = 2 * p.box
        self.dims = p.k * p.d
        self.N = p.layer_size
        self.n = p.num_vertices
        self.layer_sizes = [self.N] * p.num_layers
        # stride of flattened coordinate m (block-major, first coordinate most significant)
        self.strides = [self.side ** (self.dims - 1 - m) for m in range(self.dims)]
        self.coding = {
            "family": "g1" if p.k == 1 else "hesse",
            "k": p.k, "d": p.d, "r": p.r, "ell": p.ell, "box": p.box,
        }

    # -- coding ------------------------------------------------------------

    def encode(self, layer: int, blocks: Sequence[Sequence[int]]) -> int:
        if not 0 <= layer < self.params.num_layers:
            raise ContractViolation(f"layer {layer} out of range")
        if len(blocks) != self.k or any(len(b) != self.d for b in blocks):
            raise ContractViolation("blocks shape does not match (k, d)")
        x = 0
        for b in blocks:
            for c in b:
                if not -self.B < c <= self.B:
                    raise ContractViolation(f"coordinate {c} outside (-{self.B}, {self.B}]")
                x = x * self.side + (c + self.B - 1)
        return layer * self.N + x

    def decode(self, v: int) -> tuple[int, Blocks]:
        self.check_vertex(v)
        layer, x = divmod(v, self.N)
        flat = []
        for _ in range(self.dims):
            x, c = divmod(x, self.side)
            flat.append(c - self.B + 1)
        flat.reverse()
        d = self.d
        return layer, tuple(tuple(flat[b * d:(b + 1) * d]) for b in range(self.k))

    def layer_of(self, v: int) -> int:
        return v // self.N

    def split_layer(self, layer: int) -> tuple[int, int]:
        """Layer index -> (i, j) with layer = i*k + j."""
        return divmod(layer, self.k)

    def _coord(self, v: int, m: int) -> int:
        return (v // self.strides[m]) % self.side - self.B + 1

    # -- adjacency ---------------------------------------------------------

    def out_edges(self, v: int) -> list[tuple[int, int]]:
        layer = v // self.N
        if layer >= self.params.num_layers - 1:
            return []
        j = layer % self.k
        base = j * self.d
        coords = [self._coord(v, base + a) for a in range(self.d)]
        out = []
        for slot, u in enumerate(self.dirs):
            delta = self.N
            ok = True
            for a in range(self.d):
                c = coords[a] + u[a]
                if not -self.B < c <= self.B:
                    ok = False
                    break
                delta += u[a] * self.strides[base + a]
            if ok:
                out.append((slot, v + delta))
        return out

    def out_neighbors(self, v: int) -> list[int]:
        return [w for _, w in self.out_edges(v)]

    def in_edges(self, v: int) -> list[tuple[int, int]]:
        layer = v // self.N
        if layer == 0:
            return []
        j = (layer - 1) % self.k
        base = j * self.d
        coords = [self._coord(v, base + a) for a in range(self.d)]
        out = []
        for slot, u in enumerate(self.dirs):
            delta = -self.N
            ok = True
            for a in range(self.d):
                c = coords[a] - u[a]
                if not -self.B < c <= self.B:
                    ok = False
                    break
                delta -= u[a] * self.strides[base + a]
            if ok:
                out.append((slot, v + delta))
        return out


# --------------------------------------------------------------------------
# critical pairs


@dataclass(frozen=True)
class CriticalPair:
    s: int
    t: int
    directions: tuple[LatticeVector, ...]


@dataclass
class CriticalSet:
    """Critical pairs, iterated lexicographically in (source, direction tuple)."""

    graph: HesseGraph
    dirs: tuple[LatticeVector, ...] = field(init=False)

    def __post_init__(self):
        self.dirs = tuple(self.graph.dirs)

    @cached_property
    def source_axis(self) -> list[int]:
        b = self.graph.params.source_box
        return list(range(-b + 1, b + 1))

    @property
    def num_sources(self) -> int:
        return len(self.source_axis) ** self.graph.dims

    @property
    def num_direction_tuples(self) -> int:
        return len(self.dirs) ** self.graph.k

    def __len__(self) -> int:
        return self.num_sources * self.num_direction_tuples

    def formula_count(self) -> int:
        return self.graph.params.critical_pair_formula()

    def _blocks(self, flat: Sequence[int]) -> Blocks:
        d = self.graph.d
        return tuple(tuple(flat[b * d:(b + 1) * d]) for b in range(self.graph.k))

    def source_points(self) -> Iterator[Blocks]:
        for flat in itertools.product(self.source_axis, repeat=self.graph.dims):
            yield self._blocks(flat)

    def sources(self) -> Iterator[int]:
        for blocks in self.source_points():
            yield self.graph.encode(0, blocks)

    def direction_tuples(self) -> Iterator[tuple[LatticeVector, ...]]:
        return itertools.product(self.dirs, repeat=self.graph.k)

    def make_pair(self, s: int, directions: Sequence[LatticeVector]) -> CriticalPair:
        g = self.graph
        layer, blocks = g.decode(s)
        ell = g.params.ell
        t_blocks = tuple(
            tuple(c + ell * u for c, u in zip(b, v)) for b, v in zip(blocks, directions)
        )
        return CriticalPair(s, g.encode(g.params.num_layers - 1, t_blocks), tuple(directions))

    def pairs(self) -> Iterator[CriticalPair]:
        for s in self.sources():
            for dirs in self.direction_tuples():
                yield self.make_pair(s, dirs)

    def pairs_from(self, s: int) -> list[CriticalPair]:
        return [self.make_pair(s, dirs) for dirs in self.direction_tuples()]

    def pair_at(self, index: int) -> CriticalPair:
        if not 0 <= index < len(self):
            raise IndexError(index)
        si, di = divmod(index, self.num_direction_tuples)
        side = len(self.source_axis)
        flat = []
        for _ in range(self.graph.dims):
            si, c = divmod(si, side)
            flat.append(self.source_axis[c])
        flat.reverse()
        s = self.graph.encode(0, self._blocks(flat))
        dirs = []
        for _ in range(self.graph.k):
            di, c = divmod(di, len(self.dirs))
            dirs.append(self.dirs[c])
        dirs.reverse()
        return self.make_pair(s, dirs)

    def sample(self, n: int, seed: int = 0) -> list[CriticalPair]:
        """``n`` distinct pairs chosen uniformly, returned in iteration order."""
        total = len(self)
        idx = sorted(random.Random(seed).sample(range(total), min(n, total)))
        return [self.pair_at(i) for i in idx]

    def is_source(self, v: int) -> bool:
        g = self.graph
        if g.layer_of(v) != 0:
            return False
        b = g.params.source_box
        return all(-b < c <= b for blk in g.decode(v)[1] for c in blk)

    def contains(self, pair: CriticalPair) -> bool:
        if not self.is_source(pair.s) or len(pair.directions) != self.graph.k:
            return False
        if any(tuple(v) not in self.dirs for v in pair.directions):
            return False
        return self.make_pair(pair.s, pair.directions).t == pair.t


def _build(params: HesseParams) -> tuple[HesseGraph, CriticalSet]:
    _check_budget(params.num_vertices)
    g = HesseGraph(params)
    return g, CriticalSet(g)


def build_g1(params: HesseParams) -> tuple[HesseGraph, CriticalSet]:
    if params.k != 1:
        raise ParameterError("build_g1 requires k = 1")
    return _build(params)


def build_gk(params: HesseParams) -> tuple[HesseGraph, CriticalSet]:
    if params.k < 2:
        raise ParameterError("build_gk requires k >= 2; use build_g1 for k = 1")
    return _build(params)


def build_family(params: HesseParams) -> tuple[HesseGraph, CriticalSet]:
    return build_g1(params) if params.k == 1 else build_gk(params)


def critical_path(criticals: CriticalSet, pair: CriticalPair) -> list[int]:
    """Vertices of the critical path: at layer (i, j) blocks before j have
    taken i+1 steps and the rest i steps."""
    if not criticals.contains(pair):
        raise ContractViolation("pair is not a critical pair of this graph")
    g = criticals.graph
    _, start = g.decode(pair.s)
    path = []
    for layer in range(g.params.num_layers):
        i, j = g.split_layer(layer)
        blocks = tuple(
            tuple(c + (i + 1 if b < j else i) * u for c, u in zip(start[b], pair.directions[b]))
            for b in range(g.k)
        )
        path.append(g.encode(layer, blocks))
    return path


# --------------------------------------------------------------------------
# validation


@dataclass
class Check:
    name: str
    mode: str
    passed: bool
    value: object = None
    bound: object = None
    witnesses: list = field(default_factory=list)

    def as_dict(self) -> dict:
        out = {"name": self.name, "mode": self.mode, "pass": self.passed}
        if self.value is not None:
            out["value"] = self.value
        if self.bound is not None:
            out["bound"] = self.bound
        if not self.passed:
            out["witnesses"] = self.witnesses
        return out


@dataclass
class ValidationReport:
    checks: list[Check]
    counts: dict

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> Check:
        return next(c for c in self.checks if c.name == name)

    def as_dict(self) -> dict:
        return {"checks": [c.as_dict() for c in self.checks], "counts": self.counts}


def _select_pairs(criticals: CriticalSet, mode: str, seed: int) -> tuple[str, list[CriticalPair]]:
    if mode == "exhaustive":
        if len(criticals) > EXHAUSTIVE_PAIR_CAP:
            warnings.warn(
                f"{len(criticals)} critical pairs exceed the exhaustive cap; sampling {DEFAULT_SAMPLE}",
                stacklevel=3,
            )
            return f"sample:{DEFAULT_SAMPLE}", criticals.sample(DEFAULT_SAMPLE, seed)
        return "exhaustive", list(criticals.pairs())
    if mode.startswith("sample"):
        n = int(mode.split(":", 1)[1]) if ":" in mode else DEFAULT_SAMPLE
        return f"sample:{n}", criticals.sample(n, seed)
    raise ContractViolation(f"unknown validation mode {mode!r}")


def check_uniqueness(g: LayeredGraph, pairs: Sequence[CriticalPair], mode: str) -> Check:
    """count_paths(s, t) == 1 for every pair, grouped by source."""
    by_source: dict[int, list[CriticalPair]] = {}
    for pr in pairs:
        by_source.setdefault(pr.s, []).append(pr)
    bad = []
    for s, group in by_source.items():
        counts = path_counts_from(g, s)
        for pr in group:
            c = counts.get(pr.t, 0)
            if c != 1:
                bad.append({"s": pr.s, "t": pr.t, "paths": c})
    return Check("uniqueness", mode, not bad, value=len(pairs), witnesses=bad[:5])


def check_edge_disjoint(paths: Sequence[Sequence[int]], mode: str) -> Check:
    owner: dict[tuple[int, int], int] = {}
    bad = []
    for pi, path in enumerate(paths):
        for e in zip(path, path[1:]):
            prev = owner.setdefault(e, pi)
            if prev != pi:
                bad.append({"edge": list(e), "paths": [prev, pi]})
    return Check("edge_disjoint", mode, not bad, value=len(paths), witnesses=bad[:5])


def check_limited_intersection(
    g: LayeredGraph, paths: Sequence[Sequence[int]], k: int, mode: str
) -> Check:
    """Two distinct critical paths meeting in layers i < i' satisfy i' < i + k."""
    through: dict[int, list[int]] = {}
    for pi, path in enumerate(paths):
        for v in path:
            through.setdefault(v, []).append(pi)
    span: dict[tuple[int, int], list[int]] = {}
    for v, ids in through.items():
        if len(ids) < 2:
            continue
        layer = g.layer_of(v)
        for a, b in itertools.combinations(ids, 2):
            lo_hi = span.get((a, b))
            if lo_hi is None:
                span[(a, b)] = [layer, layer]
            else:
                lo_hi[0] = min(lo_hi[0], layer)
                lo_hi[1] = max(lo_hi[1], layer)
    bad = [
        {"paths": [a, b], "layers": [lo, hi]}
        for (a, b), (lo, hi) in span.items()
        if hi >= lo + k
    ]
    worst = max((hi - lo for lo, hi in span.values()), default=0)
    return Check("limited_intersection", mode, not bad, value=worst, bound=k - 1, witnesses=bad[:5])


def validate_family(
    g: HesseGraph,
    criticals: CriticalSet,
    mode: str = "exhaustive",
    seed: int = 0,
) -> ValidationReport:
    """Uniqueness, edge-disjointness (k = 1 only) and limited intersection."""
    mode_used, pairs = _select_pairs(criticals, mode, seed)
    checks = [check_uniqueness(g, pairs, mode_used)]
    paths = [critical_path(criticals, pr) for pr in pairs]
    if g.k == 1:
        checks.append(check_edge_disjoint(paths, mode_used))
    checks.append(check_limited_intersection(g, paths, g.k, mode_used))
    counts = {
        "vertices": g.n,
        "critical_pairs": len(criticals),
        "critical_pairs_formula": criticals.formula_count(),
    }
    return ValidationReport(checks, counts)
