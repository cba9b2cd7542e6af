"""Random edge deletion with a keyed counter-based PRF, plus the survival
census and support-size statistics measured on noised families.

An edge is identified by ``(source id, slot)``. Its fate is a pure function
of ``(seed, source, slot, p)``, so iteration order and worker count cannot
change the surviving edge set.
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import ContractViolation, ParameterError
from .graph import LayeredGraph
from .hesse import CriticalSet, critical_path

_TWO64 = 1 << 64


@dataclass(frozen=True)
class NoiseSpec:
    """Deletion probability ``p`` (exact rational) and a 64-bit seed."""

    p: Fraction
    seed: int = 0

    def __post_init__(self):
        p = Fraction(self.p)
        if not 0 <= p <= 1:
            raise ParameterError(f"deletion probability must lie in [0, 1], got {p}")
        if not 0 <= self.seed < _TWO64:
            raise ParameterError("seed must be a 64-bit unsigned integer")
        object.__setattr__(self, "p", p)

    @classmethod
    def default_for(cls, k: int, ell: int, seed: int = 0) -> "NoiseSpec":
        return cls(Fraction(1, k * ell), seed)


def edge_hash(seed: int, source: int, slot: int) -> int:
    """Uniform 64-bit value keyed by the seed."""
    h = hashlib.blake2b(digest_size=8, key=seed.to_bytes(8, "little"))
    h.update(source.to_bytes(8, "little") + slot.to_bytes(4, "little"))
    return int.from_bytes(h.digest(), "little")


def keeps(spec: NoiseSpec, source: int, slot: int) -> bool:
    """Keep iff u >= p where u = hash / 2^64 (exact comparison)."""
    p = spec.p
    if p == 0:
        return True
    if p == 1:
        return False
    return edge_hash(spec.seed, source, slot) * p.denominator >= p.numerator * _TWO64


class NoisedGraph(LayeredGraph):
    """Subgraph of ``base`` keeping the edges selected by ``spec``."""

    def __init__(self, base: LayeredGraph, spec: NoiseSpec):
        self.base = base
        self.spec = spec
        self.n = base.n
        self.layer_sizes = base.layer_sizes
        self.coding = dict(base.coding, noise={"p": str(spec.p), "seed": spec.seed})

    def out_edges(self, v):
        return [(slot, w) for slot, w in self.base.out_edges(v) if keeps(self.spec, v, slot)]

    def out_neighbors(self, v):
        return [w for _, w in self.out_edges(v)]

    def in_edges(self, v):
        return [(slot, u) for slot, u in self.base.in_edges(v) if keeps(self.spec, u, slot)]

    def has_edge(self, u: int, w: int) -> bool:
        return w in self.out_neighbors(u)

    def layer_of(self, v):
        return self.base.layer_of(v)

    def is_steiner(self, v):
        return self.base.is_steiner(v)


def apply_noise(g: LayeredGraph, spec: NoiseSpec) -> NoisedGraph:
    return NoisedGraph(g, spec)


def _survivors_in(g: NoisedGraph, lo: int, hi: int) -> list[tuple[int, int, int]]:
    return [(v, slot, w) for v in range(lo, hi) for slot, w in g.out_edges(v)]


def surviving_edges(g: NoisedGraph, workers: int = 1, chunk: int = 4096) -> list[tuple[int, int, int]]:
    """All surviving ``(source, slot, target)`` triples in id order."""
    bounds = [(lo, min(lo + chunk, g.n)) for lo in range(0, g.n, chunk)]
    if workers <= 1:
        parts = [_survivors_in(g, lo, hi) for lo, hi in bounds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: _survivors_in(g, *b), bounds))
    return [e for part in parts for e in part]


@dataclass
class Census:
    surviving: int
    total: int

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.surviving, self.total) if self.total else Fraction(0)

    def as_dict(self) -> dict:
        return {"surviving": self.surviving, "total": self.total, "fraction": str(self.fraction)}


def survival_census(noised: NoisedGraph, criticals: CriticalSet, pairs: Iterable | None = None) -> Census:
    """Critical pairs whose whole critical path survived the deletion."""
    pairs = criticals.pairs() if pairs is None else pairs
    alive = total = 0
    for pr in pairs:
        total += 1
        path = critical_path(criticals, pr)
        if all(noised.has_edge(a, b) for a, b in zip(path, path[1:])):
            alive += 1
    return Census(alive, total)


def expected_survival(spec: NoiseSpec, path_edges: int) -> Fraction:
    return (1 - spec.p) ** path_edges


# --------------------------------------------------------------------------
# support statistics


@dataclass
class SupportStats:
    path_count: int
    support_edges: int
    layer_gap: int


def support_statistics(
    g: LayeredGraph,
    criticals: CriticalSet,
    A: Iterable[int],
    B: Iterable[int],
    pairs: Iterable | None = None,
) -> SupportStats:
    """Critical paths meeting A and B, and the distinct edges they use between
    the two layers."""
    A, B = set(A), set(B)
    if not A or not B:
        raise ContractViolation("A and B must be nonempty")
    la = {g.layer_of(v) for v in A}
    lb = {g.layer_of(v) for v in B}
    if len(la) != 1 or len(lb) != 1:
        raise ContractViolation("A and B must each lie within a single layer")
    i, j = la.pop(), lb.pop()
    if not i < j:
        raise ContractViolation("need the layer of A strictly below the layer of B")
    count = 0
    used: set[tuple[int, int]] = set()
    for pr in criticals.pairs() if pairs is None else pairs:
        path = critical_path(criticals, pr)
        if path[i] in A and path[j] in B:
            count += 1
            used.update(zip(path[i:j], path[i + 1:j + 1]))
    return SupportStats(count, len(used), j - i)


def support_threshold(path_count: int, r: int, k: int) -> int:
    """Largest s with path_count >= s^{3/2} / (2 sqrt(rk)), i.e. s^3 <= 4rk·count^2."""
    cap = 4 * r * k * path_count * path_count
    lo, hi = 0, 1
    while hi**3 <= cap:
        hi *= 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if mid**3 <= cap:
            lo = mid
        else:
            hi = mid
    return lo


@dataclass
class SupportBoundResult:
    threshold: int
    support_edges: int
    holds: bool
    precondition: bool


def support_bound_check(stats: SupportStats, r: int, k: int) -> SupportBoundResult:
    """support_edges >= s for every s with count >= s^{3/2}/(2 sqrt(rk)); the
    layer-gap precondition (gap >= 4rk) is recorded, not enforced."""
    s = support_threshold(stats.path_count, r, k)
    return SupportBoundResult(s, stats.support_edges, stats.support_edges >= s, stats.layer_gap >= 4 * r * k)


def census_trials(
    g: LayeredGraph,
    criticals: CriticalSet,
    p: Fraction,
    seeds: Sequence[int],
) -> list[dict]:
    rows = []
    for seed in seeds:
        c = survival_census(apply_noise(g, NoiseSpec(p, seed)), criticals)
        rows.append({"seed": seed, "p": str(Fraction(p)), **c.as_dict()})
    return rows
