"""Measurements on Steiner shortcut graphs: thickness, closure equivalence,
hop diameter over critical pairs, normalized components, designated
shortest paths, efficiency, pruning and the per-vertex volume bound.

All ratios are ``Fraction``; pass/fail logic never touches floats.
"""

from __future__ import annotations

import heapq
import math
import random
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import ContractViolation
from .graph import (
    LayeredGraph,
    TcComparison,
    UNREACHABLE,
    bfs_distances,
    compare_closures,
    tc_cap,
)
from .shortcut import AugmentedGraph

UNBOUNDED = math.inf


# --------------------------------------------------------------------------
# thickness and reachability


def thickness(g_plus: LayeredGraph) -> int | float:
    """1 + the most vertices on a path inside the Steiner-induced subgraph;
    ``UNBOUNDED`` when that subgraph has a cycle."""
    steiner = [v for v in g_plus.steiner_vertices()]
    if not steiner:
        return 1
    sset = set(steiner)
    succ = {v: [w for w in g_plus.out_neighbors(v) if w in sset] for v in steiner}
    indeg = dict.fromkeys(steiner, 0)
    for v in steiner:
        for w in succ[v]:
            indeg[w] += 1
    longest = dict.fromkeys(steiner, 1)
    queue = [v for v in steiner if indeg[v] == 0]
    seen = 0
    while queue:
        v = queue.pop()
        seen += 1
        for w in succ[v]:
            if longest[v] + 1 > longest[w]:
                longest[w] = longest[v] + 1
            indeg[w] -= 1
            if indeg[w] == 0:
                queue.append(w)
    if seen < len(steiner):
        return UNBOUNDED
    return 1 + max(longest.values())


def _mode_parts(mode: str) -> tuple[str, int]:
    if mode == "full":
        return "full", 0
    if mode.startswith("sample"):
        return "sample", int(mode.split(":", 1)[1]) if ":" in mode else 200
    raise ContractViolation(f"unknown mode {mode!r}")


def tc_equivalent(
    g: LayeredGraph,
    g_plus: LayeredGraph,
    mode: str = "full",
    seed: int = 0,
) -> TcComparison:
    """Reachability on the original vertices of ``g`` coincides in ``g_plus``.

    ``mode`` is ``full`` or ``sample:N``; ``full`` falls back to 200 sampled
    sources when the union is larger than the closure cap.
    """
    base_n = g.n
    if g_plus.n < base_n:
        raise ContractViolation("g_plus must contain every vertex of g")
    kind, samples = _mode_parts(mode)
    if kind == "full" and g_plus.n > tc_cap():
        kind, samples = "sample", 200
    return compare_closures(
        g, g_plus, lambda v: v < base_n, mode=kind, samples=samples, seed=seed
    )


def hop_distances_for_pairs(
    g: LayeredGraph, pairs: Iterable[tuple[int, int]], max_depth: int | None = None
) -> dict[tuple[int, int], int | None]:
    """BFS once per distinct source."""
    by_source: dict[int, list[int]] = defaultdict(list)
    for s, t in pairs:
        by_source[s].append(t)
    out = {}
    for s, ts in by_source.items():
        dist = bfs_distances(g, s, targets=ts, max_depth=max_depth)
        for t in ts:
            out[(s, t)] = dist.get(t, UNREACHABLE)
    return out


def critical_diameter(g_plus: LayeredGraph, pairs: Iterable[tuple[int, int]]) -> int:
    """Max hop distance over the given critical pairs."""
    worst = 0
    for (s, t), dist in hop_distances_for_pairs(g_plus, pairs).items():
        if dist is UNREACHABLE:
            raise ContractViolation(f"critical pair ({s}, {t}) is unreachable")
        worst = max(worst, dist)
    return worst


# --------------------------------------------------------------------------
# designated shortest paths


@dataclass
class CriticalAssignment:
    """One designated shortest path per critical pair."""

    paths: dict[tuple[int, int], tuple[int, ...]]

    def __len__(self) -> int:
        return len(self.paths)

    def items(self):
        return self.paths.items()


def _least_shortest_path(g: LayeredGraph, levels: list[list[int]], dist: dict[int, int], t: int) -> tuple[int, ...]:
    D = dist[t]
    good = {t}
    # vertices at distance m that still reach t in D - m steps
    good_by_level: list[set[int]] = [set() for _ in range(D + 1)]
    good_by_level[D] = good
    for m in range(D - 1, -1, -1):
        nxt = good_by_level[m + 1]
        good_by_level[m] = {
            v for v in levels[m] if any(w in nxt for w in g.out_neighbors(v))
        }
    path = [levels[0][0]]
    for m in range(1, D + 1):
        cur = path[-1]
        path.append(min(w for w in g.out_neighbors(cur) if w in good_by_level[m] and dist.get(w) == m))
    return tuple(path)


def assign_critical_shortest_paths(
    g_plus: LayeredGraph, pairs: Iterable[tuple[int, int]]
) -> CriticalAssignment:
    """Lexicographically least shortest path for every pair."""
    by_source: dict[int, list[int]] = defaultdict(list)
    for s, t in pairs:
        by_source[s].append(t)
    out = {}
    for s, ts in by_source.items():
        dist = bfs_distances(g_plus, s, targets=ts)
        missing = [t for t in ts if t not in dist]
        if missing:
            raise ContractViolation(f"critical pair ({s}, {missing[0]}) is unreachable")
        depth = max(dist[t] for t in ts)
        levels: list[list[int]] = [[] for _ in range(depth + 1)]
        for v, dv in dist.items():
            if dv <= depth:
                levels[dv].append(v)
        for t in ts:
            out[(s, t)] = _least_shortest_path(g_plus, levels, dist, t)
    return CriticalAssignment(out)


# --------------------------------------------------------------------------
# normalization


@dataclass
class NormalizedComponent:
    """Shortcut edges between original layers ``source_layer`` and
    ``target_layer`` routed through a private copy of the Steiner vertices."""

    source_layer: int
    target_layer: int
    edges: set[tuple[int, int]]
    steiner: frozenset[int]

    def __post_init__(self):
        self._rebuild()

    def _rebuild(self):
        self.succ: dict[int, list[int]] = defaultdict(list)
        for u, w in self.edges:
            self.succ[u].append(w)

    @property
    def key(self) -> tuple[int, int]:
        return self.source_layer, self.target_layer

    def __len__(self) -> int:
        return len(self.edges)

    def copy(self) -> "NormalizedComponent":
        return NormalizedComponent(self.source_layer, self.target_layer, set(self.edges), self.steiner)

    def degree(self, u: int) -> int:
        return sum(1 for a, b in self.edges if a == u or b == u)


def _segments(path: Sequence[int], is_steiner) -> list[tuple[int, int]]:
    """(start, end) index ranges of maximal subpaths whose interior is Steiner
    and whose endpoints are original, restricted to those touching a Steiner
    vertex."""
    segs = []
    start = None
    for idx, v in enumerate(path):
        if is_steiner(v):
            continue
        if start is not None and idx - start > 1:
            segs.append((start, idx))
        start = idx
    return segs


def normalize(
    g: LayeredGraph, g_plus: AugmentedGraph, k: int
) -> list[NormalizedComponent]:
    """One component per layer pair (i, j), j >= i + k, that carries at least
    one L_i -> Steiner* -> L_j traversal; components are sorted by (i, j)."""
    sc = g_plus.shortcut
    layer = g.layer_of
    from_layer: dict[int, set[tuple[int, int]]] = defaultdict(set)
    to_layer: dict[int, set[tuple[int, int]]] = defaultdict(set)
    steiner_edges: set[tuple[int, int]] = set()
    direct: dict[tuple[int, int], set[tuple[int, int]]] = defaultdict(set)
    base_n = g.n
    for u, w, _ in sc.edges():
        us, ws = u >= base_n, w >= base_n
        if us and ws:
            steiner_edges.add((u, w))
        elif ws:
            from_layer[layer(u)].add((u, w))
        elif us:
            to_layer[layer(w)].add((u, w))
        else:
            direct[(layer(u), layer(w))].add((u, w))
    steiner_succ: dict[int, list[int]] = defaultdict(list)
    for u, w in steiner_edges:
        steiner_succ[u].append(w)
    # Steiner vertices reachable (via Steiner edges) from each source layer
    comps = []
    src_layers = sorted(set(from_layer) | {i for i, _ in direct})
    for i in src_layers:
        reach: set[int] = set()
        stack = [w for _, w in from_layer.get(i, ())]
        while stack:
            x = stack.pop()
            if x in reach:
                continue
            reach.add(x)
            stack.extend(steiner_succ.get(x, ()))
        hit_layers = {layer(w) for (u, w) in _iter_edges(to_layer) if u in reach}
        hit_layers |= {j for (a, j) in direct if a == i}
        for j in sorted(hit_layers):
            if j < i + k:
                continue
            edges = set(from_layer.get(i, ())) | steiner_edges | set(to_layer.get(j, ())) | direct.get((i, j), set())
            steiner = frozenset(x for e in edges for x in e if x >= base_n)
            comps.append(NormalizedComponent(i, j, edges, steiner))
    return comps


def _iter_edges(by_layer: dict[int, set[tuple[int, int]]]):
    for es in by_layer.values():
        yield from es


def _respecting_subpath(comp: NormalizedComponent, path: Sequence[int], layer_of, base_n: int) -> tuple[int, int] | None:
    """Index range of a subpath L_i -> ... -> L_j lying inside the component."""
    for a, v in enumerate(path):
        if v >= base_n or layer_of(v) != comp.source_layer:
            continue
        b = a
        while b + 1 < len(path) and (path[b], path[b + 1]) in comp.edges:
            b += 1
            w = path[b]
            if w < base_n:
                if layer_of(w) == comp.target_layer:
                    return a, b
                break
    return None


@dataclass
class ComponentUsage:
    """Which designated paths respect a component and the Steiner vertices
    each one passes through."""

    component: NormalizedComponent
    paths: dict[tuple[int, int], tuple[int, ...]] = field(default_factory=dict)

    @property
    def count(self) -> int:
        return len(self.paths)


def component_usage(
    comp: NormalizedComponent, assignment: CriticalAssignment, g: LayeredGraph
) -> ComponentUsage:
    usage = ComponentUsage(comp)
    for pair, path in assignment.items():
        span = _respecting_subpath(comp, path, g.layer_of, g.n)
        if span is not None:
            a, b = span
            usage.paths[pair] = tuple(path[a + 1:b])
    return usage


def efficiency(comp: NormalizedComponent, assignment: CriticalAssignment, g: LayeredGraph) -> Fraction:
    if not comp.edges:
        raise ContractViolation("efficiency of an empty component is undefined")
    return Fraction(component_usage(comp, assignment, g).count, len(comp.edges))


def vertex_efficiency(
    comp: NormalizedComponent, assignment: CriticalAssignment, g: LayeredGraph, u: int
) -> Fraction:
    if u not in comp.steiner:
        raise ContractViolation(f"vertex {u} is not a Steiner vertex of this component")
    deg = comp.degree(u)
    if deg == 0:
        return Fraction(0)
    usage = component_usage(comp, assignment, g)
    through = sum(1 for interior in usage.paths.values() if u in interior)
    return Fraction(through, deg)


# --------------------------------------------------------------------------
# pruning


@dataclass
class PruneStep:
    vertex: int
    vertex_efficiency: Fraction
    before: Fraction
    after: Fraction


@dataclass
class PruneResult:
    component: NormalizedComponent
    steps: list[PruneStep]
    initial: Fraction
    final: Fraction

    @property
    def monotone(self) -> bool:
        return all(s.after >= s.before for s in self.steps) and self.final >= self.initial


def prune_inefficient(
    comp: NormalizedComponent,
    assignment: CriticalAssignment,
    g: LayeredGraph,
    threshold: Fraction | int,
    rng: random.Random | None = None,
) -> PruneResult:
    """Repeatedly delete a Steiner vertex whose efficiency is at most
    min(threshold, component efficiency), with its edges and the paths
    through it. Without ``rng`` the order is ascending efficiency then id;
    with ``rng`` each pass visits the vertices in a random order.

    A deletion that would leave the component without edges is skipped.
    """
    threshold = Fraction(threshold)
    if threshold < 0:
        raise ContractViolation("threshold must be non-negative")
    work = comp.copy()
    usage = component_usage(work, assignment, g)
    alive_paths = {pair: set(interior) for pair, interior in usage.paths.items()}
    paths_of: dict[int, set[tuple[int, int]]] = defaultdict(set)
    for pair, interior in alive_paths.items():
        for x in interior:
            paths_of[x].add(pair)
    incident: dict[int, set[tuple[int, int]]] = defaultdict(set)
    for e in work.edges:
        for x in e:
            if x in work.steiner:
                incident[x].add(e)
    n_paths = len(alive_paths)
    n_edges = len(work.edges)
    initial = Fraction(n_paths, n_edges)
    steps: list[PruneStep] = []

    def eff(u):
        deg = len(incident[u])
        return Fraction(len(paths_of[u]), deg) if deg else None

    def delete(u):
        nonlocal n_paths, n_edges
        before = Fraction(n_paths, n_edges)
        ve = eff(u)
        for e in list(incident[u]):
            work.edges.discard(e)
            n_edges -= 1
            for x in e:
                if x != u and x in incident:
                    incident[x].discard(e)
        incident[u].clear()
        for pair in list(paths_of[u]):
            for x in alive_paths.pop(pair):
                paths_of[x].discard(pair)
            n_paths -= 1
        after = Fraction(n_paths, n_edges)
        steps.append(PruneStep(u, ve, before, after))
        return after

    def eligible(u):
        deg = len(incident[u])
        if deg == 0 or deg >= n_edges:
            return False
        bound = min(threshold, Fraction(n_paths, n_edges))
        return eff(u) <= bound

    if rng is None:
        heap = [(eff(u), u) for u in sorted(incident) if incident[u]]
        heapq.heapify(heap)
        while heap:
            e_u, u = heapq.heappop(heap)
            if not incident[u] or eff(u) != e_u:
                continue
            if not eligible(u):
                if e_u > min(threshold, Fraction(n_paths, n_edges)):
                    break
                continue
            touched = {x for e in incident[u] for x in e if x != u and x in work.steiner}
            touched |= {x for pair in paths_of[u] for x in alive_paths[pair]}
            delete(u)
            for x in touched:
                if x != u and incident[x]:
                    heapq.heappush(heap, (eff(x), x))
    else:
        order = sorted(u for u in incident if incident[u])
        changed = True
        while changed:
            changed = False
            rng.shuffle(order)
            for u in order:
                if incident[u] and eligible(u):
                    delete(u)
                    changed = True
            order = [u for u in order if incident[u]]
    work._rebuild()
    return PruneResult(work, steps, initial, Fraction(n_paths, n_edges))


# --------------------------------------------------------------------------
# bounds


@dataclass
class VolumeResult:
    max_paths: int
    bound: int
    passed: bool
    argmax: int | None


def volume_check(g_plus: LayeredGraph, assignment: CriticalAssignment, bound: int) -> VolumeResult:
    """Max number of designated paths through one Steiner vertex vs ``bound``."""
    through: dict[int, int] = defaultdict(int)
    for path in assignment.paths.values():
        for v in set(path):
            if g_plus.is_steiner(v):
                through[v] += 1
    if not through:
        return VolumeResult(0, bound, True, None)
    best = max(sorted(through), key=lambda v: through[v])
    return VolumeResult(through[best], bound, through[best] <= bound, best)


def power_le(x: Fraction, base: int, exponent: Fraction) -> bool:
    """Exact test of x <= base**exponent for rational exponent."""
    exponent = Fraction(exponent)
    p, q = exponent.numerator, exponent.denominator
    # x^q <= base^p, with both sides rational
    lhs = Fraction(x) ** q
    rhs = Fraction(base) ** p
    return lhs <= rhs


@dataclass
class EfficiencyCapResult:
    precondition: bool
    thickness: int | float
    max_efficiency: Fraction
    exponent: Fraction
    within_cap: bool


def efficiency_cap_check(
    efficiencies: Sequence[Fraction],
    thick: int | float,
    k: int,
    delta: int,
    eps: Fraction,
) -> EfficiencyCapResult:
    """Measured form of the efficiency cap: max efficiency <= Δ^(k-1-eps).
    The cap is only claimed when thickness <= (1-eps)k; that flag is returned
    alongside the measurement."""
    eps = Fraction(eps)
    pre = thick != UNBOUNDED and Fraction(thick) <= (1 - eps) * k
    worst = max(efficiencies, default=Fraction(0))
    exp = k - 1 - eps
    return EfficiencyCapResult(pre, thick, worst, exp, power_le(worst, delta, exp))


@dataclass
class ReplayResult:
    passed: bool
    worst_replayed: int
    bound: int
    shortcut_pairs: int
    respecting_total: int
    failures: list = field(default_factory=list)


def replay_check(
    g: LayeredGraph,
    components: Sequence[NormalizedComponent],
    assignment: CriticalAssignment,
    k: int,
) -> ReplayResult:
    """Every Steiner segment of a designated path spanning at least k layers
    must lie in the component for its endpoint layers; the other segments
    are replaced by original paths of (j - i) edges. Replayed paths must stay
    shorter than h·k, h being the longest designated path."""
    by_key = {c.key: c for c in components}
    h = max((len(p) - 1 for p in assignment.paths.values()), default=0)
    failures = []
    worst = 0
    shortcut_pairs = 0
    base_n = g.n
    is_steiner = lambda v: v >= base_n  # noqa: E731
    for pair, path in assignment.items():
        length = len(path) - 1
        replayed = 0
        last = 0
        used = False
        for a, b in _segments(path, is_steiner):
            replayed += a - last
            i, j = g.layer_of(path[a]), g.layer_of(path[b])
            if j - i >= k:
                used = True
                comp = by_key.get((i, j))
                edges = list(zip(path[a:b], path[a + 1:b + 1]))
                if comp is None or any(e not in comp.edges for e in edges):
                    failures.append({"pair": list(pair), "segment": [path[a], path[b]]})
                replayed += b - a
            else:
                replayed += max(j - i, 0)
            last = b
        replayed += length - last
        worst = max(worst, replayed)
        shortcut_pairs += used
    respecting = sum(
        1 for c in components for pair, path in assignment.items()
        if _respecting_subpath(c, path, g.layer_of, base_n) is not None
    )
    bound = h * k
    ok = not failures and worst < bound if h else not failures
    ok = ok and respecting >= shortcut_pairs
    return ReplayResult(ok, worst, bound, shortcut_pairs, respecting, failures[:5])
