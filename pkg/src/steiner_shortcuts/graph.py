"""Directed graphs with dense integer vertex ids and the reachability primitives
used by every verifier: BFS hop distances, exact path counting, strongly
connected components and bitset transitive closure.

Graphs expose ``out_edges(v)`` as ``(slot, target)`` pairs. The slot is a
stable per-source edge label (the subdirection index for rule-generated
families), which is what makes edge identities reproducible without ever
materializing the edge list.
"""

from __future__ import annotations

import os
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Sequence

from .errors import ContractViolation, ResourceError

UNREACHABLE = None

DEFAULT_TC_CAP = 200_000
DEFAULT_MATERIALIZE_CAP = 5_000_000


def tc_cap() -> int:
    return int(os.environ.get("STEINER_TC_CAP", DEFAULT_TC_CAP))


def materialize_cap() -> int:
    return int(os.environ.get("STEINER_MEMORY_CAP", DEFAULT_MATERIALIZE_CAP))


class LayeredGraph:
    """Base class: vertices are ``0..n-1``; subclasses supply the adjacency.

    ``layer_sizes`` lists the original layers in order. Steiner vertices,
    when present, carry ids after all original vertices unless a subclass
    says otherwise through ``is_steiner``.
    """

    n: int
    layer_sizes: list[int]
    coding: dict

    def out_edges(self, v: int) -> list[tuple[int, int]]:
        raise NotImplementedError

    def in_edges(self, v: int) -> list[tuple[int, int]]:
        """``(slot, source)`` pairs; slot is the label on the source side."""
        raise NotImplementedError

    def out_neighbors(self, v: int) -> list[int]:
        return [w for _, w in self.out_edges(v)]

    def in_neighbors(self, v: int) -> list[int]:
        return [u for _, u in self.in_edges(v)]

    def is_steiner(self, v: int) -> bool:
        return False

    def layer_of(self, v: int) -> int | None:
        """Layer index of an original vertex; None for Steiner vertices."""
        return None

    @property
    def num_original(self) -> int:
        return sum(1 for v in range(self.n) if not self.is_steiner(v))

    def steiner_vertices(self) -> Iterator[int]:
        return (v for v in range(self.n) if self.is_steiner(v))

    def check_vertex(self, v: int) -> None:
        if not (isinstance(v, int) and 0 <= v < self.n):
            raise ContractViolation(f"invalid vertex id {v!r} (graph has {self.n} vertices)")

    def edges(self) -> Iterator[tuple[int, int]]:
        for v in range(self.n):
            for w in self.out_neighbors(v):
                yield v, w

    def num_edges(self) -> int:
        return sum(len(self.out_edges(v)) for v in range(self.n))


class ExplicitGraph(LayeredGraph):
    """Materialized adjacency lists. Edge order per source is insertion order."""

    def __init__(
        self,
        n: int,
        edges: Iterable[tuple[int, int]],
        steiner: Iterable[int] = (),
        layers: Sequence[int] | None = None,
        layer_sizes: Sequence[int] | None = None,
        coding: dict | None = None,
    ):
        self.n = n
        self._out: list[list[int]] = [[] for _ in range(n)]
        self._in: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ContractViolation(f"edge ({u}, {v}) outside vertex range {n}")
            self._in[v].append((len(self._out[u]), u))
            self._out[u].append(v)
        self._steiner = frozenset(steiner)
        self._layers = list(layers) if layers is not None else None
        self.layer_sizes = list(layer_sizes) if layer_sizes is not None else []
        self.coding = dict(coding or {"family": "explicit"})

    def out_edges(self, v):
        return list(enumerate(self._out[v]))

    def out_neighbors(self, v):
        return list(self._out[v])

    def in_edges(self, v):
        return list(self._in[v])

    def is_steiner(self, v):
        return v in self._steiner

    def layer_of(self, v):
        if self._layers is None or v in self._steiner:
            return None
        return self._layers[v]

    @property
    def num_original(self):
        return self.n - len(self._steiner)

    def steiner_vertices(self):
        return iter(sorted(self._steiner))

    def num_edges(self):
        return sum(len(a) for a in self._out)


def materialize(g: LayeredGraph, cap: int | None = None) -> ExplicitGraph:
    """Explicit copy of ``g`` with identical neighbor order on every vertex."""
    cap = materialize_cap() if cap is None else cap
    if g.n > cap:
        raise ResourceError(f"materializing {g.n} vertices exceeds cap {cap}", g.n)
    edges = []
    for v in range(g.n):
        for w in g.out_neighbors(v):
            edges.append((v, w))
            if len(edges) > cap:
                raise ResourceError(f"edge count exceeds materialization cap {cap}", len(edges))
    layers = [g.layer_of(v) for v in range(g.n)]
    steiner = [v for v in range(g.n) if g.is_steiner(v)]
    return ExplicitGraph(
        g.n, edges, steiner=steiner, layers=layers,
        layer_sizes=g.layer_sizes, coding=dict(g.coding),
    )


class UnionGraph(LayeredGraph):
    """Edge union of graphs over a common id space (first graph is the largest)."""

    def __init__(self, *graphs: LayeredGraph):
        self.graphs = graphs
        self.n = max(g.n for g in graphs)
        self.layer_sizes = graphs[0].layer_sizes
        self.coding = {"family": "union"}

    def out_neighbors(self, v):
        seen: dict[int, None] = {}
        for g in self.graphs:
            if v < g.n:
                for w in g.out_neighbors(v):
                    seen.setdefault(w)
        return list(seen)

    def out_edges(self, v):
        return list(enumerate(self.out_neighbors(v)))

    def is_steiner(self, v):
        return any(v < g.n and g.is_steiner(v) for g in self.graphs)


# --------------------------------------------------------------------------
# BFS and distances


def bfs_distances(
    g: LayeredGraph,
    s: int,
    targets: Iterable[int] | None = None,
    max_depth: int | None = None,
) -> dict[int, int]:
    """Hop distances from ``s``. Stops early once every target is settled."""
    dist = {s: 0}
    pending = set(targets) if targets is not None else None
    if pending is not None:
        pending.discard(s)
        if not pending:
            return dist
    frontier = [s]
    depth = 0
    while frontier:
        if max_depth is not None and depth >= max_depth:
            break
        depth += 1
        nxt = []
        for u in frontier:
            for w in g.out_neighbors(u):
                if w not in dist:
                    dist[w] = depth
                    nxt.append(w)
                    if pending is not None:
                        pending.discard(w)
        if pending is not None and not pending:
            break
        frontier = nxt
    return dist


def hop_distance(g: LayeredGraph, s: int, t: int) -> int | None:
    """Edge count of a shortest s->t path, or ``UNREACHABLE`` (None)."""
    g.check_vertex(s)
    g.check_vertex(t)
    return bfs_distances(g, s, targets=[t]).get(t, UNREACHABLE)


def reachable_set(g: LayeredGraph, s: int) -> set[int]:
    return set(bfs_distances(g, s))


# --------------------------------------------------------------------------
# path counting


def _reachable_postorder(g: LayeredGraph, s: int, prune: Callable[[int], bool] | None):
    """Postorder of vertices reachable from s; raises on a directed cycle."""
    WHITE, GREY, BLACK = 0, 1, 2
    color: dict[int, int] = {s: GREY}
    order: list[int] = []
    stack = [(s, iter(g.out_neighbors(s)))]
    while stack:
        v, it = stack[-1]
        advanced = False
        for w in it:
            if prune is not None and prune(w):
                continue
            c = color.get(w, WHITE)
            if c == GREY:
                raise ContractViolation(f"cycle detected through vertex {w}")
            if c == WHITE:
                color[w] = GREY
                stack.append((w, iter(g.out_neighbors(w))))
                advanced = True
                break
        if not advanced:
            color[v] = BLACK
            order.append(v)
            stack.pop()
    return order


def path_counts_from(g: LayeredGraph, s: int, prune: Callable[[int], bool] | None = None) -> dict[int, int]:
    """Number of distinct s->v paths for every v reachable from s (parallel
    edges count separately)."""
    order = _reachable_postorder(g, s, prune)
    counts = {v: 0 for v in order}
    counts[s] = 1
    for v in reversed(order):
        c = counts[v]
        if c == 0:
            continue
        for w in g.out_neighbors(v):
            if w in counts:
                counts[w] += c
    return counts


def count_paths(g: LayeredGraph, s: int, t: int) -> int:
    """Exact number of distinct s->t paths (arbitrary precision)."""
    g.check_vertex(s)
    g.check_vertex(t)
    if s == t:
        # still reject cycles through s
        _reachable_postorder(g, s, None)
        return 1
    lt = g.layer_of(t)
    prune = None
    if lt is not None and g.layer_of(s) is not None:
        def prune(w, lt=lt):
            lw = g.layer_of(w)
            return lw is not None and lw > lt
    # count paths into t: reverse-topological accumulation of paths-to-t
    order = _reachable_postorder(g, s, prune)
    to_t = {}
    for v in order:
        if v == t:
            to_t[v] = 1
        else:
            to_t[v] = sum(to_t.get(w, 0) for w in g.out_neighbors(v))
    return to_t.get(s, 0)


# --------------------------------------------------------------------------
# strongly connected components


def tarjan_scc(n: int, succ: Callable[[int], Iterable[int]], vertices: Iterable[int] | None = None) -> list[list[int]]:
    """Strongly connected components in reverse topological order (sinks first)."""
    index = {}
    low = {}
    on_stack = set()
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in (range(n) if vertices is None else vertices):
        if root in index:
            continue
        work = [(root, iter(succ(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            pushed = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ(w))))
                    pushed = True
                    break
                if w in on_stack and index[w] < low[v]:
                    low[v] = index[w]
            if pushed:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
    return comps


def topological_order(g: LayeredGraph) -> list[int] | None:
    """Kahn order (ties broken by id), or None if ``g`` has a directed cycle."""
    import heapq

    indeg = [0] * g.n
    for v in range(g.n):
        for w in g.out_neighbors(v):
            indeg[w] += 1
    heap = [v for v in range(g.n) if indeg[v] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        v = heapq.heappop(heap)
        order.append(v)
        for w in g.out_neighbors(v):
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(heap, w)
    return order if len(order) == g.n else None


# --------------------------------------------------------------------------
# transitive closure


@dataclass
class _SweepPlan:
    comps: list[list[int]]
    comp_of: list[int]
    bit: list[int]
    succ_comps: list[set[int]]

    def bit_map(self) -> dict[int, int]:
        return {v: b for v, b in enumerate(self.bit) if b >= 0}


def _sweep_plan(union: LayeredGraph, counted: Callable[[int], bool]) -> _SweepPlan:
    """Condensation in reverse topological order plus bit positions for
    counted vertices (sinks first, so rows near the sinks stay short)."""
    n = union.n
    order = topological_order(union)
    if order is not None:
        comps = [[v] for v in reversed(order)]
    else:
        comps = tarjan_scc(n, union.out_neighbors)
    comp_of = [0] * n
    for ci, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = ci
    bit = [-1] * n
    nb = 0
    for comp in comps:
        for v in comp:
            if counted(v):
                bit[v] = nb
                nb += 1
    succ_comps = []
    for ci, comp in enumerate(comps):
        targets = {comp_of[w] for v in comp for w in union.out_neighbors(v)}
        targets.discard(ci)
        succ_comps.append(targets)
    return _SweepPlan(comps, comp_of, bit, succ_comps)


def _closure_sweep(
    graphs: Sequence[LayeredGraph],
    plan: _SweepPlan,
    keep: set[int] | None = None,
) -> Iterator[tuple[int, list[int]]]:
    """Yield ``(v, [row_g for g in graphs])`` for every vertex.

    Rows are Python ints used as bitsets over the counted vertices of
    ``plan``. A row is dropped as soon as every predecessor component has
    consumed it, which keeps the live set near two layers for layered inputs.
    """
    comps, bit = plan.comps, plan.bit
    pred_left = [0] * len(comps)
    for targets in plan.succ_comps:
        for cj in targets:
            pred_left[cj] += 1
    rows: list[dict[int, int]] = [{} for _ in graphs]

    def release(comp):
        for w in comp:
            if keep is None or w not in keep:
                for r in rows:
                    r.pop(w, None)

    for ci, comp in enumerate(comps):
        members = set(comp)
        for gi, g in enumerate(graphs):
            r = rows[gi]
            for v in comp:
                acc = (1 << bit[v]) if bit[v] >= 0 else 0
                if v < g.n:
                    for w in g.out_neighbors(v):
                        if w not in members:
                            acc |= r[w]
                r[v] = acc
            if len(comp) > 1:
                changed = True
                while changed:
                    changed = False
                    for v in comp:
                        if v >= g.n:
                            continue
                        acc = r[v]
                        for w in g.out_neighbors(v):
                            if w in members:
                                acc |= r[w]
                        if acc != r[v]:
                            r[v] = acc
                            changed = True
        if len(graphs) > 1:
            # share equal rows so identical graphs cost one copy
            first = rows[0]
            for r in rows[1:]:
                for v in comp:
                    if r[v] == first[v]:
                        r[v] = first[v]
        for v in comp:
            yield v, [r[v] for r in rows]
        for cj in plan.succ_comps[ci]:
            pred_left[cj] -= 1
            if pred_left[cj] == 0:
                release(comps[cj])
        if pred_left[ci] == 0:
            release(comp)


@dataclass
class ClosureRows:
    """Reachability rows keyed by source; ``bit_of`` maps vertex -> bit."""

    rows: dict[int, int]
    bit_of: dict[int, int] = field(repr=False)

    def reachable(self, s: int) -> set[int]:
        row = self.rows[s]
        inv = {b: v for v, b in self.bit_of.items()}
        out = set()
        while row:
            low = row & -row
            out.add(inv[low.bit_length() - 1])
            row ^= low
        return out

    def contains(self, s: int, v: int) -> bool:
        return bool(self.rows[s] >> self.bit_of[v] & 1)


def transitive_closure(g: LayeredGraph, sources: Iterable[int], cap: int | None = None) -> ClosureRows:
    """Per-source reachability bitsets (bit of v set iff v reachable)."""
    cap = tc_cap() if cap is None else cap
    if g.n > cap:
        raise ResourceError(
            f"transitive closure over {g.n} vertices exceeds cap {cap}; use sampled verification",
            g.n,
        )
    sources = list(sources)
    for s in sources:
        g.check_vertex(s)
    keep = set(sources)
    plan = _sweep_plan(g, lambda v: True)
    rows = {}
    for v, (row,) in _closure_sweep([g], plan, keep=keep):
        if v in keep:
            rows[v] = row
    return ClosureRows(rows=rows, bit_of=plan.bit_map())


@dataclass
class TcComparison:
    equal: bool
    mode: str
    sources_checked: int
    witness: tuple[int, int] | None = None
    # True if the witness pair is reachable in the second graph but not the first
    witness_extra: bool | None = None


def _first_diff(a: int, b: int) -> int:
    x = a ^ b
    return (x & -x).bit_length() - 1


def compare_closures(
    g: LayeredGraph,
    h: LayeredGraph,
    vertices: Callable[[int], bool],
    mode: str = "full",
    samples: int = 200,
    seed: int = 0,
    cap: int | None = None,
) -> TcComparison:
    """Compare reachability of ``g`` and ``h`` on the vertex set selected by
    ``vertices`` (ids must mean the same vertex in both graphs)."""
    if mode == "full":
        cap = tc_cap() if cap is None else cap
        n = max(g.n, h.n)
        if n > cap:
            raise ResourceError(
                f"full closure over {n} vertices exceeds cap {cap}; use sampled verification", n
            )
        plan = _sweep_plan(UnionGraph(h, g), vertices)
        inv = None
        checked = 0
        for v, (rg, rh) in _closure_sweep([g, h], plan):
            if not vertices(v):
                continue
            checked += 1
            if rg != rh:
                if inv is None:
                    inv = {b: u for u, b in enumerate(plan.bit) if b >= 0}
                pos = _first_diff(rg, rh)
                return TcComparison(False, "full", checked, (v, inv[pos]), bool(rh >> pos & 1))
        return TcComparison(True, "full", checked)
    if mode == "sample":
        pool = [v for v in range(min(g.n, h.n)) if vertices(v)]
        rng = random.Random(seed)
        chosen = sorted(rng.sample(pool, min(samples, len(pool))))
        for s in chosen:
            rg = {v for v in reachable_set(g, s) if vertices(v)}
            rh = {v for v in reachable_set(h, s) if vertices(v)}
            if rg != rh:
                diff = sorted(rg ^ rh)
                w = diff[0]
                return TcComparison(False, "sample", len(chosen), (s, w), w in rh)
        return TcComparison(True, "sample", len(chosen))
    raise ContractViolation(f"unknown mode {mode!r}")


def segment_certificate(g: LayeredGraph, h: LayeredGraph) -> TcComparison:
    """Exact TC-equality check for a Steiner shortcut ``h`` of ``g``.

    Independent of the bitset sweep: every path in ``h`` between original
    vertices splits into original edges and Steiner segments (original ->
    Steiner* -> original). Closures agree iff every edge of ``g`` is present
    in ``h`` and every segment endpoint pair is already reachable in ``g``.
    """
    for v in range(g.n):
        missing = set(g.out_neighbors(v)) - set(h.out_neighbors(v))
        if missing:
            hv = reachable_set(h, v)
            for w in sorted(missing):
                if w not in hv:
                    return TcComparison(False, "segment", v, (v, w), False)
    checked = 0
    for u in range(g.n):
        if h.is_steiner(u):
            continue
        base = set(g.out_neighbors(u))
        extra = [w for w in h.out_neighbors(u) if h.is_steiner(w) or w not in base]
        if not extra:
            continue
        checked += 1
        # original vertices reachable from u through Steiner-only interiors
        ends = set()
        seen = set()
        stack = []
        for w in extra:
            if h.is_steiner(w):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
            else:
                ends.add(w)
        while stack:
            x = stack.pop()
            for y in h.out_neighbors(x):
                if h.is_steiner(y):
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
                else:
                    ends.add(y)
        ends.discard(u)
        if not ends:
            continue
        found = bfs_distances(g, u, targets=ends)
        for w in sorted(ends):
            if w not in found:
                return TcComparison(False, "segment", checked, (u, w), True)
    return TcComparison(True, "segment", checked)
