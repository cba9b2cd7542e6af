"""Independent reference implementations used only by the tests.

The hull oracle decides extremality with a separating-cone argument instead
of linear programming: p is a vertex of conv(P) iff some direction c has
c.(q - p) < 0 for every other q in P. When such a c exists, the closed cone
{c : c.(q - p) <= 0} is full-dimensional and pointed. Its extreme rays are
generalized cross products of d-1 of the difference vectors, and their sum
is an interior point.
"""

from __future__ import annotations

import itertools
import math

import networkx as nx
import numpy as np


def lattice_ball(r: int, d: int) -> list[tuple[int, ...]]:
    return [p for p in itertools.product(range(-r, r + 1), repeat=d) if sum(c * c for c in p) <= r * r]


def _primitive(v: tuple[int, ...]) -> tuple[int, ...]:
    g = 0
    for c in v:
        g = math.gcd(g, abs(c))
    return tuple(c // g for c in v)


def _ray_candidates(dirs: np.ndarray) -> np.ndarray:
    n, d = dirs.shape
    if d == 2:
        perp = np.stack([-dirs[:, 1], dirs[:, 0]], axis=1)
        return np.concatenate([perp, -perp])
    if d == 3:
        i, j = np.triu_indices(n, k=1)
        cross = np.cross(dirs[i], dirs[j])
        cross = cross[np.any(cross != 0, axis=1)]
        return np.concatenate([cross, -cross])
    raise ValueError("oracle supports d = 2 and d = 3")


def is_vertex(p: tuple[int, ...], points: list[tuple[int, ...]]) -> bool:
    dirs = sorted({_primitive(tuple(a - b for a, b in zip(q, p))) for q in points if q != p})
    if not dirs:
        return True
    V = np.array(dirs, dtype=np.int64)
    if np.linalg.matrix_rank(V) < V.shape[1]:
        raise ValueError("difference vectors do not span; oracle needs full dimension")
    cand = _ray_candidates(V)
    ok = np.all(cand @ V.T <= 0, axis=1)
    rays = cand[ok]
    if len(rays) == 0:
        return False
    c = rays.sum(axis=0)
    return bool(np.all(V @ c < 0))


def hull_vertices(r: int, d: int) -> list[tuple[int, ...]]:
    if d == 1:
        return [(-r,), (r,)]
    pts = lattice_ball(r, d)
    return sorted(p for p in pts if is_vertex(p, pts))


def to_networkx(g) -> nx.DiGraph:
    out = nx.DiGraph()
    out.add_nodes_from(range(g.n))
    for u in range(g.n):
        for w in g.out_neighbors(u):
            out.add_edge(u, w)
    return out


def closure_on(g, vertices) -> set[tuple[int, int]]:
    """Reachable ordered pairs (s, t), s != t, among ``vertices``."""
    graph = to_networkx(g)
    keep = set(vertices)
    pairs = set()
    for s in keep:
        for t in nx.descendants(graph, s):
            if t in keep:
                pairs.add((s, t))
    return pairs


def brute_force_paths(g, s: int, t: int) -> int:
    return sum(1 for _ in nx.all_simple_paths(to_networkx(g), s, t)) if s != t else 1
