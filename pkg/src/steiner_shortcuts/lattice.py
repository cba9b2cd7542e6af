"""Integer points of the Euclidean ball and the vertices of their convex hull.

Everything here is exact. Hull membership is decided by a phase-one simplex
run on an integer tableau (fraction-free pivoting), so no rounding can ever
move a point in or out of the hull.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import ContractViolation, ParameterError

LatticeVector = tuple[int, ...]

MAX_DIM = 8
MAX_RADIUS = 2**20


@dataclass(frozen=True)
class SubdirectionSet:
    """Extreme points of conv(B(r, d)), lexicographically ordered."""

    dim: int
    radius: int
    points: tuple[LatticeVector, ...]

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, i: int) -> LatticeVector:
        return self.points[i]

    def index(self, v: Sequence[int]) -> int:
        return self.points.index(tuple(v))


def _check_params(r: int, d: int) -> None:
    if not isinstance(r, int) or not isinstance(d, int):
        raise ParameterError("r and d must be integers")
    if r < 1 or d < 1:
        raise ParameterError(f"need r >= 1 and d >= 1, got r={r}, d={d}")
    if d > MAX_DIM:
        raise ParameterError(f"dimension {d} exceeds supported maximum {MAX_DIM}")
    if r > MAX_RADIUS:
        raise ParameterError(f"radius {r} exceeds supported maximum {MAX_RADIUS}")


def norm2(p: Sequence[int]) -> int:
    return sum(c * c for c in p)


def _ball_rec(r2: int, d: int) -> list[LatticeVector]:
    if d == 0:
        return [()]
    out: list[LatticeVector] = []
    bound = _isqrt(r2)
    for c in range(-bound, bound + 1):
        for rest in _ball_rec(r2 - c * c, d - 1):
            out.append((c,) + rest)
    return out


def _isqrt(n: int) -> int:
    import math

    return math.isqrt(n) if n > 0 else 0


def ball_points(r: int, d: int) -> list[LatticeVector]:
    """All p in Z^d with p.p <= r^2, in lexicographic order."""
    _check_params(r, d)
    return _ball_rec(r * r, d)


def _in_hull_lp(p: Sequence[int], pts: Sequence[Sequence[int]]) -> bool:
    """Exact test of p in conv(pts) via phase-one simplex on an integer tableau.

    Rows are the d coordinate equations plus the convexity row; the tableau
    is kept fraction-free by dividing every update by the previous pivot
    (the division is always exact). Bland's rule rules out cycling.
    """
    n = len(pts)
    if n == 0:
        return False
    d = len(p)
    m = d + 1
    # constraint rows: sum_j q_j[c] * lam_j = p[c]; sum_j lam_j = 1
    rows: list[list[int]] = []
    for c in range(d):
        row = [q[c] for q in pts]
        rhs = p[c]
        if rhs < 0:
            row = [-x for x in row]
            rhs = -rhs
        rows.append(row + [0] * m + [rhs])
    rows.append([1] * n + [0] * m + [1])
    for i in range(m):
        rows[i][n + i] = 1
    width = n + m + 1
    rhs_col = width - 1
    obj = [sum(rows[i][j] for i in range(m)) for j in range(n)] + [0] * m
    obj.append(sum(rows[i][rhs_col] for i in range(m)))
    basis = [n + i for i in range(m)]
    denom = 1

    while True:
        enter = next((j for j in range(n) if obj[j] > 0), None)
        if enter is None:
            break
        leave = None
        for i in range(m):
            a = rows[i][enter]
            if a <= 0:
                continue
            if leave is None:
                leave = i
                continue
            # compare rhs_i / a  vs  rhs_leave / a_leave, ties by basis index
            lhs = rows[i][rhs_col] * rows[leave][enter]
            rhs = rows[leave][rhs_col] * a
            if lhs < rhs or (lhs == rhs and basis[i] < basis[leave]):
                leave = i
        if leave is None:
            # unbounded improvement cannot happen in phase one; treat as feasible
            break
        piv_row = rows[leave]
        piv = piv_row[enter]
        for i in range(m):
            if i == leave:
                continue
            row = rows[i]
            f = row[enter]
            for j in range(width):
                row[j] = (row[j] * piv - f * piv_row[j]) // denom
        f = obj[enter]
        for j in range(width):
            obj[j] = (obj[j] * piv - f * piv_row[j]) // denom
        denom = piv
        basis[leave] = enter
    return obj[rhs_col] == 0


def _midpoint_witness(p: Sequence[int], r2: int) -> LatticeVector | None:
    """A nonzero u with p +- u both inside the ball of squared radius r2, if any.

    p +- u in the ball  <=>  |u|^2 + 2|p.u| <= r2 - |p|^2.
    """
    slack = r2 - norm2(p)
    if slack <= 0:
        return None
    d = len(p)
    bound = _isqrt(slack)
    # search small boxes first; the box radius is capped by |u|^2 <= slack
    for rad in range(1, bound + 1):
        for u in itertools.product(range(-rad, rad + 1), repeat=d):
            if max(abs(c) for c in u) != rad:
                continue
            dot = sum(a * b for a, b in zip(p, u))
            if norm2(u) + 2 * abs(dot) <= slack:
                return tuple(u)
    return None


def is_extreme(p: Sequence[int], pointset: Sequence[Sequence[int]]) -> bool:
    """True iff p is not a convex combination of pointset minus p."""
    p = tuple(p)
    members = {tuple(q) for q in pointset}
    if p not in members:
        raise ContractViolation(f"{p} is not a member of the point set")
    others = sorted(members - {p})
    if not others:
        return True
    # cheap exact certificate: p is the midpoint of two other members
    for a in others:
        b = tuple(2 * x - y for x, y in zip(p, a))
        if b != a and b in members and b != p:
            return False
    return not _in_hull_lp(p, others)


@lru_cache(maxsize=None)
def _extreme_points_cached(r: int, d: int) -> tuple[LatticeVector, ...]:
    if d == 1:
        return ((-r,), (r,))
    r2 = r * r
    pts = ball_points(r, d)
    # every extreme point survives the midpoint filter, so testing against the
    # survivors alone decides extremality with respect to the whole ball
    cand = [p for p in pts if _midpoint_witness(p, r2) is None]
    out = []
    for idx, p in enumerate(cand):
        others = cand[:idx] + cand[idx + 1:]
        if not _in_hull_lp(p, others):
            out.append(p)
    return tuple(sorted(out))


def extreme_points(r: int, d: int) -> SubdirectionSet:
    """The critical subdirections: extreme points of conv(B(r, d))."""
    _check_params(r, d)
    return SubdirectionSet(dim=d, radius=r, points=_extreme_points_cached(r, d))


def in_convex_hull(p: Sequence[int], pts: Iterable[Sequence[int]]) -> bool:
    """Exact membership of p in conv(pts)."""
    pts = [tuple(q) for q in pts]
    if tuple(p) in pts:
        return True
    return _in_hull_lp(tuple(p), pts)


def signed_permutations(d: int):
    """All signed coordinate permutations of Z^d as callables."""
    for perm in itertools.permutations(range(d)):
        for signs in itertools.product((1, -1), repeat=d):
            yield lambda v, perm=perm, signs=signs: tuple(
                signs[i] * v[perm[i]] for i in range(d)
            )
