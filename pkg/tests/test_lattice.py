import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import hull_vertices, lattice_ball
from steiner_shortcuts.errors import ContractViolation, ParameterError
from steiner_shortcuts.lattice import (
    ball_points,
    extreme_points,
    in_convex_hull,
    is_extreme,
    signed_permutations,
)

# d = 2 counts for r = 1..30, frozen from the cone oracle (cross-checked
# against scipy.spatial.ConvexHull); the sequence is not monotone
D2_COUNTS = [4, 4, 8, 12, 12, 12, 12, 20, 12, 20, 20, 20, 20, 20, 20, 20,
             24, 28, 20, 20, 20, 36, 36, 28, 20, 36, 36, 36, 36, 28]
D3_COUNTS = [6, 14, 30, 54]


@pytest.mark.parametrize("r", range(1, 11))
def test_d2_matches_oracle(r):
    assert list(extreme_points(r, 2)) == hull_vertices(r, 2)


@pytest.mark.parametrize("r", range(1, 4))
def test_d3_matches_oracle(r):
    assert list(extreme_points(r, 3)) == hull_vertices(r, 3)


def test_frozen_counts():
    assert [len(extreme_points(r, 2)) for r in range(1, 31)] == D2_COUNTS
    assert [len(extreme_points(r, 3)) for r in range(1, 5)] == D3_COUNTS


def test_known_small_sets():
    assert list(extreme_points(1, 2)) == [(-1, 0), (0, -1), (0, 1), (1, 0)]
    assert list(extreme_points(2, 2)) == [(-2, 0), (0, -2), (0, 2), (2, 0)]
    assert len(extreme_points(3, 2)) == 8
    assert list(extreme_points(5, 1)) == [(-5,), (5,)]


def test_count_is_not_monotone():
    drops = [r + 1 for r in range(1, 30) if D2_COUNTS[r] < D2_COUNTS[r - 1]]
    assert drops == [9, 19, 24, 25, 30]


def test_ball_points_match_brute_force():
    for r, d in [(1, 1), (3, 2), (2, 3)]:
        assert sorted(ball_points(r, d)) == sorted(lattice_ball(r, d))


@given(st.integers(1, 12), st.sampled_from([2, 3]))
def test_symmetric_under_signed_permutations(r, d):
    if d == 3 and r > 4:
        r = r % 4 + 1
    pts = set(extreme_points(r, d))
    for f in signed_permutations(d):
        assert {f(v) for v in pts} == pts


@given(st.integers(1, 8))
def test_every_ball_point_is_covered(r):
    hull = list(extreme_points(r, 2))
    for q in ball_points(r, 2):
        assert in_convex_hull(q, hull)


@given(st.integers(1, 8))
def test_extreme_points_lie_on_the_boundary_shell(r):
    for p in extreme_points(r, 2):
        assert (r - 1) ** 2 < sum(c * c for c in p) <= r * r


def test_is_extreme_small_sets():
    square = [(0, 0), (2, 0), (0, 2), (2, 2), (1, 1)]
    assert is_extreme((0, 0), square)
    assert not is_extreme((1, 1), square)
    assert not is_extreme((1, 0), [(0, 0), (1, 0), (2, 0)])
    assert is_extreme((3,), [(3,)])
    with pytest.raises(ContractViolation):
        is_extreme((5, 5), square)


@pytest.mark.parametrize("r,d", [(0, 2), (2, 0), (1, 9), (1.5, 2)])
def test_rejects_bad_parameters(r, d):
    with pytest.raises(ParameterError):
        extreme_points(r, d)
