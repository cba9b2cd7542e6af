import pytest
from hypothesis import given
from hypothesis import strategies as st

from steiner_shortcuts.errors import ContractViolation, ParameterError
from steiner_shortcuts.wxx import (
    WxxParams,
    bit_reversal_perm,
    build_wxx,
    build_wxx_attack,
    f_values,
    shortcut_edge_formula,
    verify_wxx_attack,
    wxx_critical_path,
    z_value,
)

POWERS = [1, 2, 4, 8, 16, 32]


def test_bit_reversal_examples():
    assert bit_reversal_perm(1) == [0]
    assert bit_reversal_perm(2) == [0, 1]
    assert bit_reversal_perm(8) == [0, 4, 2, 6, 1, 5, 3, 7]


@given(st.sampled_from(POWERS))
def test_bit_reversal_is_an_involution(r):
    perm = bit_reversal_perm(r)
    assert sorted(perm) == list(range(r))
    assert [perm[p] for p in perm] == list(range(r))


@given(st.sampled_from(POWERS), st.data())
def test_z_is_triangular(r, data):
    d = data.draw(st.integers(1, r))
    assert z_value(r, d) == d * (d - 1) // 2
    assert all(0 <= f < d for f in f_values(r, d))


@pytest.mark.parametrize("r", [0, 3, 6, -2])
def test_rejects_non_powers_of_two(r):
    with pytest.raises(ParameterError):
        WxxParams(r)


def test_r2_counts(wxx_r2):
    g, crit, sc = wxx_r2
    assert len(crit) == 512
    assert sc.num_steiner == 1024 == 64 * 2**4
    assert sc.edge_counts() == shortcut_edge_formula(2) == {"H1": 256, "H2": 1488}
    assert sc.num_edges() <= 2**7 * 2**5


def test_r2_full_verification(wxx_r2):
    g, crit, sc = wxx_r2
    rep = verify_wxx_attack(g, sc, crit, "full")
    assert rep.passed, rep.as_dict()
    for name in ("distance", "route_through_w", "tc_equal", "tc_segments", "w_path_soundness"):
        assert rep.check(name).passed
    assert rep.check("uniqueness_spot").mode == "informational"


@given(st.data())
def test_critical_paths_follow_graph_edges(wxx_r2, data):
    g, crit, _ = wxx_r2
    pair = crit.pair_at(data.draw(st.integers(0, len(crit) - 1)))
    path = wxx_critical_path(crit, pair.s, pair.d1, pair.d2)
    assert path[0] == pair.s and path[-1] == pair.t
    for u, w in zip(path, path[1:]):
        assert w in g.out_neighbors(u)


def test_in_edges_invert_out_edges(wxx_r2):
    g, _, _ = wxx_r2
    for v in range(0, g.n, 53):
        for slot, w in g.out_edges(v):
            assert (slot, v) in g.in_edges(w)


def test_identity_edges_can_be_disabled():
    g_on, _ = build_wxx(WxxParams(2))
    g_off, _ = build_wxx(WxxParams(2, identity_edges=False))
    assert g_off.num_edges() < g_on.num_edges()


def test_corrupted_z_fails():
    """Negative control: a wrong vertical offset sends the shortcut off target."""
    g, crit = build_wxx(WxxParams(2))
    sc = build_wxx_attack(g, z_override={2: 0})
    rep = verify_wxx_attack(g, sc, crit, "full")
    assert not rep.passed
    assert not rep.check("distance").passed or not rep.check("tc_equal").passed


def test_r4_sampled():
    g, crit = build_wxx(WxxParams(4))
    sc = build_wxx_attack(g)
    rep = verify_wxx_attack(g, sc, crit, "sample:200", seed=1)
    assert rep.passed, rep.as_dict()
    assert sc.num_edges() <= 2**7 * 4**5


def test_make_rejects_bad_inputs(wxx_r2):
    g, crit, _ = wxx_r2
    with pytest.raises(ContractViolation):
        crit.make(g.n - 1, 1, 1)
    with pytest.raises(ContractViolation):
        crit.make(0, 0, 1)
