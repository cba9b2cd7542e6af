import pytest
from hypothesis import given
from hypothesis import strategies as st

from steiner_shortcuts.analysis import tc_equivalent, thickness
from steiner_shortcuts.attack import (
    base_edge_count_formula,
    build_attack,
    check_distance,
    check_tc_segments,
    shortcut_edge_count_formula,
    verify_attack,
)
from steiner_shortcuts.graph import hop_distance, segment_certificate
from steiner_shortcuts.hesse import HesseParams, build_family
from steiner_shortcuts.shortcut import AugmentedGraph, ExplicitShortcut

from conftest import SMALL

small_params = st.builds(
    HesseParams, k=st.integers(2, 3), d=st.integers(1, 2), r=st.integers(1, 2), ell=st.integers(1, 2)
).filter(lambda p: p.num_vertices <= 30_000)


def test_small_attack_passes(small_attack):
    g, crit, sc = small_attack
    rep = verify_attack(g, sc, crit, "full")
    assert rep.passed, rep.as_dict()
    assert rep.counts["shortcut_edges_by_kind"] == {"E0": 512, "E1": 960}
    assert rep.counts["steiner_vertices"] == 576
    assert rep.counts["edges"] == 4224
    assert rep.check("tc_segments").passed


def test_edge_count_formulas_match_enumeration(small_attack):
    g, _, sc = small_attack
    assert sum(1 for _ in g.edges()) == base_edge_count_formula(SMALL)
    assert sc.edge_counts() == shortcut_edge_count_formula(SMALL)


@given(small_params)
def test_formulas_match_enumeration(p):
    g, _ = build_family(p)
    sc = build_attack(p, g)
    assert sc.edge_counts() == shortcut_edge_count_formula(p)
    assert sum(1 for _ in g.edges()) == base_edge_count_formula(p)
    assert sc.num_steiner == (p.k - 1) * p.layer_size


@given(small_params, st.data())
def test_sampled_pairs_at_distance_k(p, data):
    g, crit = build_family(p)
    g_plus = AugmentedGraph(g, build_attack(p, g))
    pair = crit.pair_at(data.draw(st.integers(0, len(crit) - 1)))
    assert hop_distance(g_plus, pair.s, pair.t) == p.k


@given(small_params)
def test_thickness_is_k(p):
    g, _ = build_family(p)
    assert thickness(AugmentedGraph(g, build_attack(p, g))) == p.k


def test_steiner_ids_follow_original_vertices(small_attack):
    g, _, sc = small_attack
    assert list(sc.steiner_vertices()) == list(range(g.n, g.n + g.N))
    assert all(sc.steiner_layer(v) == 1 for v in sc.steiner_vertices())


def test_reverse_edge_breaks_closure(small_attack):
    """Negative control: a Steiner vertex pointing back into layer 0."""
    g, crit, sc = small_attack
    steiner = next(w for _, w, kind in sc.edges() if kind == "E0")
    bad = sc.with_edges([(steiner, 0)])
    g_plus = AugmentedGraph(g, bad)
    res = tc_equivalent(g, g_plus, "full")
    assert not res.equal and res.witness_extra
    assert not check_tc_segments(g, g_plus).passed


def test_dropped_edge_breaks_distance(small_attack):
    g, crit, sc = small_attack
    edges = list(sc.edges())
    kept = [(u, w, kind) for u, w, kind in edges if not (kind == "E0" and u == next(crit.sources()))]
    pruned = ExplicitShortcut(sc.base_n, sc.num_steiner, kept, steiner_layers=[1] * sc.num_steiner)
    g_plus = AugmentedGraph(g, pruned)
    check = check_distance(g_plus, list(crit.pairs_from(next(crit.sources()))), 2, "full")
    assert not check.passed


def test_sampled_mode_report(small_attack):
    g, crit, sc = small_attack
    rep = verify_attack(g, sc, crit, "sample:50", seed=3)
    assert rep.passed
    assert rep.check("distance").mode == "sample:50"
    assert rep.check("tc_equal").mode.startswith("sample")
    assert all(c.name != "tc_segments" for c in rep.checks)


def test_closure_routes_agree_on_attack(small_attack):
    g, _, sc = small_attack
    g_plus = AugmentedGraph(g, sc)
    assert tc_equivalent(g, g_plus, "full").equal == segment_certificate(g, g_plus).equal is True


def test_k_must_be_at_least_two():
    with pytest.raises(Exception):
        build_attack(HesseParams(1, 1, 2, 2))
