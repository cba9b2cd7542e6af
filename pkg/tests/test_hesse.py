import pytest
from hypothesis import given
from hypothesis import strategies as st

from steiner_shortcuts.errors import ContractViolation, ParameterError, ResourceError
from steiner_shortcuts.graph import count_paths, materialize
from steiner_shortcuts.hesse import (
    CriticalSet,
    HesseGraph,
    HesseParams,
    build_family,
    build_g1,
    build_gk,
    critical_path,
    validate_family,
)

from conftest import SMALL

params_st = st.builds(
    HesseParams,
    k=st.integers(1, 3),
    d=st.integers(1, 2),
    r=st.integers(1, 2),
    ell=st.integers(1, 2),
).filter(lambda p: p.num_vertices <= 40_000)


def test_small_preset_counts():
    g, crit = build_family(SMALL)
    assert SMALL.num_layers == 5
    assert SMALL.layer_size == 576
    assert g.n == 2880
    assert SMALL.delta == 2
    assert len(crit) == 1024 == SMALL.critical_pair_formula()
    # N * delta^k * r^dk / (r+1)^dk = 576 * 4 * 4 / 9
    assert 576 * 4 * 4 // 9 == 1024


def test_g1_counts():
    g, crit = build_g1(HesseParams(1, 2, 2, 2))
    assert g.coding["family"] == "g1"
    assert g.n == 3 * 24**2
    assert len(crit) == crit.formula_count()


def test_builders_check_k():
    with pytest.raises(ParameterError):
        build_g1(SMALL)
    with pytest.raises(ParameterError):
        build_gk(HesseParams(1, 1, 2, 2))


@pytest.mark.parametrize("kwargs", [dict(k=0, d=1, r=2, ell=2), dict(k=2, d=1, r=0, ell=2),
                                    dict(k=2, d=1, r=2, ell=0), dict(k=2, d=0, r=2, ell=2)])
def test_rejects_bad_parameters(kwargs):
    with pytest.raises(ParameterError):
        HesseParams(**kwargs)


def test_budget_is_enforced(monkeypatch):
    monkeypatch.setenv("STEINER_MEMORY_CAP", "1000")
    with pytest.raises(ResourceError) as err:
        build_family(SMALL)
    assert err.value.count == 2880


@given(params_st)
def test_counts_match_formula(p):
    g, crit = build_family(p)
    assert len(crit) == p.critical_pair_formula()
    assert g.n == p.num_layers * p.layer_size


@given(params_st, st.data())
def test_out_degree_at_most_delta(p, data):
    g, _ = build_family(p)
    for _ in range(20):
        v = data.draw(st.integers(0, g.n - 1))
        assert len(g.out_neighbors(v)) <= p.delta


@given(params_st, st.data())
def test_encode_decode_roundtrip(p, data):
    g, _ = build_family(p)
    v = data.draw(st.integers(0, g.n - 1))
    layer, blocks = g.decode(v)
    assert g.encode(layer, blocks) == v
    assert all(-p.box < c <= p.box for blk in blocks for c in blk)


@given(params_st, st.data())
def test_in_edges_invert_out_edges(p, data):
    g, _ = build_family(p)
    v = data.draw(st.integers(0, g.n - 1))
    for slot, w in g.out_edges(v):
        assert (slot, v) in g.in_edges(w)
    for slot, u in g.in_edges(v):
        assert (slot, v) in g.out_edges(u)


@given(params_st, st.data())
def test_critical_paths_are_paths_of_the_graph(p, data):
    g, crit = build_family(p)
    pair = crit.pair_at(data.draw(st.integers(0, len(crit) - 1)))
    path = critical_path(crit, pair)
    assert path[0] == pair.s and path[-1] == pair.t
    assert len(path) == p.num_layers
    for u, w in zip(path, path[1:]):
        assert w in g.out_neighbors(u)


@given(params_st, st.data())
def test_critical_pairs_have_unique_paths(p, data):
    g, crit = build_family(p)
    pair = crit.pair_at(data.draw(st.integers(0, len(crit) - 1)))
    assert count_paths(g, pair.s, pair.t) == 1


def test_pair_at_agrees_with_iteration(small_family):
    _, crit = small_family
    for i, pair in enumerate(crit.pairs()):
        if i % 37 == 0:
            assert crit.pair_at(i) == pair


def test_implicit_adjacency_matches_materialized(small_family):
    g, _ = small_family
    m = materialize(g)
    for v in range(0, g.n, 7):
        assert m.out_neighbors(v) == g.out_neighbors(v)
        assert sorted(u for _, u in m.in_edges(v)) == sorted(u for _, u in g.in_edges(v))


def test_critical_path_rejects_foreign_pairs(small_family):
    g, crit = small_family
    pair = crit.pair_at(0)
    bogus = type(pair)(pair.s, pair.t + 1, pair.directions)
    with pytest.raises(ContractViolation):
        critical_path(crit, bogus)


def test_validation_small_exhaustive(small_family):
    g, crit = small_family
    rep = validate_family(g, crit, "exhaustive")
    assert rep.passed
    assert rep.check("uniqueness").value == 1024
    assert [c.name for c in rep.checks] == ["uniqueness", "limited_intersection"]


def test_g1_edge_disjoint():
    g, crit = build_g1(HesseParams(1, 2, 2, 2))
    rep = validate_family(g, crit, "exhaustive")
    assert rep.check("edge_disjoint").passed
    assert rep.passed


def test_duplicated_subdirection_breaks_uniqueness():
    """Negative control: directions that are not extreme give parallel paths."""
    p = HesseParams(1, 1, 2, 2)
    g = HesseGraph(p, subdirections=[(-2,), (-1,), (0,), (1,), (2,)])
    crit = CriticalSet(g)
    rep = validate_family(g, crit, "exhaustive")
    assert not rep.check("uniqueness").passed
    assert rep.check("uniqueness").as_dict()["witnesses"]
