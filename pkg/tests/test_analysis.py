import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from steiner_shortcuts.analysis import (
    UNBOUNDED,
    assign_critical_shortest_paths,
    critical_diameter,
    efficiency,
    efficiency_cap_check,
    normalize,
    power_le,
    prune_inefficient,
    replay_check,
    thickness,
    vertex_efficiency,
    volume_check,
)
from steiner_shortcuts.errors import ContractViolation
from steiner_shortcuts.graph import ExplicitGraph, reachable_set
from steiner_shortcuts.shortcut import AugmentedGraph, ExplicitShortcut


@pytest.fixture(scope="module")
def small_study(small_attack):
    g, crit, sc = small_attack
    g_plus = AugmentedGraph(g, sc)
    pairs = [(p.s, p.t) for p in crit.pairs()]
    assignment = assign_critical_shortest_paths(g_plus, pairs)
    comps = normalize(g, g_plus, 2)
    return g, g_plus, assignment, comps


def _toy():
    """a -> m -> q -> {b, c} over four layers, with Steiner routes a->x->b and
    a->y->c that are shorter than the original paths."""
    a, m, q, b, c, x, y = range(7)
    g = ExplicitGraph(5, [(a, m), (m, q), (q, b), (q, c)], layers=[0, 1, 2, 3, 3])
    sc = ExplicitShortcut(5, 2, [(a, x, "s"), (x, b, "s"), (a, y, "s"), (y, c, "s")], steiner_layers=[1, 1])
    g_plus = AugmentedGraph(g, sc)
    assignment = assign_critical_shortest_paths(g_plus, [(a, b), (a, c)])
    return g, g_plus, assignment


def test_thickness_examples():
    assert thickness(ExplicitGraph(3, [(0, 1), (1, 2)])) == 1
    assert thickness(ExplicitGraph(4, [(0, 1), (1, 2), (2, 3)], steiner=[1, 2])) == 3
    assert thickness(ExplicitGraph(4, [(0, 1), (1, 2), (2, 1), (2, 3)], steiner=[1, 2])) == UNBOUNDED
    assert thickness(ExplicitGraph(2, [], steiner=[0, 1])) == 2


@given(st.integers(0, 6))
def test_thickness_of_a_steiner_chain(length):
    n = length + 2
    g = ExplicitGraph(n, [(i, i + 1) for i in range(n - 1)], steiner=range(1, n - 1))
    assert thickness(g) == length + 1


def test_designated_paths_are_shortest_and_least(small_study):
    g, g_plus, assignment, _ = small_study
    for (s, t), path in assignment.items():
        assert path[0] == s and path[-1] == t
        assert len(path) == 3
    assert critical_diameter(g_plus, list(assignment.paths)) == 2


def test_toy_efficiency():
    g, g_plus, assignment = _toy()
    (comp,) = normalize(g, g_plus, 3)
    assert comp.key == (0, 3)
    assert efficiency(comp, assignment, g) == Fraction(1, 2)
    assert vertex_efficiency(comp, assignment, g, 5) == Fraction(1, 2)
    with pytest.raises(ContractViolation):
        vertex_efficiency(comp, assignment, g, 0)


def test_toy_prune_keeps_one_route():
    g, g_plus, assignment = _toy()
    (comp,) = normalize(g, g_plus, 3)
    res = prune_inefficient(comp, assignment, g, Fraction(1, 2))
    assert [s.vertex for s in res.steps] == [5]
    assert res.final == Fraction(1, 2) and res.monotone
    assert len(res.component) == 2


def test_prune_threshold_zero_deletes_nothing_useful():
    g, g_plus, assignment = _toy()
    (comp,) = normalize(g, g_plus, 3)
    assert prune_inefficient(comp, assignment, g, 0).steps == []


def test_small_components(small_study):
    g, _, assignment, comps = small_study
    keys = [c.key for c in comps]
    assert keys == [(0, 4)]
    assert efficiency(comps[0], assignment, g) == Fraction(16, 23)
    assert len(comps[0]) == 1472


def test_volume_bound(small_study):
    _, g_plus, assignment, _ = small_study
    res = volume_check(g_plus, assignment, 4)
    assert res.passed and res.max_paths == 4


def test_replay(small_study):
    g, _, assignment, comps = small_study
    res = replay_check(g, comps, assignment, 2)
    assert res.passed
    assert res.worst_replayed < res.bound
    assert res.respecting_total >= res.shortcut_pairs


def test_replay_detects_a_missing_component(small_study):
    g, _, assignment, comps = small_study
    assert not replay_check(g, [], assignment, 2).passed


@given(st.integers(0, 10_000), st.sampled_from([Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2), Fraction(4)]))
def test_prune_never_lowers_efficiency(small_study, seed, threshold):
    g, _, assignment, comps = small_study
    for comp in comps:
        res = prune_inefficient(comp, assignment, g, threshold, rng=random.Random(seed))
        assert res.monotone
        for step in res.steps:
            assert step.after >= step.before


def test_prune_leaves_input_untouched(small_study):
    g, _, assignment, comps = small_study
    before = set(comps[0].edges)
    prune_inefficient(comps[0], assignment, g, 4)
    assert comps[0].edges == before


def test_power_le():
    assert power_le(Fraction(4), 2, Fraction(2))
    assert not power_le(Fraction(5), 2, Fraction(2))
    assert power_le(Fraction(3), 9, Fraction(1, 2))
    assert not power_le(Fraction(31, 10), 9, Fraction(1, 2))


def test_efficiency_cap_records_precondition():
    res = efficiency_cap_check([Fraction(16, 23)], 2, 2, 2, Fraction(1, 10))
    assert not res.precondition
    assert res.within_cap  # 16/23 <= 2^(9/10)
    res = efficiency_cap_check([Fraction(3)], 1, 2, 2, Fraction(1, 10))
    assert res.precondition and not res.within_cap


@st.composite
def random_components(draw):
    """Four layers of three vertices with random edges, plus four Steiner
    vertices wired from layer 0 to layer 3."""
    width, layers, steiner = 3, 4, 4
    n = width * layers
    base = [(l * width + a, (l + 1) * width + b)
            for l in range(layers - 1) for a in range(width) for b in range(width)]
    g_edges = draw(st.lists(st.sampled_from(base), unique=True, min_size=3))
    s_ids = list(range(n, n + steiner))
    first, last = range(width), range((layers - 1) * width, n)
    candidates = ([(u, s) for u in first for s in s_ids] + [(s, t) for s in s_ids for t in s_ids if s < t]
                  + [(s, v) for s in s_ids for v in last])
    sc_edges = draw(st.lists(st.sampled_from(candidates), unique=True, min_size=2))
    g = ExplicitGraph(n, g_edges, layers=[v // width for v in range(n)])
    sc = ExplicitShortcut(n, steiner, [(u, w, "s") for u, w in sc_edges], steiner_layers=[1] * steiner)
    return g, AugmentedGraph(g, sc)


@given(random_components(), st.integers(0, 100), st.fractions(0, 4))
def test_prune_monotone_on_random_components(data, seed, threshold):
    g, g_plus = data
    pairs = [(s, t) for s in range(3) for t in range(9, 12)]
    reach = {(s, t) for s, t in pairs if t in reachable_set(g_plus, s)}
    assignment = assign_critical_shortest_paths(g_plus, sorted(reach))
    for comp in normalize(g, g_plus, 3):
        for rng in (None, random.Random(seed)):
            res = prune_inefficient(comp, assignment, g, threshold, rng=rng)
            assert res.monotone
            assert res.final >= res.initial
