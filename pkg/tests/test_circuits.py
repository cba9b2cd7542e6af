import random

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import closure_on, to_networkx
from steiner_shortcuts.circuits import (
    OrCircuit,
    circuit_shortcut_to_graph,
    circuits_equivalent,
    eval_circuit,
    graph_tc_equal,
    graph_to_circuit,
    layer_circuit,
    random_circuit,
    random_digraph,
    reachability_function,
    scc_contract,
)
from steiner_shortcuts.errors import ContractViolation
from steiner_shortcuts.graph import ExplicitGraph


def _chain():
    # s -> g -> t
    return OrCircuit(3, [0], [2], [(0, 1), (1, 2)])


def test_eval_examples():
    c = _chain()
    assert eval_circuit(c, [1]) == [True]
    assert eval_circuit(c, [0]) == [False]
    two = OrCircuit(3, [0, 1], [2], [(0, 2)])
    assert eval_circuit(two, [0, 1]) == [False]
    with pytest.raises(ContractViolation):
        eval_circuit(two, [1])


def test_reachability_examples():
    assert reachability_function(OrCircuit(4, [0, 1], [2, 3], [])) == ((False, False), (False, False))
    full = OrCircuit(4, [0, 1], [2, 3], [(0, 2), (0, 3), (1, 2), (1, 3)])
    assert reachability_function(full) == ((True, True), (True, True))
    path = graph_to_circuit(ExplicitGraph(2, [(0, 1)]))
    assert reachability_function(path) == ((True, True), (False, True))


def test_cycle_is_rejected():
    with pytest.raises(ContractViolation):
        OrCircuit(2, [0], [1], [(0, 1), (1, 0)])


def test_wrapper_examples():
    assert graph_to_circuit(ExplicitGraph(2, [(0, 1)])).size == 5
    edgeless = graph_to_circuit(ExplicitGraph(3, []))
    assert edgeless.size == 6
    assert reachability_function(edgeless) == tuple(tuple(a == b for b in range(3)) for a in range(3))
    two_cycle = graph_to_circuit(ExplicitGraph(2, [(0, 1), (1, 0)]))
    assert reachability_function(two_cycle) == ((True, True), (True, True))


def test_scc_examples():
    dag = ExplicitGraph(4, [(0, 1), (1, 2), (0, 3)])
    cond = scc_contract(dag)
    assert cond.mapping == [0, 1, 2, 3]
    assert sorted(cond.dag.edges()) == sorted(dag.edges())
    ring = scc_contract(ExplicitGraph(5, [(i, (i + 1) % 5) for i in range(5)]))
    assert ring.dag.n == 1 and ring.dag.num_edges() == 0
    joined = scc_contract(ExplicitGraph(4, [(0, 1), (1, 0), (2, 3), (3, 2), (1, 2)]))
    assert joined.dag.n == 2 and list(joined.dag.edges()) == [(0, 1)]


@given(st.integers(1, 25), st.integers(0, 10**6))
def test_scc_contract_preserves_reachability(n, seed):
    g = random_digraph(n, 0.12, seed)
    cond = scc_contract(g)
    assert sorted(map(sorted, cond.components)) == sorted(
        map(sorted, nx.strongly_connected_components(to_networkx(g)))
    )
    tc_g = closure_on(g, range(n))
    tc_c = closure_on(cond.dag, range(cond.dag.n))
    for u in range(n):
        for v in range(n):
            if u != v:
                a, b = cond.mapping[u], cond.mapping[v]
                assert ((u, v) in tc_g) == (a == b or (a, b) in tc_c)


@given(st.integers(1, 25), st.integers(0, 10**6), st.booleans())
def test_roundtrip_preserves_closure(n, seed, acyclic):
    g = random_digraph(n, 0.1, seed, acyclic=acyclic)
    c = graph_to_circuit(g)
    h = circuit_shortcut_to_graph(g, c)
    assert graph_tc_equal(g, h).equal
    assert closure_on(g, range(n)) == closure_on(h, range(n))
    if acyclic:
        assert c.size == g.num_edges() + 2 * n


@given(st.integers(2, 20), st.integers(0, 10**6))
def test_layered_roundtrip_preserves_closure(n, seed):
    g = random_digraph(n, 0.15, seed)
    layered = layer_circuit(graph_to_circuit(g))
    assert graph_tc_equal(g, circuit_shortcut_to_graph(g, layered)).equal


def test_mismatched_circuit_is_rejected():
    g = ExplicitGraph(3, [(0, 1), (1, 2)])
    c = graph_to_circuit(g)
    broken = OrCircuit(c.num_gates, c.inputs, c.outputs, c.wires[1:])
    with pytest.raises(ContractViolation, match="witness"):
        circuit_shortcut_to_graph(g, broken)


def test_layer_diameter_one_circuit():
    c = OrCircuit(4, [0, 1], [2, 3], [(0, 2), (1, 3), (0, 3)])
    layered = layer_circuit(c)
    assert c.diameter() == 1
    assert layered.num_gates == 4 and sorted(layered.wires) == sorted(c.wires)


def test_layer_single_internal_gate():
    c = OrCircuit(5, [0, 1], [3, 4], [(0, 2), (1, 2), (2, 3), (2, 4)])
    layered = layer_circuit(c)
    assert c.diameter() == 2
    assert layered.depth() <= 3
    assert circuits_equivalent(c, layered)


@given(st.integers(1, 4), st.integers(1, 12), st.integers(1, 4), st.integers(0, 10**6))
def test_layering_properties(a, m, b, seed):
    c = random_circuit(a, m, b, 0.3, seed)
    layered = layer_circuit(c)
    D = c.diameter()
    assert circuits_equivalent(c, layered)
    assert layered.depth() <= D + 1
    assert layered.depth() <= c.longest_io_path() + 1
    assert layered.size <= max(D, 1) * (c.size + c.num_gates)


def test_equivalence_examples():
    c = OrCircuit(4, [0, 1], [2, 3], [(0, 2), (1, 3)])
    assert circuits_equivalent(c, c)
    more = OrCircuit(4, [0, 1], [2, 3], [(0, 2), (1, 3), (0, 3)])
    assert not circuits_equivalent(c, more)
    relabeled = OrCircuit(4, [0, 1], [2, 3], [(0, 2), (1, 3)], input_labels=["a", "b"])
    with pytest.raises(ContractViolation):
        circuits_equivalent(c, relabeled)


def test_single_hot_law():
    """The output on any input is the OR of the single-hot outputs."""
    rng = random.Random(5)
    for i in range(100):
        c = random_circuit(rng.randint(1, 6), rng.randint(1, 10), rng.randint(1, 6), 0.3, i)
        a = len(c.inputs)
        singles = [eval_circuit(c, [int(j == h) for j in range(a)]) for h in range(a)]
        for _ in range(100):
            x = [rng.randint(0, 1) for _ in range(a)]
            want = [any(singles[h][o] for h in range(a) if x[h]) for o in range(len(c.outputs))]
            assert eval_circuit(c, x) == want


def test_json_roundtrip():
    c = _chain()
    again = OrCircuit.from_dict(c.as_dict())
    assert again.as_dict() == c.as_dict()
