"""Monotone OR-circuits as reachability objects.

A circuit's function is fixed by which inputs reach which outputs, so
equivalence reduces to comparing reachability matrices. This module also
converts graphs to wrapper circuits (and shortcut circuits back to Steiner
graphs) and implements the layering transform that bounds depth by the
input-to-output diameter.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .errors import ContractViolation
from .graph import ExplicitGraph, compare_closures, TcComparison, tarjan_scc


@dataclass
class OrCircuit:
    """Gates ``0..num_gates-1``; ``inputs``/``outputs`` list gate ids in label order."""

    num_gates: int
    inputs: list[int]
    outputs: list[int]
    wires: list[tuple[int, int]]
    input_labels: list[str] = field(default_factory=list)
    output_labels: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.input_labels:
            self.input_labels = [f"x{i + 1}" for i in range(len(self.inputs))]
        if not self.output_labels:
            self.output_labels = [f"y{i + 1}" for i in range(len(self.outputs))]
        for u, v in self.wires:
            if not (0 <= u < self.num_gates and 0 <= v < self.num_gates):
                raise ContractViolation(f"wire ({u}, {v}) outside gate range")
        self._succ: list[list[int]] = [[] for _ in range(self.num_gates)]
        for u, v in self.wires:
            self._succ[u].append(v)
        if self._topo() is None:
            raise ContractViolation("circuit wires contain a cycle")

    def succ(self, g: int) -> list[int]:
        return self._succ[g]

    @property
    def size(self) -> int:
        return len(self.wires)

    def internal_gates(self) -> list[int]:
        io = set(self.inputs) | set(self.outputs)
        return [g for g in range(self.num_gates) if g not in io]

    def _topo(self) -> list[int] | None:
        indeg = [0] * self.num_gates
        for _, v in self.wires:
            indeg[v] += 1
        queue = deque(g for g in range(self.num_gates) if indeg[g] == 0)
        order = []
        while queue:
            g = queue.popleft()
            order.append(g)
            for w in self._succ[g]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    queue.append(w)
        return order if len(order) == self.num_gates else None

    def check_io_shape(self) -> None:
        """Every internal gate has both incoming and outgoing wires."""
        has_in = [False] * self.num_gates
        for _, v in self.wires:
            has_in[v] = True
        io = set(self.inputs) | set(self.outputs)
        for g in range(self.num_gates):
            if g in io:
                continue
            if not has_in[g]:
                raise ContractViolation(f"gate {g} has no input wires but is not an input")
            if not self._succ[g]:
                raise ContractViolation(f"gate {g} has no output wires but is not an output")

    def depth(self) -> int:
        """Longest path, in wires."""
        longest = [0] * self.num_gates
        for g in self._topo():
            for w in self._succ[g]:
                longest[w] = max(longest[w], longest[g] + 1)
        return max(longest, default=0)

    def distances_from(self, src: int) -> dict[int, int]:
        dist = {src: 0}
        queue = deque([src])
        while queue:
            g = queue.popleft()
            for w in self._succ[g]:
                if w not in dist:
                    dist[w] = dist[g] + 1
                    queue.append(w)
        return dist

    def diameter(self) -> int:
        """Largest input-to-output hop distance over connected pairs."""
        outs = set(self.outputs)
        best = 0
        for s in self.inputs:
            for g, dd in self.distances_from(s).items():
                if g in outs and g != s:
                    best = max(best, dd)
        return best

    def longest_io_path(self) -> int:
        """Longest input-to-output path, in wires; at least ``diameter()``."""
        ins, outs = set(self.inputs), set(self.outputs)
        longest: list[int | None] = [0 if g in ins else None for g in range(self.num_gates)]
        for g in self._topo():
            if longest[g] is None:
                continue
            for w in self._succ[g]:
                if longest[w] is None or longest[w] < longest[g] + 1:
                    longest[w] = longest[g] + 1
        return max((longest[g] for g in outs if longest[g]), default=0)

    def as_dict(self) -> dict:
        return {
            "inputs": list(self.inputs),
            "outputs": list(self.outputs),
            "gates": self.num_gates,
            "wires": [list(w) for w in self.wires],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "OrCircuit":
        return cls(data["gates"], list(data["inputs"]), list(data["outputs"]),
                   [tuple(w) for w in data["wires"]])


def eval_circuit(c: OrCircuit, assignment: Sequence[int | bool]) -> list[bool]:
    """Propagate OR values forward in topological order."""
    if len(assignment) != len(c.inputs):
        raise ContractViolation(f"expected {len(c.inputs)} input bits, got {len(assignment)}")
    value = [False] * c.num_gates
    for g, bit in zip(c.inputs, assignment):
        value[g] = value[g] or bool(bit)
    for g in c._topo():
        if value[g]:
            for w in c.succ(g):
                value[w] = True
    return [value[g] for g in c.outputs]


def reachability_function(c: OrCircuit) -> tuple[tuple[bool, ...], ...]:
    """Entry (a, b) is True iff input a reaches output b."""
    rows = []
    for s in c.inputs:
        reach = c.distances_from(s)
        rows.append(tuple(t in reach for t in c.outputs))
    return tuple(rows)


def circuits_equivalent(c1: OrCircuit, c2: OrCircuit) -> bool:
    if c1.input_labels != c2.input_labels or c1.output_labels != c2.output_labels:
        raise ContractViolation("circuits have different input/output labels")
    return reachability_function(c1) == reachability_function(c2)


def first_difference(c1: OrCircuit, c2: OrCircuit) -> tuple[int, int] | None:
    m1, m2 = reachability_function(c1), reachability_function(c2)
    for a, (r1, r2) in enumerate(zip(m1, m2)):
        for b, (x, y) in enumerate(zip(r1, r2)):
            if x != y:
                return a, b
    return None


# --------------------------------------------------------------------------
# graphs <-> circuits


@dataclass
class Condensation:
    dag: ExplicitGraph
    mapping: list[int]
    components: list[list[int]]


def scc_contract(g: ExplicitGraph) -> Condensation:
    """Condensation DAG; components are numbered by their smallest vertex,
    so an acyclic input maps to itself."""
    comps = tarjan_scc(g.n, g.out_neighbors)
    comps.sort(key=min)
    mapping = [0] * g.n
    for ci, comp in enumerate(comps):
        for v in comp:
            mapping[v] = ci
    edges: dict[tuple[int, int], None] = {}
    for u in range(g.n):
        for w in g.out_neighbors(u):
            a, b = mapping[u], mapping[w]
            if a != b:
                edges.setdefault((a, b))
    return Condensation(ExplicitGraph(len(comps), list(edges)), mapping, comps)


def graph_to_circuit(g: ExplicitGraph) -> OrCircuit:
    """Wrapper circuit: inputs s_1..s_n, outputs t_1..t_n, internal gates are
    the strongly connected components, and s_i -> [v_i] -> t_i.

    Gate layout: inputs 0..n-1, outputs n..2n-1, component c at 2n + c.
    """
    cond = scc_contract(g)
    n = g.n
    wires = [(2 * n + a, 2 * n + b) for a, b in cond.dag.edges()]
    for i in range(n):
        wires.append((i, 2 * n + cond.mapping[i]))
        wires.append((2 * n + cond.mapping[i], n + i))
    return OrCircuit(2 * n + cond.dag.n, list(range(n)), list(range(n, 2 * n)), wires)


def circuit_shortcut_to_graph(g: ExplicitGraph, c_prime: OrCircuit) -> ExplicitGraph:
    """Steiner graph H on V(g) plus one Steiner vertex per gate of ``c_prime``,
    with edges E(C') and v_i -> s_i, t_i -> v_i."""
    ref = graph_to_circuit(g)
    if len(c_prime.inputs) != g.n or len(c_prime.outputs) != g.n:
        raise ContractViolation("circuit must have one input and one output per vertex")
    diff = first_difference(ref, c_prime)
    if diff is not None:
        raise ContractViolation(f"circuit computes a different function; witness (s{diff[0] + 1}, t{diff[1] + 1})")
    n = g.n
    edges = [(n + a, n + b) for a, b in c_prime.wires]
    for i in range(n):
        edges.append((i, n + c_prime.inputs[i]))
        edges.append((n + c_prime.outputs[i], i))
    return ExplicitGraph(n + c_prime.num_gates, edges, steiner=range(n, n + c_prime.num_gates))


def graph_tc_equal(g: ExplicitGraph, h: ExplicitGraph) -> TcComparison:
    n = g.n
    return compare_closures(g, h, lambda v: v < n, mode="full")


def layer_circuit(c: OrCircuit) -> OrCircuit:
    """Copies V_1..V_D of the internal gates (D = diameter). Wires: input ->
    V_1, V_D -> output, direct input -> output, shifted internal wires
    V_i -> V_{i+1}, and carries v_i -> v_{i+1}."""
    c.check_io_shape()
    ins, outs = set(c.inputs), set(c.outputs)
    if ins & outs:
        raise ContractViolation("a gate cannot be both an input and an output")
    for u, v in c.wires:
        if v in ins:
            raise ContractViolation("input gates must not have incoming wires")
        if u in outs:
            raise ContractViolation("output gates must not have outgoing wires")
    D = c.diameter()
    internal = c.internal_gates()
    a, b = len(c.inputs), len(c.outputs)
    new_id: dict[int, int] = {}
    for i, g in enumerate(c.inputs):
        new_id[g] = i
    for i, g in enumerate(c.outputs):
        new_id[g] = a + i
    pos = {g: i for i, g in enumerate(internal)}
    base = a + b

    def copy(g: int, layer: int) -> int:
        return base + (layer - 1) * len(internal) + pos[g]

    wires: list[tuple[int, int]] = []
    for u, v in c.wires:
        if u in ins and v in outs:
            wires.append((new_id[u], new_id[v]))
        elif u in ins:
            if D >= 1:
                wires.append((new_id[u], copy(v, 1)))
        elif v in outs:
            if D >= 1:
                wires.append((copy(u, D), new_id[v]))
        else:
            for layer in range(1, D):
                wires.append((copy(u, layer), copy(v, layer + 1)))
    for g in internal:
        for layer in range(1, D):
            wires.append((copy(g, layer), copy(g, layer + 1)))
    total = base + D * len(internal)
    return OrCircuit(total, list(range(a)), list(range(a, a + b)), wires,
                     list(c.input_labels), list(c.output_labels))


# --------------------------------------------------------------------------
# random instances


def random_digraph(n: int, density: float, seed: int, acyclic: bool = False) -> ExplicitGraph:
    rng = random.Random(seed)
    edges = []
    for u in range(n):
        for v in range(n):
            if u == v or (acyclic and v < u):
                continue
            if rng.random() < density:
                edges.append((u, v))
    return ExplicitGraph(n, edges)


def random_circuit(
    n_inputs: int, n_internal: int, n_outputs: int, density: float, seed: int
) -> OrCircuit:
    """Random layered-free OR circuit: inputs feed internal gates and outputs,
    internal gates feed later internal gates and outputs."""
    rng = random.Random(seed)
    a, m, b = n_inputs, n_internal, n_outputs
    inputs = list(range(a))
    internal = list(range(a, a + m))
    outputs = list(range(a + m, a + m + b))
    wires = []
    for u in inputs:
        for v in internal + outputs:
            if rng.random() < density:
                wires.append((u, v))
    for i, u in enumerate(internal):
        for v in internal[i + 1:] + outputs:
            if rng.random() < density:
                wires.append((u, v))
    # keep every internal gate wired in and out so the I/O shape holds
    has_in = {v for _, v in wires}
    has_out = {u for u, _ in wires}
    for i, g in enumerate(internal):
        if g not in has_in:
            wires.append((rng.choice(inputs + internal[:i]), g))
        if g not in has_out:
            wires.append((g, rng.choice(internal[i + 1:] + outputs)))
    return OrCircuit(a + m + b, inputs, outputs, wires)
