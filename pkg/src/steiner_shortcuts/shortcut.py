"""Steiner shortcut sets and the augmented graph G₊ = G ∪ shortcut.

Steiner vertices get ids ``base_n .. base_n + num_steiner - 1`` so the
original ids keep their meaning in G₊. Every shortcut edge carries a kind
label recording which group of the construction produced it.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Iterable, Iterator, Sequence

from .errors import ContractViolation
from .graph import LayeredGraph


class ShortcutSet:
    """Base class. Subclasses implement ``rule_out``/``rule_in`` and
    ``edge_sources`` (a superset of vertices that have shortcut out-edges)."""

    base_n: int
    num_steiner: int
    kinds: tuple[str, ...]
    coding: dict

    def rule_out(self, v: int) -> list[tuple[str, int]]:
        raise NotImplementedError

    def rule_in(self, v: int) -> list[tuple[str, int]]:
        raise NotImplementedError

    def edge_sources(self) -> Iterable[int]:
        return range(self.base_n + self.num_steiner)

    def steiner_layer(self, v: int) -> int | None:
        """Index of the Steiner layer holding ``v`` (None for originals)."""
        return 0 if self.is_steiner(v) else None

    def describe_steiner(self, v: int) -> dict:
        return {"id": v}

    def is_steiner(self, v: int) -> bool:
        return self.base_n <= v < self.base_n + self.num_steiner

    def steiner_vertices(self) -> range:
        return range(self.base_n, self.base_n + self.num_steiner)

    def out(self, v: int) -> list[tuple[str, int]]:
        return self.rule_out(v)

    def into(self, v: int) -> list[tuple[str, int]]:
        return self.rule_in(v)

    def edges(self) -> Iterator[tuple[int, int, str]]:
        for u in self.edge_sources():
            for kind, w in self.out(u):
                yield u, w, kind

    def edge_counts(self) -> dict[str, int]:
        counts = {kind: 0 for kind in self.kinds}
        for _, _, kind in self.edges():
            counts[kind] = counts.get(kind, 0) + 1
        return counts

    def num_edges(self) -> int:
        return sum(self.edge_counts().values())

    def with_edges(self, extra: Sequence[tuple[int, int]], kind: str = "injected") -> "PatchedShortcut":
        return PatchedShortcut(self, extra, kind)


class PatchedShortcut(ShortcutSet):
    """A shortcut with additional hand-placed edges (used for negative controls)."""

    def __init__(self, inner: ShortcutSet, extra: Sequence[tuple[int, int]], kind: str):
        self.inner = inner
        self.base_n = inner.base_n
        self.num_steiner = inner.num_steiner
        self.kinds = inner.kinds + ((kind,) if kind not in inner.kinds else ())
        self.coding = dict(inner.coding)
        self._out: dict[int, list[tuple[str, int]]] = defaultdict(list)
        self._in: dict[int, list[tuple[str, int]]] = defaultdict(list)
        total = self.base_n + self.num_steiner
        for u, w in extra:
            if not (0 <= u < total and 0 <= w < total):
                raise ContractViolation(f"injected edge ({u}, {w}) out of range")
            self._out[u].append((kind, w))
            self._in[w].append((kind, u))

    def rule_out(self, v):
        return self.inner.out(v) + self._out.get(v, [])

    def rule_in(self, v):
        return self.inner.into(v) + self._in.get(v, [])

    def edge_sources(self):
        seen = set()
        for u in self.inner.edge_sources():
            seen.add(u)
            yield u
        for u in sorted(self._out):
            if u not in seen:
                yield u

    def steiner_layer(self, v):
        return self.inner.steiner_layer(v)

    def describe_steiner(self, v):
        return self.inner.describe_steiner(v)


class ExplicitShortcut(ShortcutSet):
    """Shortcut given as an explicit edge list (e.g. loaded from JSON)."""

    def __init__(
        self,
        base_n: int,
        num_steiner: int,
        edges: Iterable[tuple[int, int, str]],
        steiner_layers: Sequence[int] | None = None,
        coding: dict | None = None,
    ):
        self.base_n = base_n
        self.num_steiner = num_steiner
        self._out: dict[int, list[tuple[str, int]]] = defaultdict(list)
        self._in: dict[int, list[tuple[str, int]]] = defaultdict(list)
        kinds: dict[str, None] = {}
        total = base_n + num_steiner
        for u, w, kind in edges:
            if not (0 <= u < total and 0 <= w < total):
                raise ContractViolation(f"shortcut edge ({u}, {w}) out of range")
            kinds.setdefault(kind)
            self._out[u].append((kind, w))
            self._in[w].append((kind, u))
        self.kinds = tuple(kinds)
        self._layers = list(steiner_layers) if steiner_layers is not None else None
        self.coding = dict(coding or {"family": "explicit"})

    def rule_out(self, v):
        return list(self._out.get(v, ()))

    def rule_in(self, v):
        return list(self._in.get(v, ()))

    def edge_sources(self):
        return sorted(self._out)

    def steiner_layer(self, v):
        if not self.is_steiner(v):
            return None
        return 0 if self._layers is None else self._layers[v - self.base_n]


class AugmentedGraph(LayeredGraph):
    """G₊: the base graph's edges followed by the shortcut's edges."""

    def __init__(self, base: LayeredGraph, shortcut: ShortcutSet):
        if shortcut.base_n != base.n:
            raise ContractViolation("shortcut was built for a graph of a different size")
        self.base = base
        self.shortcut = shortcut
        self.n = base.n + shortcut.num_steiner
        self.layer_sizes = base.layer_sizes
        self.coding = dict(base.coding, shortcut=shortcut.coding.get("family", "shortcut"))

    def out_neighbors(self, v):
        own = self.base.out_neighbors(v) if v < self.base.n else []
        return own + [w for _, w in self.shortcut.out(v)]

    def out_edges(self, v):
        return list(enumerate(self.out_neighbors(v)))

    def in_neighbors(self, v):
        own = self.base.in_neighbors(v) if v < self.base.n else []
        return own + [u for _, u in self.shortcut.into(v)]

    def in_edges(self, v):
        out = []
        for u in self.in_neighbors(v):
            for slot, w in self.out_edges(u):
                if w == v:
                    out.append((slot, u))
        return sorted(set(out), key=lambda e: (e[1], e[0]))

    def is_steiner(self, v):
        return v >= self.base.n

    def layer_of(self, v):
        return None if v >= self.base.n else self.base.layer_of(v)

    @property
    def num_original(self):
        return self.base.n

    def steiner_vertices(self):
        return iter(range(self.base.n, self.n))


def augment(base: LayeredGraph, shortcut: ShortcutSet) -> AugmentedGraph:
    return AugmentedGraph(base, shortcut)
