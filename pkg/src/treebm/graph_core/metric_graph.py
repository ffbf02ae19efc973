"""Finite metric graphs: loading, normalization and the directed-edge encoding.

Directed edge ``d`` of undirected edge ``i`` is ``2*i`` (stored orientation) or
``2*i + 1`` (reversed), so reversal is ``d ^ 1``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from functools import cached_property
from pathlib import Path

from ..errors import GraphFormatError, ValenceError

Path_ = tuple[int, ...]


def parse_length(raw) -> tuple[Fraction, bool]:
    """Parse an edge length. Returns ``(value, exact)``.

    Integers and ``"p/q"`` strings are exact; decimals are stored as the exact
    rational value of the decimal string but flagged inexact.
    """
    if isinstance(raw, bool):
        raise GraphFormatError(f"bad length {raw!r}")
    if isinstance(raw, int):
        value, exact = Fraction(raw), True
    elif isinstance(raw, float):
        value, exact = Fraction(Decimal(repr(raw))), False
    elif isinstance(raw, str):
        text = raw.strip()
        try:
            if "/" in text or text.lstrip("+-").isdigit():
                value, exact = Fraction(text), True
            else:
                value, exact = Fraction(Decimal(text)), False
        except (ValueError, ZeroDivisionError, InvalidOperation) as exc:
            raise GraphFormatError(f"bad length {raw!r}") from exc
    else:
        raise GraphFormatError(f"bad length {raw!r}")
    if value <= 0:
        raise GraphFormatError(f"edge length must be positive, got {raw!r}")
    return value, exact


def reverse_path(path: Path_) -> Path_:
    return tuple(d ^ 1 for d in reversed(path))


def reduce_path(path) -> Path_:
    """Free reduction: cancel every ``d`` immediately followed by ``d ^ 1``."""
    out: list[int] = []
    for d in path:
        if out and out[-1] == d ^ 1:
            out.pop()
        else:
            out.append(d)
    return tuple(out)


def concat(p: Path_, q: Path_) -> Path_:
    # reduced inputs only need cancellation at the seam
    i = 0
    n = min(len(p), len(q))
    while i < n and p[len(p) - 1 - i] == q[i] ^ 1:
        i += 1
    return p[: len(p) - i] + q[i:]


@dataclass(frozen=True)
class MetricGraph:
    """Connected metric graph with every vertex of valence >= 3.

    Use :meth:`build` (or :func:`load_graph`) rather than the constructor: it
    merges valence-2 vertices and rejects inputs outside the model. Vertex 0 is
    the base vertex; ends and tree points are addressed from its lift.
    """

    n_vertices: int
    endpoints: tuple[tuple[int, int], ...]
    lengths: tuple[Fraction, ...]
    inexact: bool = False
    merged: int = field(default=0, compare=False)

    @classmethod
    def build(cls, n_vertices: int, edges, inexact: bool = False) -> "MetricGraph":
        """Normalize ``edges`` (iterable of ``(u, v, length)``) into a graph."""
        live = {}
        for i, (u, v, length) in enumerate(edges):
            if not (0 <= u < n_vertices and 0 <= v < n_vertices):
                raise GraphFormatError(f"edge {i} references a missing vertex")
            length = Fraction(length)
            if length <= 0:
                raise GraphFormatError(f"edge {i} has non-positive length")
            live[i] = (u, v, length)
        vertices = list(range(n_vertices))
        merged = 0
        while True:
            incid: dict[int, list[int]] = {v: [] for v in vertices}
            for i, (u, v, _) in live.items():
                incid[u].append(i)
                incid[v].append(i)
            deg2 = None
            for v in vertices:
                k = len(incid[v])
                if k == 1:
                    raise ValenceError(f"vertex {v} has valence 1")
                if k == 0 and len(vertices) > 1:
                    raise ValenceError(f"vertex {v} is isolated")
                if k == 2 and deg2 is None:
                    deg2 = v
            if deg2 is None:
                break
            i, j = incid[deg2]
            if i == j:
                raise ValenceError("graph has a circle component (boundary would have 2 points)")
            ui, vi, li = live.pop(i)
            uj, vj, lj = live.pop(j)
            x = vi if ui == deg2 else ui
            y = vj if uj == deg2 else uj
            live[min(i, j)] = (x, y, li + lj)
            vertices.remove(deg2)
            merged += 1
        if not live:
            raise ValenceError("graph has no edges")
        renum = {v: k for k, v in enumerate(vertices)}
        ordered = [live[i] for i in sorted(live)]
        g = cls(
            n_vertices=len(vertices),
            endpoints=tuple((renum[u], renum[v]) for u, v, _ in ordered),
            lengths=tuple(length for _, _, length in ordered),
            inexact=inexact,
            merged=merged,
        )
        if len(g.tree_paths) != g.n_vertices:
            raise ValenceError("graph is disconnected")
        return g

    # ------------------------------------------------------------------ edges
    @property
    def n_edges(self) -> int:
        return len(self.endpoints)

    @property
    def n_directed(self) -> int:
        return 2 * len(self.endpoints)

    @property
    def rank(self) -> int:
        """Rank of the free fundamental group, |E| - |V| + 1."""
        return self.n_edges - self.n_vertices + 1

    def tail(self, d: int) -> int:
        u, v = self.endpoints[d >> 1]
        return v if d & 1 else u

    def head(self, d: int) -> int:
        u, v = self.endpoints[d >> 1]
        return u if d & 1 else v

    def length(self, d: int) -> Fraction:
        return self.lengths[d >> 1]

    def path_length(self, path) -> Fraction:
        return sum((self.lengths[d >> 1] for d in path), Fraction(0))

    @cached_property
    def out_edges(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for d in range(self.n_directed):
            out[self.tail(d)].append(d)
        return tuple(tuple(x) for x in out)

    @cached_property
    def successors(self) -> tuple[tuple[int, ...], ...]:
        """Admissible non-backtracking successors of each directed edge."""
        return tuple(
            tuple(f for f in self.out_edges[self.head(d)] if f != d ^ 1)
            for d in range(self.n_directed)
        )

    def edge_label(self, d: int) -> str:
        """Readable name: generator letter for non-tree edges, ``t<i>`` otherwise."""
        i = d >> 1
        if i in self.generator_index:
            name = _letter(self.generator_index[i])
            return name.upper() if d & 1 else name
        return f"t{i}" + ("'" if d & 1 else "")

    # ---------------------------------------------------------- spanning tree
    @cached_property
    def tree_paths(self) -> dict[int, Path_]:
        """Reduced path in the BFS spanning tree from the base vertex to each vertex."""
        paths: dict[int, Path_] = {0: ()}
        queue = [0]
        while queue:
            nxt = []
            for v in queue:
                for d in self.out_edges[v]:
                    w = self.head(d)
                    if w not in paths:
                        paths[w] = paths[v] + (d,)
                        nxt.append(w)
            queue = nxt
        return paths

    @cached_property
    def tree_edges(self) -> frozenset[int]:
        return frozenset(d >> 1 for p in self.tree_paths.values() for d in p)

    @cached_property
    def generators(self) -> tuple[int, ...]:
        """Undirected edge index of each free generator, in edge order."""
        return tuple(i for i in range(self.n_edges) if i not in self.tree_edges)

    @cached_property
    def generator_index(self) -> dict[int, int]:
        return {e: k for k, e in enumerate(self.generators)}

    def generator_loop(self, letter: int) -> Path_:
        """Reduced closed path at the base vertex representing a signed letter."""
        i = self.generators[abs(letter) - 1]
        u, v = self.endpoints[i]
        loop = concat(concat(self.tree_paths[u], (2 * i,)), reverse_path(self.tree_paths[v]))
        return loop if letter > 0 else reverse_path(loop)

    def scaled(self, factor) -> "MetricGraph":
        factor = Fraction(factor)
        return MetricGraph(
            self.n_vertices,
            self.endpoints,
            tuple(length * factor for length in self.lengths),
            self.inexact,
        )

    def to_json(self) -> dict:
        return {
            "vertices": self.n_vertices,
            "edges": [
                {"from": u, "to": v, "len": str(length)}
                for (u, v), length in zip(self.endpoints, self.lengths)
            ],
        }


def _letter(k: int) -> str:
    return chr(ord("a") + k) if k < 26 else f"g{k}"


def rose(*lengths, inexact: bool = False) -> MetricGraph:
    """Bouquet of loops at one vertex with the given lengths."""
    parsed = []
    for raw in lengths:
        if isinstance(raw, (str, float)):
            value, exact = parse_length(raw)
            inexact = inexact or not exact
            parsed.append(value)
        else:
            parsed.append(Fraction(raw))
    return MetricGraph.build(1, [(0, 0, length) for length in parsed], inexact=inexact)


def graph_from_dict(data: dict) -> MetricGraph:
    try:
        n = data["vertices"]
        raw_edges = data["edges"]
    except (KeyError, TypeError) as exc:
        raise GraphFormatError("graph needs 'vertices' and 'edges'") from exc
    if not isinstance(n, int) or n < 1 or not isinstance(raw_edges, list):
        raise GraphFormatError("'vertices' must be a positive int and 'edges' a list")
    edges = []
    inexact = False
    for item in raw_edges:
        try:
            u, v, raw = item["from"], item["to"], item["len"]
        except (KeyError, TypeError) as exc:
            raise GraphFormatError(f"bad edge record {item!r}") from exc
        if not isinstance(u, int) or not isinstance(v, int):
            raise GraphFormatError(f"bad edge endpoints {item!r}")
        length, exact = parse_length(raw)
        inexact = inexact or not exact
        edges.append((u, v, length))
    return MetricGraph.build(n, edges, inexact=inexact)


def load_graph(path) -> MetricGraph:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise GraphFormatError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"{path} is not valid JSON: {exc}") from exc
    return graph_from_dict(data)
