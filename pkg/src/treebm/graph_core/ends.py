"""Ends of the cover tree and cylinder sets of ends.

An end is the infinite non-backtracking directed-edge path from the base
vertex toward it. Exactly represented ends are eventually periodic
(``prefix`` then ``period`` repeated forever) and stored in a canonical form,
so equality of ends is equality of dataclasses. Truncated ends keep only a
finite path and refuse questions they cannot answer.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import InsufficientDepth
from .metric_graph import MetricGraph, Path_, concat, reduce_path
from .words import Word, cyclic_reduction


@dataclass(frozen=True)
class End:
    prefix: Path_
    period: Path_ | None = None

    @property
    def approximate(self) -> bool:
        return self.period is None

    @property
    def depth(self) -> int | None:
        return None if self.period is None else len(self.prefix)

    def edge(self, i: int) -> int:
        if i < len(self.prefix):
            return self.prefix[i]
        if self.period is None:
            raise InsufficientDepth(f"truncated end of depth {len(self.prefix)} has no edge {i}")
        return self.period[(i - len(self.prefix)) % len(self.period)]

    def head(self, n: int) -> Path_:
        """First ``n`` edges of the ray from the base vertex."""
        if n <= len(self.prefix):
            return self.prefix[:n]
        if self.period is None:
            raise InsufficientDepth(f"truncated end of depth {len(self.prefix)}, need {n}")
        k, r = divmod(n - len(self.prefix), len(self.period))
        return self.prefix + self.period * k + self.period[:r]

    def common_prefix(self, path: Path_) -> int:
        """Length of the longest common prefix of the ray and ``path``.

        Raises InsufficientDepth when a truncated ray agrees with ``path`` on
        its whole stored length but ``path`` continues beyond it.
        """
        n = len(path)
        if self.period is None and len(self.prefix) < n:
            k = _lcp(self.prefix, path)
            if k == len(self.prefix):
                raise InsufficientDepth("truncated end cannot resolve the merge point")
            return k
        return _lcp(self.head(n), path)

    def truncate(self, depth: int) -> "End":
        return End(self.head(depth), None)

    def label(self, g: MetricGraph) -> str:
        pre = " ".join(g.edge_label(d) for d in self.prefix)
        if self.period is None:
            return f"[{pre} ...]"
        per = " ".join(g.edge_label(d) for d in self.period)
        return f"{pre}:({per})" if pre else f"({per})"


def _lcp(p, q) -> int:
    n = min(len(p), len(q))
    i = 0
    while i < n and p[i] == q[i]:
        i += 1
    return i


def make_end(g: MetricGraph, prefix: Path_, period: Path_) -> End:
    """Canonical eventually periodic end for ``prefix`` followed by ``period`` forever.

    ``prefix`` is any path from the base vertex (it is reduced here); ``period``
    must be a nonempty closed path at its endpoint whose square is non-backtracking.
    """
    period = tuple(period)
    if not period:
        raise ValueError("period must be nonempty")
    for a, b in zip(period, period[1:] + period[:1]):
        if g.head(a) != g.tail(b) or b == a ^ 1:
            raise ValueError("period is not a cyclically non-backtracking closed path")
    q = list(reduce_path(prefix))
    start = g.head(q[-1]) if q else 0
    if start != g.tail(period[0]):
        raise ValueError("period does not start where the prefix ends")
    while q and q[-1] == period[0] ^ 1:
        q.pop()
        period = period[1:] + period[:1]
    while q and q[-1] == period[-1]:
        q.pop()
        period = period[-1:] + period[:-1]
    n = len(period)
    for d in range(1, n + 1):
        if n % d == 0 and period[:d] * (n // d) == period:
            period = period[:d]
            break
    return End(tuple(q), period)


def act_on_end(g: MetricGraph, word: Word, xi: End) -> End:
    """Image of an end under a deck transformation."""
    moved = concat(word.loop(g), xi.prefix)
    if xi.period is None:
        return End(moved, None)
    return make_end(g, moved, xi.period)


def end_from_words(g: MetricGraph, prefix: Word, period: Word) -> End:
    """The end ``prefix . period^{+inf}``, i.e. the limit of ``prefix period^n`` (base vertex)."""
    loop = period.loop(g)
    if not loop:
        raise ValueError("period word must be nontrivial")
    c, k = cyclic_reduction(loop)
    return make_end(g, concat(prefix.loop(g), c), k)


_END_RE = re.compile(r"^\s*([A-Za-z]*)\s*:?\s*\(\s*([A-Za-z]+)\s*\)\s*$")


def parse_end(g: MetricGraph, text: str) -> End:
    """Parse ``prefix:(period)`` syntax, e.g. ``a:(b)`` for a.b^inf or ``(A)`` for a^-inf."""
    m = _END_RE.match(text)
    if not m:
        raise ValueError(f"bad end expression {text!r}; expected prefix:(period)")
    prefix = Word.parse(m.group(1))
    period = Word.parse(m.group(2))
    for x in prefix.letters + period.letters:
        if abs(x) > g.rank:
            raise ValueError(f"letter out of range in {text!r} (rank {g.rank})")
    return end_from_words(g, prefix, period)


def greedy_ray(g: MetricGraph, first: int) -> tuple[Path_, Path_]:
    """Deterministic non-backtracking continuation of ``first``: ``(transient, cycle)``."""
    seen: dict[int, int] = {}
    walk = []
    d = first
    while d not in seen:
        seen[d] = len(walk)
        walk.append(d)
        d = g.successors[d][0]
    j = seen[d]
    return tuple(walk[:j]), tuple(walk[j:])


@dataclass(frozen=True)
class EndCylinder:
    """Ends whose ray from vertex ``base`` starts with ``path``.

    An empty ``path`` is the full-boundary marker. Every nonempty cylinder is
    the set of ends beyond a single directed tree edge (its :func:`cone`).
    """

    base: Path_
    path: Path_

    def __post_init__(self):
        for a, b in zip(self.path, self.path[1:]):
            if b == a ^ 1:
                raise ValueError("cylinder path backtracks")

    @property
    def depth(self) -> int:
        return len(self.path)


@dataclass(frozen=True)
class Cone:
    """Ends beyond the lift of directed edge ``edge`` leaving tree vertex ``tail``."""

    tail: Path_
    edge: int

    @property
    def towards_root(self) -> bool:
        return bool(self.tail) and self.edge == self.tail[-1] ^ 1

    @property
    def head(self) -> Path_:
        return self.tail[:-1] if self.towards_root else self.tail + (self.edge,)

    def reverse(self) -> "Cone":
        return Cone(self.head, self.edge ^ 1)

    def contains(self, xi: End) -> bool:
        if self.towards_root:
            return xi.head(len(self.tail)) != self.tail
        return xi.head(len(self.tail) + 1) == self.tail + (self.edge,)

    # A cone is either a root cylinder R(head) (edge points away from the root)
    # or the complement C(tail) of the root cylinder at its tail.
    def contains_cone(self, other: "Cone") -> bool:
        """Set inclusion: ``other`` is a subset of ``self``."""
        if not self.towards_root:
            return not other.towards_root and other.head[: len(self.head)] == self.head
        t = self.tail
        if other.towards_root:
            return t[: len(other.tail)] == other.tail
        h = other.head
        k = min(len(h), len(t))
        return h[:k] != t[:k]

    def disjoint(self, other: "Cone") -> bool:
        if self.towards_root and other.towards_root:
            return False
        if self.towards_root:
            return other.head[: len(self.tail)] == self.tail
        if other.towards_root:
            return self.head[: len(other.tail)] == other.tail
        a, b = self.head, other.head
        k = min(len(a), len(b))
        return a[:k] != b[:k]

    def children(self, g: MetricGraph) -> list["Cone"]:
        h = self.head
        return [Cone(h, f) for f in g.successors[self.edge]]

    def representative(self, g: MetricGraph) -> End:
        """A canonical exactly represented end inside the cone."""
        trans, cyc = greedy_ray(g, self.edge)
        return make_end(g, concat(self.tail, trans), cyc)


def cone_of(g: MetricGraph, cyl: EndCylinder) -> Cone:
    if not cyl.path:
        raise ValueError("full-boundary marker is not a cone")
    v = cyl.base
    vertex = g.head(v[-1]) if v else 0
    if g.tail(cyl.path[0]) != vertex:
        raise ValueError("cylinder path does not start at its base vertex")
    tail = v
    for d in cyl.path[:-1]:
        tail = concat(tail, (d,))
    return Cone(tail, cyl.path[-1])


def cylinder_of(cone: Cone) -> EndCylinder:
    return EndCylinder(cone.tail, (cone.edge,))


def cylinders_at_depth(g: MetricGraph, base: Path_, depth: int) -> list[EndCylinder]:
    """All depth-``depth`` cylinders based at vertex ``base``, in lexicographic order."""
    vertex = g.head(base[-1]) if base else 0
    paths = [(d,) for d in g.out_edges[vertex]]
    for _ in range(depth - 1):
        paths = [p + (f,) for p in paths for f in g.successors[p[-1]]]
    return [EndCylinder(base, p) for p in paths]
