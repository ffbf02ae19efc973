"""Exact geometry of the universal cover tree.

Tree vertices are addressed by their reduced path from the base vertex.
All distances and Busemann values are exact ``Fraction``s.

On a tree every pair of distinct ends spans a rank one geodesic and the Tits
distance between distinct ends is infinite, so nothing here computes it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from ..errors import InsufficientDepth, NotHyperbolic
from .ends import Cone, End, EndCylinder, _lcp, make_end
from .metric_graph import MetricGraph, Path_, concat, reverse_path
from .words import Word, cyclic_reduction, path_of_word, word_of_path

NEG_INF = -math.inf

ZERO = Fraction(0)


@dataclass(frozen=True)
class TreePoint:
    """Point of the cover tree.

    ``path`` addresses a vertex; if ``edge`` is set the point sits at distance
    ``offset`` along the lift of ``edge`` leaving that vertex, with the edge
    pointing away from the root so the address is canonical.
    """

    path: Path_ = ()
    edge: int | None = None
    offset: Fraction = ZERO

    @property
    def is_vertex(self) -> bool:
        return self.edge is None


def vertex(path: Path_ = ()) -> TreePoint:
    return TreePoint(tuple(path))


def vertex_at(g: MetricGraph, word: Word, v: int = 0) -> TreePoint:
    """The lift ``word . v`` of quotient vertex ``v``."""
    return TreePoint(path_of_word(g, word, v))


def act_on_point(g: MetricGraph, word: Word, x: TreePoint) -> TreePoint:
    """Image of a tree point under a deck transformation."""
    path = concat(word.loop(g), x.path)
    if x.edge is None:
        return TreePoint(path)
    return point_on_edge(g, path, x.edge, x.offset)


def address(g: MetricGraph, x: TreePoint) -> tuple[Word, int]:
    return word_of_path(g, x.path)


def point_on_edge(g: MetricGraph, path: Path_, edge: int, t) -> TreePoint:
    """Point at distance ``t`` from vertex ``path`` along ``edge``, canonicalized."""
    t = Fraction(t)
    length = g.length(edge)
    if not 0 <= t <= length:
        raise ValueError("offset outside the edge")
    if path and edge == path[-1] ^ 1:
        path, edge, t = path[:-1], edge ^ 1, length - t
    if t == 0:
        return TreePoint(path)
    if t == length:
        return TreePoint(path + (edge,))
    return TreePoint(path, edge, t)


def _endpoints(x: TreePoint) -> tuple[Path_, Path_]:
    return x.path, x.path + (x.edge,)


def _vertex_distance(g: MetricGraph, p: Path_, q: Path_) -> Fraction:
    k = _lcp(p, q)
    return g.path_length(p[k:]) + g.path_length(q[k:])


def _dist_to_vertex(g: MetricGraph, x: TreePoint, v: Path_) -> Fraction:
    if x.edge is None:
        return _vertex_distance(g, x.path, v)
    a, b = _endpoints(x)
    if v[: len(b)] == b:
        return g.length(x.edge) - x.offset + _vertex_distance(g, b, v)
    return x.offset + _vertex_distance(g, a, v)


def tree_distance(g: MetricGraph, x: TreePoint, y: TreePoint) -> Fraction:
    """Exact length of the tree geodesic from ``x`` to ``y``."""
    if y.edge is None:
        return _dist_to_vertex(g, x, y.path)
    if x.edge is None:
        return _dist_to_vertex(g, y, x.path)
    if x.path == y.path and x.edge == y.edge:
        return abs(x.offset - y.offset)
    a, b = _endpoints(x)
    if y.path[: len(b)] == b:
        return g.length(x.edge) - x.offset + _dist_to_vertex(g, y, b)
    return x.offset + _dist_to_vertex(g, y, a)


def _busemann_root(g: MetricGraph, xi: End, x: TreePoint) -> Fraction:
    """b_xi(x, o) with o the base vertex."""
    if x.edge is None:
        k = xi.common_prefix(x.path)
        return g.path_length(x.path) - 2 * g.path_length(x.path[:k])
    a, b = _endpoints(x)
    if xi.common_prefix(b) == len(b):
        return _busemann_root(g, xi, TreePoint(b)) + g.length(x.edge) - x.offset
    return _busemann_root(g, xi, TreePoint(a)) + x.offset


def busemann(g: MetricGraph, xi: End, x: TreePoint, y: TreePoint) -> Fraction:
    """b_xi(x, y) = d(x, c) - d(y, c) where c is where the rays to ``xi`` merge."""
    return _busemann_root(g, xi, x) - _busemann_root(g, xi, y)


def _branch_length(xi: End, eta: End) -> int:
    """Number of shared initial edges of two exactly represented ends; -1 if equal."""
    if xi == eta:
        return -1
    if xi.period is None or eta.period is None:
        raise InsufficientDepth("beta needs exactly represented ends")
    bound = max(len(xi.prefix), len(eta.prefix)) + len(xi.period) + len(eta.period) + 1
    k = _lcp(xi.head(bound), eta.head(bound))
    if k == bound:
        raise AssertionError("non-canonical ends compare equal")
    return k


def geodesic_vertex(g: MetricGraph, xi: End, eta: End) -> TreePoint:
    """The point where the rays from the base vertex to ``xi`` and ``eta`` split."""
    k = _branch_length(xi, eta)
    if k < 0:
        raise ValueError("ends coincide")
    return TreePoint(xi.head(k))


def beta(g: MetricGraph, p: TreePoint, xi: End, eta: End):
    """inf over x of (b_xi + b_eta)(x, p); ``NEG_INF`` when ``xi == eta``.

    Evaluated at a point of the geodesic joining the ends, where the infimum
    is attained; equals ``-2 d(p, [xi, eta])``.
    """
    k = _branch_length(xi, eta)
    if k < 0:
        return NEG_INF
    c = TreePoint(xi.head(k))
    return busemann(g, xi, c, p) + busemann(g, eta, c, p)


def distance_to_geodesic(g: MetricGraph, p: TreePoint, xi: End, eta: End) -> Fraction:
    """Distance from ``p`` to the geodesic between two distinct ends, by scanning its vertices."""
    k = _branch_length(xi, eta)
    if k < 0:
        raise ValueError("ends coincide")
    reach = len(p.path) + k + 2
    rays = (xi.head(reach), eta.head(reach))
    if p.edge is not None:
        a, b = _endpoints(p)
        if all(len(q) >= k and any(r[: len(q)] == q for r in rays) for q in (a, b)):
            return ZERO
    return min(
        _dist_to_vertex(g, p, ray[:j]) for ray in rays for j in range(k, len(ray) + 1)
    )


def translation_length(g: MetricGraph, gamma: Word) -> Fraction:
    """inf over x of d(x, gamma x): the length of the cyclically reduced loop."""
    _, k = cyclic_reduction(gamma.loop(g))
    return g.path_length(k)


def axis_endpoints(g: MetricGraph, gamma: Word) -> tuple[End, End]:
    """``(gamma^-, gamma^+)`` as canonical eventually periodic ends."""
    c, k = cyclic_reduction(gamma.loop(g))
    if not k:
        raise NotHyperbolic("the identity has no axis")
    return make_end(g, c, reverse_path(k)), make_end(g, c, k)


def _geodesic_walk(g: MetricGraph, x: TreePoint, y: Path_):
    """Directed tree edges from vertex-or-point ``x`` to vertex ``y`` as (tail, edge, seg_len)."""
    steps = []
    if x.edge is not None:
        a, b = _endpoints(x)
        length = g.length(x.edge)
        if y[: len(b)] == b:
            steps.append((a, x.edge, length - x.offset))
            start = b
        else:
            steps.append((b, x.edge ^ 1, x.offset))
            start = a
    else:
        start = x.path
    k = _lcp(start, y)
    cur = start
    for d in reversed(start[k:]):
        steps.append((cur, d ^ 1, g.length(d)))
        cur = cur[:-1]
    for d in y[k:]:
        steps.append((cur, d, g.length(d)))
        cur = cur + (d,)
    return steps


def shadow(g: MetricGraph, x: TreePoint, y: TreePoint, r) -> set[EndCylinder]:
    """Cylinder decomposition of the ends whose ray from ``x`` meets the closed ball B(y, r).

    A ray from ``x`` meets the ball iff it follows [x, y] for at least
    d(x, y) - r, so the shadow is one cone (or everything when r >= d(x, y)).
    """
    r = Fraction(r)
    if r <= 0:
        raise ValueError("shadow radius must be positive")
    dist = tree_distance(g, x, y)
    if r >= dist:
        return {EndCylinder(x.path, ())}
    need = dist - r
    if y.edge is None:
        target = y.path
    else:
        # walk to the endpoint of y's edge that lies beyond y as seen from x
        a, b = _endpoints(y)
        if x.edge is not None and (x.path, x.edge) == (y.path, y.edge):
            target = b if y.offset > x.offset else a
        else:
            target = b if _dist_to_vertex(g, x, b) > _dist_to_vertex(g, x, a) else a
    steps = _geodesic_walk(g, x, target)
    first = 1 if x.edge is not None else 0
    walked = ZERO
    for i, (tail, edge, seg) in enumerate(steps):
        if walked + seg >= need:
            if i < first:
                return {EndCylinder(tail, (edge,))}
            return {EndCylinder(steps[first][0], tuple(s[1] for s in steps[first : i + 1]))}
        walked += seg
    raise AssertionError("shadow target beyond the geodesic")
