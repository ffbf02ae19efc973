"""Seeded random words, ends, points and quadruples for property checks and experiments."""

from __future__ import annotations

import random
from fractions import Fraction

from .crossratio import Quadruple
from .graph_core import End, MetricGraph, TreePoint, Word, end_from_words, point_on_edge, rose, vertex_at


def fixture_graphs() -> dict[str, MetricGraph]:
    """Small exact graphs covering roses, a theta graph and K4."""
    return {
        "rose-unit": rose(1, 1),
        "rose-1-2": rose(1, 2),
        "rose-3": rose(1, 1, 1),
        "theta": MetricGraph.build(2, [(0, 1, Fraction(1)), (0, 1, Fraction(2)), (1, 0, Fraction(3, 2))]),
        "k4": MetricGraph.build(
            4,
            [(0, 1, Fraction(1)), (0, 2, Fraction(2)), (0, 3, Fraction(1)),
             (1, 2, Fraction(1)), (1, 3, Fraction(3)), (2, 3, Fraction(1, 2))],
        ),
    }


def random_word(rng: random.Random, rank: int, max_len: int, min_len: int = 0) -> Word:
    while True:
        n = rng.randint(min_len, max_len)
        letters = [rng.choice([1, -1]) * rng.randint(1, rank) for _ in range(n)]
        w = Word(tuple(letters))
        if len(w) >= min_len:
            return w


def random_end(g: MetricGraph, rng: random.Random, max_prefix: int = 4, max_period: int = 3) -> End:
    prefix = random_word(rng, g.rank, max_prefix)
    period = random_word(rng, g.rank, max_period, min_len=1)
    return end_from_words(g, prefix, period)


def random_vertex(g: MetricGraph, rng: random.Random, max_len: int = 4) -> TreePoint:
    w = random_word(rng, g.rank, max_len)
    v = rng.randrange(g.n_vertices)
    return vertex_at(g, w, v)


def random_point(g: MetricGraph, rng: random.Random, max_len: int = 4) -> TreePoint:
    """A vertex, or a rational interior point of one of its edges."""
    x = random_vertex(g, rng, max_len)
    if rng.random() < 0.5:
        return x
    v = g.head(x.path[-1]) if x.path else 0
    d = rng.choice(g.out_edges[v])
    t = g.length(d) * Fraction(rng.randint(1, 7), 8)
    return point_on_edge(g, x.path, d, t)


def random_quadruple(g: MetricGraph, rng: random.Random, **kw) -> Quadruple:
    while True:
        q = Quadruple(*(random_end(g, rng, **kw) for _ in range(4)))
        if q.valid:
            return q
