from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from strategies import GRAPHS, ends, graph_names, points, vertices, words
from treebm import crossratio as cr
from treebm.errors import DegenerateQuadruple, EmptyInput, EndOnAxis, NotHyperbolic, SharedAxisEnd
from treebm.graph_core import (
    Word,
    act_on_end,
    act_on_point,
    axis_endpoints,
    beta,
    busemann,
    parse_end,
    rose,
    translation_length,
    tree_distance,
    vertex,
)

W = Word.parse
Q = cr.Quadruple


def deep_point(xi, k: int = 40):
    return vertex(xi.head(k))


def truncated_cross_ratio(g, q: Q, k: int = 40) -> Fraction:
    """d(x, y) + d(x', y') - d(x, y') - d(x', y) for vertices far out along each end.

    Basepoint terms cancel, so this is the cross-ratio once every pair has split
    well before depth k.
    """
    x, x2, y, y2 = (deep_point(e, k) for e in (q.xi, q.xi_prime, q.eta, q.eta_prime))
    d = lambda u, v: tree_distance(g, u, v)  # noqa: E731
    return d(x, y) + d(x2, y2) - d(x, y2) - d(x2, y)


def quadruples(g, n: int = 4):
    return st.lists(ends(g, 3, 3), min_size=n, max_size=n, unique=True)


@pytest.fixture
def rose_ends(unit_rose):
    e = lambda s: parse_end(unit_rose, s)  # noqa: E731
    return {
        "b+": e("(b)"),
        "ab+": e("a:(b)"),
        "a+": e("(a)"),
        "b-": e("(B)"),
        "a-": e("(A)"),
    }


# ----------------------------------------------------------------- examples
def test_cross_ratio_examples(unit_rose, rose_ends):
    E = rose_ends
    q = Q(E["b+"], E["ab+"], E["a+"], E["b-"])
    assert cr.cross_ratio(unit_rose, q) == 2
    assert cr.cross_ratio(unit_rose, Q(E["b+"], E["ab+"], E["b-"], E["a+"])) == -2
    assert cr.cross_ratio(unit_rose, Q(E["a-"], E["b-"], E["a+"], E["b+"])) == 0
    assert truncated_cross_ratio(unit_rose, q) == 2


def test_twisting_examples(unit_rose, rose_ends):
    E = rose_ends
    assert cr.twisting_time(unit_rose, Q(E["b+"], E["ab+"], E["a+"], E["b-"])) == 2
    assert cr.twisting_time(unit_rose, Q(E["b+"], E["ab+"], E["b-"], E["a+"])) == -2
    assert cr.twisting_time(unit_rose, Q(E["a-"], E["b-"], E["a+"], E["b+"])) == 0


def test_length_via_crossratio_examples(unit_rose, rose12):
    assert cr.length_via_crossratio(unit_rose, W("a"), parse_end(unit_rose, "(b)")) == 2
    assert cr.length_via_crossratio(unit_rose, W("ab"), parse_end(unit_rose, "B:(A)")) == 4
    assert cr.length_via_crossratio(rose12, W("b"), parse_end(rose12, "(a)")) == 4


def test_crossratio_from_lengths_examples(unit_rose):
    seq = cr.crossratio_from_lengths(unit_rose, W("a"), W("baB"), 6)
    assert seq == [-2] * 6
    n = 5
    assert translation_length(unit_rose, W("a") ** n * W("b") * W("a") ** n * W("B")) == 2 * n + 2
    target = Q(parse_end(unit_rose, "(A)"), parse_end(unit_rose, "b:(A)"), parse_end(unit_rose, "(a)"), parse_end(unit_rose, "b:(a)"))
    assert cr.cross_ratio(unit_rose, target) == -2
    assert cr.crossratio_from_lengths(unit_rose, W("a"), W("b"), 6) == [0] * 6
    assert cr.crossratio_from_lengths(unit_rose, W("a"), W("b"), 1) == [0]


@pytest.mark.parametrize(
    "values, c",
    [([1, 1], 1), ([2, 3], 1), ([1, Fraction(3, 2)], Fraction(1, 2)), ([Fraction(4, 3), 2, -Fraction(2, 3)], Fraction(2, 3))],
)
def test_exact_arithmeticity_is_the_gcd(values, c):
    verdict = cr.arithmeticity(values)
    assert verdict == cr.Arithmetic(Fraction(c))
    assert all((Fraction(v) / verdict.c).denominator == 1 for v in values)


def test_inexact_arithmeticity():
    golden = cr.arithmeticity([1.0, 1.6180339887], exact=False, c_min=1e-4)
    assert isinstance(golden, cr.ApproximateNonArithmetic)
    assert golden.best_residual > golden.tol and golden.candidates == 10_000
    half = cr.arithmeticity([1.0, 1.5, 2.5], exact=False)
    assert isinstance(half, cr.Arithmetic) and half.approximate
    assert half.c == pytest.approx(0.5, abs=1e-12)


@given(st.lists(st.fractions(min_value=Fraction(-20), max_value=20, max_denominator=12), min_size=1, max_size=6))
def test_gcd_matches_integer_gcd_after_clearing_denominators(values):
    assume(any(values))
    den = math.lcm(*(v.denominator for v in values))
    expected = Fraction(math.gcd(*(int(v * den) for v in values)), den)
    assert cr.arithmeticity(values).c == expected


# ------------------------------------------------------------------- errors
def test_errors(unit_rose, rose_ends):
    E = rose_ends
    with pytest.raises(DegenerateQuadruple):
        cr.cross_ratio(unit_rose, Q(E["a+"], E["b+"], E["a+"], E["b-"]))
    with pytest.raises(DegenerateQuadruple):
        cr.twisting_time(unit_rose, Q(E["a+"], E["b+"], E["b-"], E["b+"]))
    with pytest.raises(EndOnAxis):
        cr.length_via_crossratio(unit_rose, W("a"), E["a-"])
    with pytest.raises(NotHyperbolic):
        cr.length_via_crossratio(unit_rose, W(""), E["a-"])
    with pytest.raises(NotHyperbolic):
        cr.crossratio_from_lengths(unit_rose, W("aA"), W("b"), 3)
    with pytest.raises(SharedAxisEnd):
        cr.crossratio_from_lengths(unit_rose, W("a"), W("aa"), 3)
    with pytest.raises(EmptyInput):
        cr.arithmeticity([])
    with pytest.raises(EmptyInput):
        cr.arithmeticity([0, 0])


def test_validity_is_computed(unit_rose, rose_ends):
    E = rose_ends
    # xi = xi' is allowed: only the four cross pairs need distinct ends
    assert Q(E["a+"], E["a+"], E["b+"], E["b-"]).valid
    assert cr.cross_ratio(unit_rose, Q(E["a+"], E["a+"], E["b+"], E["b-"])) == 0
    assert not Q(E["a+"], E["b+"], E["b+"], E["b-"]).valid
    assert not Q(E["a+"].truncate(3), E["b+"], E["ab+"], E["b-"]).valid


# --------------------------------------------------------------- identities
@given(graph_names, st.data())
def test_cross_ratio_matches_truncated_distances(name, data):
    g = GRAPHS[name]
    q = Q(*data.draw(quadruples(g)))
    assert cr.cross_ratio(g, q) == truncated_cross_ratio(g, q)


@given(graph_names, st.data())
def test_cross_ratio_identities(name, data):
    g = GRAPHS[name]
    xi, xi2, eta, eta2, eta3 = data.draw(quadruples(g, 5))
    k = cr.cross_ratio(g, Q(xi, xi2, eta, eta2))
    gamma = data.draw(words(g.rank, 4))
    moved = Q(*(act_on_end(g, gamma, e) for e in (xi, xi2, eta, eta2)))
    assert cr.cross_ratio(g, moved) == k
    assert cr.cross_ratio(g, Q(xi, xi2, eta2, eta)) == -k
    assert cr.cross_ratio(g, Q(eta, eta2, xi, xi2)) == k
    assert k + cr.cross_ratio(g, Q(xi, xi2, eta2, eta3)) == cr.cross_ratio(g, Q(xi, xi2, eta, eta3))
    assert k + cr.cross_ratio(g, Q(xi2, eta, xi, eta2)) + cr.cross_ratio(g, Q(eta, xi, xi2, eta2)) == 0


@given(graph_names, st.data())
def test_cross_ratio_is_basepoint_independent(name, data):
    g = GRAPHS[name]
    q = Q(*data.draw(quadruples(g)))
    p1, p2 = data.draw(points(g, 3)), data.draw(points(g, 3))
    assert cr.cross_ratio(g, q, p1) == cr.cross_ratio(g, q, p2)


@given(graph_names, st.data())
def test_twisting_time_equals_cross_ratio(name, data):
    g = GRAPHS[name]
    q = Q(*data.draw(quadruples(g)))
    assert cr.twisting_time(g, q) == cr.cross_ratio(g, q)


@given(graph_names, st.data())
def test_horosphere_point_lies_on_both(name, data):
    g = GRAPHS[name]
    center, other = data.draw(quadruples(g, 2))
    x = data.draw(points(g, 3))
    z = cr.horosphere_point(g, center, other, x)
    assert busemann(g, center, z, x) == 0
    # z is on the line (center, other): the ray from z to center avoids other's side
    assert tree_distance(g, z, deep_point(center)) + tree_distance(g, z, deep_point(other)) == tree_distance(
        g, deep_point(center), deep_point(other)
    )


@given(graph_names, st.data())
def test_length_via_crossratio_is_twice_translation_length(name, data):
    g = GRAPHS[name]
    gamma = data.draw(words(g.rank, 8, min_size=1))
    xi = data.draw(ends(g))
    assume(xi not in axis_endpoints(g, gamma))
    assert cr.length_via_crossratio(g, gamma, xi) == 2 * translation_length(g, gamma)


@given(graph_names, st.data())
def test_beta_translation_identity(name, data):
    g = GRAPHS[name]
    gamma = data.draw(words(g.rank, 4))
    a, b = data.draw(quadruples(g, 2))
    x = data.draw(points(g, 3))
    back = act_on_point(g, gamma.inverse(), x)
    lhs = beta(g, x, act_on_end(g, gamma, a), act_on_end(g, gamma, b))
    assert lhs == beta(g, x, a, b) + busemann(g, a, x, back) + busemann(g, b, x, back)


@given(graph_names, st.data())
def test_tree_length_quadruple_gives_twice_the_distance(name, data):
    g = GRAPHS[name]
    p, q = data.draw(vertices(g, 3)), data.draw(vertices(g, 3))
    assume(p != q)
    quad = cr.tree_length_quadruple(g, p, q)
    assert cr.cross_ratio(g, quad) == 2 * tree_distance(g, p, q) == truncated_cross_ratio(g, quad)


@given(st.data())
def test_lengths_sequence_stabilizes_at_axis_cross_ratio(data):
    g = rose(1, 2)
    g1, g2 = data.draw(words(2, 3, min_size=1)), data.draw(words(2, 3, min_size=1))
    ends4 = axis_endpoints(g, g1) + axis_endpoints(g, g2)
    assume(len(set(ends4)) == 4)
    (m1, p1), (m2, p2) = axis_endpoints(g, g1), axis_endpoints(g, g2)
    seq = cr.crossratio_from_lengths(g, g1, g2, 10)
    assert cr.stabilized_value(seq) == cr.cross_ratio(g, Q(m1, m2, p1, p2))


def test_stabilized_value():
    assert cr.stabilized_value([1, 2, 2, 2, 3]) == 2
    assert cr.stabilized_value([1, 2, 2, 3]) is None
