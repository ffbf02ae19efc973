"""Cross-ratios of quadruples of ends, their length identities and arithmeticity."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

from .errors import DegenerateQuadruple, EmptyInput, EndOnAxis, NotHyperbolic, SharedAxisEnd
from .graph_core import (
    Cone,
    End,
    MetricGraph,
    TreePoint,
    Word,
    act_on_end,
    axis_endpoints,
    beta,
    busemann,
    geodesic_vertex,
    point_on_edge,
    translation_length,
    tree_distance,
)

DEBUG = os.environ.get("TREEBM_DEBUG") == "1"


@dataclass(frozen=True)
class Quadruple:
    xi: End
    xi_prime: End
    eta: End
    eta_prime: End

    @property
    def pairs(self) -> tuple[tuple[End, End], ...]:
        return (
            (self.xi, self.eta),
            (self.xi_prime, self.eta_prime),
            (self.xi, self.eta_prime),
            (self.xi_prime, self.eta),
        )

    @property
    def valid(self) -> bool:
        # on a tree any two distinct ends bound a rank one geodesic
        return all(a != b and not a.approximate and not b.approximate for a, b in self.pairs)


def cross_ratio(g: MetricGraph, q: Quadruple, p: TreePoint | None = None) -> Fraction:
    """beta_p(xi, eta) + beta_p(xi', eta') - beta_p(xi, eta') - beta_p(xi', eta)."""
    if not q.valid:
        raise DegenerateQuadruple("some pair of the quadruple coincides")
    p = TreePoint() if p is None else p
    value = (
        beta(g, p, q.xi, q.eta)
        + beta(g, p, q.xi_prime, q.eta_prime)
        - beta(g, p, q.xi, q.eta_prime)
        - beta(g, p, q.xi_prime, q.eta)
    )
    if DEBUG:
        other = geodesic_vertex(g, q.xi, q.eta)
        alt = (
            beta(g, other, q.xi, q.eta)
            + beta(g, other, q.xi_prime, q.eta_prime)
            - beta(g, other, q.xi, q.eta_prime)
            - beta(g, other, q.xi_prime, q.eta)
        )
        assert alt == value, "cross-ratio depends on the basepoint"
    return value


def length_via_crossratio(g: MetricGraph, gamma: Word, xi: End) -> Fraction:
    """[[gamma^-, gamma^+, gamma xi, xi]], which equals 2 * translation_length(gamma)."""
    if not gamma.loop(g):
        raise NotHyperbolic("the identity is not hyperbolic")
    minus, plus = axis_endpoints(g, gamma)
    if xi in (minus, plus):
        raise EndOnAxis("xi is an endpoint of the axis")
    return cross_ratio(g, Quadruple(minus, plus, act_on_end(g, gamma, xi), xi))


def crossratio_from_lengths(g: MetricGraph, g1: Word, g2: Word, n_max: int) -> list[Fraction]:
    """The sequence l(g1^n) + l(g2^n) - l(g1^n g2^n) for n = 1..n_max."""
    for h in (g1, g2):
        if not h.loop(g):
            raise NotHyperbolic(f"{h} is not hyperbolic")
    ends = axis_endpoints(g, g1) + axis_endpoints(g, g2)
    if len(set(ends)) < 4:
        raise SharedAxisEnd("axis endpoints of g1 and g2 are not all distinct")
    return [
        translation_length(g, g1**n) + translation_length(g, g2**n) - translation_length(g, g1**n * g2**n)
        for n in range(1, n_max + 1)
    ]


def stabilized_value(seq: list[Fraction]):
    """First value repeated three times in a row, or None."""
    for i in range(len(seq) - 2):
        if seq[i] == seq[i + 1] == seq[i + 2]:
            return seq[i]
    return None


def tree_length_quadruple(g: MetricGraph, p: TreePoint, q: TreePoint) -> Quadruple:
    """Quadruple (v-, w-, v+, w+) of two opposite lines through vertices p != q.

    v runs through p then q, w through q then p, and the four rays leave the
    segment [p, q] through pairwise distinct edges, so the cross-ratio is 2 d(p, q).
    """
    if not (p.is_vertex and q.is_vertex) or p == q:
        raise ValueError("need two distinct tree vertices")
    k = len(p.path)
    while k and q.path[: k] != p.path[: k]:
        k -= 1
    toward_q = p.path[-1] ^ 1 if len(p.path) > k else q.path[k]
    toward_p = q.path[-1] ^ 1 if len(q.path) > k else p.path[k]
    vp, vq = g.head(p.path[-1]) if p.path else 0, g.head(q.path[-1]) if q.path else 0
    at_p = [d for d in g.out_edges[vp] if d != toward_q][:2]
    at_q = [d for d in g.out_edges[vq] if d != toward_p][:2]
    v_minus, w_plus = (Cone(p.path, d).representative(g) for d in at_p)
    v_plus, w_minus = (Cone(q.path, d).representative(g) for d in at_q)
    return Quadruple(v_minus, w_minus, v_plus, w_plus)


# ------------------------------------------------------------------- twisting
def _walk_toward(g: MetricGraph, end: End, k: int, t: Fraction) -> TreePoint:
    """Point at distance t >= 0 from vertex end.head(k) along the ray toward ``end``."""
    path = end.head(k)
    i = k
    while True:
        d = end.edge(i)
        length = g.length(d)
        if t < length:
            return point_on_edge(g, path, d, t)
        t -= length
        path = path + (d,)
        i += 1
        if t == 0:
            return TreePoint(path)


def horosphere_point(g: MetricGraph, center: End, other: End, x: TreePoint) -> TreePoint:
    """The point z of the geodesic (center, other) with b_center(z, x) = 0."""
    c = geodesic_vertex(g, center, other)
    k = len(c.path)
    # b_center grows by t moving a distance t from c toward ``other``
    s = busemann(g, center, x, c)
    if s >= 0:
        return _walk_toward(g, other, k, s)
    return _walk_toward(g, center, k, -s)


def twisting_time(g: MetricGraph, q: Quadruple) -> Fraction:
    """Time shift t0 with v4 = g^{t0} v0 around the horospherical four-step chain.

    v0 on (xi, eta); v1 on (xi, eta') on v0's xi-horosphere; v2 on (xi', eta')
    on v1's eta'-horosphere; v3 on (xi', eta) on v2's xi'-horosphere; v4 on
    (xi, eta) on v3's eta-horosphere.
    """
    if not q.valid:
        raise DegenerateQuadruple("some pair of the quadruple coincides")
    v0 = geodesic_vertex(g, q.xi, q.eta)
    v1 = horosphere_point(g, q.xi, q.eta_prime, v0)
    v2 = horosphere_point(g, q.eta_prime, q.xi_prime, v1)
    v3 = horosphere_point(g, q.xi_prime, q.eta, v2)
    v4 = horosphere_point(g, q.eta, q.xi, v3)
    return busemann(g, q.eta, v0, v4)


# -------------------------------------------------------------- arithmeticity
@dataclass(frozen=True)
class Arithmetic:
    """Every value is an integer multiple of ``c``, and ``c`` is the largest such."""

    c: Union[Fraction, float]
    approximate: bool = False


@dataclass(frozen=True)
class NonArithmetic:
    """Values generating a dense subgroup. Never returned for exact rationals."""


@dataclass(frozen=True)
class ApproximateNonArithmetic:
    """No lattice spacing >= c_min explains the (float) values within tolerance."""

    c_min: float
    tol: float
    best_c: float
    best_residual: float
    candidates: int


def _gcd(values: Iterable[Fraction]) -> Fraction:
    out = Fraction(0)
    for v in values:
        a, b = abs(out), abs(v)
        den = a.denominator * b.denominator // math.gcd(a.denominator, b.denominator)
        out = Fraction(math.gcd(int(a * den), int(b * den)), den)
    return out


def arithmeticity(values, exact: bool | None = None, c_min: float = 1e-4, tol: float = 1e-9):
    """Decide whether the values lie in a discrete subgroup cZ.

    Exact rationals always do and the answer is their gcd. Inexact values run a
    lattice fit over every spacing v0/k >= c_min, v0 the smallest nonzero |value|.
    """
    values = list(values)
    if not values:
        raise EmptyInput("arithmeticity needs at least one value")
    if exact is None:
        exact = all(isinstance(v, (int, Fraction)) for v in values)
    if exact:
        c = _gcd(Fraction(v) for v in values)
        if c == 0:
            raise EmptyInput("all values are zero")
        return Arithmetic(c)
    xs = [abs(float(v)) for v in values]
    nonzero = [x for x in xs if x > tol]
    if not nonzero:
        raise EmptyInput("all values are zero")
    v0 = min(nonzero)
    kmax = max(1, math.floor(v0 / c_min))
    best_c, best_res = v0, math.inf
    for k in range(1, kmax + 1):
        c = v0 / k
        res = max(abs(x - round(x / c) * c) for x in xs)
        if res <= tol:
            return Arithmetic(c, approximate=True)
        if res < best_res:
            best_c, best_res = c, res
    return ApproximateNonArithmetic(c_min, tol, best_c, best_res, kmax)
