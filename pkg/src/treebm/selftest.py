"""Invariant suites over built-in fixtures, shared by the ``selftest`` command and the tests.

Every suite is seeded, prints nothing and returns counts plus the first
counterexample, so two runs with the same seed give identical reports.
"""

from __future__ import annotations

import math
import random
from dataclasses import replace
from fractions import Fraction

import numpy as np

from . import crossratio as cr
from .dynamics import (
    BMQuotientMeasure,
    bm_pair_mass,
    circle_observable,
    correlation_curve,
    mixing_verdict,
    translate_cylinder,
)
from .graph_core import (
    EndCylinder,
    TreePoint,
    Word,
    act_on_end,
    act_on_point,
    axis_endpoints,
    beta,
    busemann,
    cone_of,
    cylinders_at_depth,
    cyclic_reduction,
    distance_to_geodesic,
    enumerate_words,
    rose,
    translation_length,
    tree_distance,
)
from .patterson import (
    conformality_residual,
    critical_exponent,
    gibbs_cylinder_measure,
    shadow_lemma_check,
    spectral_radius,
)
from .quotient_measure import SuiteResult, builtin_fixtures, run_quotient_suites
from .sampling import fixture_graphs, random_end, random_point, random_vertex, random_word


def _common(a, b) -> int:
    n = 0
    while n < min(len(a), len(b)) and a[n] == b[n]:
        n += 1
    return n


def _close(a: float, b: float, tol: float) -> bool:
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


# ---------------------------------------------------------------- graph_core
def graph_core_suites(seed: int = 0, corrupt: bool = False, n: int = 150) -> list[SuiteResult]:
    rng = random.Random(seed)
    oracle, cocycle, axis_check, metric = (SuiteResult(k) for k in ("beta-oracle", "busemann-cocycle", "axis-busemann", "metric"))
    for name, g in fixture_graphs().items():
        for _ in range(n):
            x, y, z = (random_point(g, rng) for _ in range(3))
            xi, eta = random_end(g, rng), random_end(g, rng)
            if xi != eta:
                b = beta(g, x, xi, eta)
                oracle.record(b == -2 * distance_to_geodesic(g, x, xi, eta), (name, x, xi, eta, b))
            gamma = random_word(rng, g.rank, 4)
            ok = busemann(g, xi, x, y) + busemann(g, xi, y, z) == busemann(g, xi, x, z)
            ok &= busemann(g, act_on_end(g, gamma, xi), act_on_point(g, gamma, x), act_on_point(g, gamma, y)) == busemann(g, xi, x, y)
            ok &= abs(busemann(g, xi, x, y)) <= tree_distance(g, x, y)
            cocycle.record(ok, (name, str(gamma), xi, x, y))
            dxy, dyz, dxz = tree_distance(g, x, y), tree_distance(g, y, z), tree_distance(g, x, z)
            metric.record(dxy == tree_distance(g, y, x) and dxz <= dxy + dyz, (name, x, y, z))
            h = random_word(rng, g.rank, 5, min_len=1)
            minus, plus = axis_endpoints(g, h)
            ell = translation_length(g, h)
            hx, hinv_x = act_on_point(g, h, x), act_on_point(g, h.inverse(), x)
            vals = (busemann(g, minus, x, hinv_x), busemann(g, minus, hx, x), busemann(g, plus, x, hx), busemann(g, plus, hinv_x, x))
            axis_check.record(all(v == ell for v in vals) and tree_distance(g, x, hx) >= ell, (name, str(h), x, vals, ell))
    return [oracle, cocycle, axis_check, metric]


# ----------------------------------------------------------------- patterson
def patterson_suites(seed: int = 0, corrupt: bool = False) -> list[SuiteResult]:
    rng = random.Random(seed)
    delta = SuiteResult("critical-exponent")
    w = critical_exponent(rose(1, 1))
    delta.record(abs(w.delta - math.log(3)) <= 1e-9, ("rose-unit", w.delta))
    w3 = critical_exponent(rose(1, 1, 1))
    delta.record(abs(w3.delta - math.log(5)) <= 1e-9, ("rose-3", w3.delta))
    monotone = SuiteResult("rho-decreasing")
    additivity = SuiteResult("refinement-additivity")
    scaling = SuiteResult("scaling-covariance")
    conformal = SuiteResult("conformality")
    for name, g in fixture_graphs().items():
        wg = critical_exponent(g)
        if corrupt and name == "rose-unit":
            phi = wg.phi.copy()
            phi[0] *= 1.5
            wg = replace(wg, phi=phi)
        w2 = critical_exponent(g.scaled(Fraction(3, 2)))
        delta.record(abs(w2.delta - wg.delta / 1.5) <= 1e-9, (name, "scaled", w2.delta, wg.delta))
        grid = np.linspace(0.05, 3.0, 25) / float(min(g.lengths))
        rhos = [spectral_radius(g, s) for s in grid]
        monotone.record(all(a > b for a, b in zip(rhos, rhos[1:])), (name, rhos))
        for _ in range(15):
            p = random_point(g, rng, 3)
            cyl = cylinders_at_depth(g, random_vertex(g, rng, 3).path, rng.randint(1, 3))
            c = rng.choice(cyl)
            total = gibbs_cylinder_measure(wg, p, c)
            cone = cone_of(g, c)
            parts = sum(gibbs_cylinder_measure(wg, p, EndCylinder(k.tail, (k.edge,))) for k in cone.children(g))
            additivity.record(_close(total, parts, 1e-10), (name, p, c, total, parts))
            m2 = gibbs_cylinder_measure(w2, replace(p, offset=p.offset * Fraction(3, 2)), c)
            scaling.record(_close(total, m2, 1e-10), (name, p, c, total, m2))
        base = TreePoint(())
        whole = [sum(gibbs_cylinder_measure(wg, base, c) for c in cylinders_at_depth(g, (), d)) for d in (1, 2, 3, 4)]
        additivity.record(all(_close(whole[0], x, 1e-10) for x in whole), (name, "depth totals", whole))
        for _ in range(3):
            p, q = random_vertex(g, rng, 2), random_vertex(g, rng, 2)
            k = len(p.path) + len(q.path) - 2 * _common(p.path, q.path)
            res = conformality_residual(wg, p, q, max(5, k))
            conformal.record(res <= 1e-9, (name, p, q, res))
    shadows = SuiteResult("shadow-lemma")
    for r in (Fraction(1, 2), Fraction(1), Fraction(2)):
        rep = shadow_lemma_check(w, TreePoint(()), r, 4)
        shadows.record(rep.passed, (str(r), rep.worst, rep.max_ratio))
    return [delta, monotone, additivity, scaling, conformal, shadows]


# ---------------------------------------------------------------- crossratio
def crossratio_suites(seed: int = 0, corrupt: bool = False, n: int = 1000) -> list[SuiteResult]:
    rng = random.Random(seed)
    graphs = list(fixture_graphs().items())
    names = ("invariance", "antisymmetry", "pair-swap", "cocycle", "triple", "basepoint", "twisting")
    res = {k: SuiteResult(k) for k in names}
    for i in range(n):
        name, g = graphs[i % len(graphs)]
        while True:
            ends = [random_end(g, rng, 3, 3) for _ in range(5)]
            if len(set(ends)) == 5:
                break
        xi, xi2, eta, eta2, eta3 = ends
        Q = cr.Quadruple
        k = cr.cross_ratio(g, Q(xi, xi2, eta, eta2))
        gamma = random_word(rng, g.rank, 4)
        moved = Q(*(act_on_end(g, gamma, e) for e in (xi, xi2, eta, eta2)))
        res["invariance"].record(cr.cross_ratio(g, moved) == k, (name, str(gamma), ends[:4]))
        res["antisymmetry"].record(cr.cross_ratio(g, Q(xi, xi2, eta2, eta)) == -k, (name, ends[:4]))
        res["pair-swap"].record(cr.cross_ratio(g, Q(eta, eta2, xi, xi2)) == k, (name, ends[:4]))
        lhs = k + cr.cross_ratio(g, Q(xi, xi2, eta2, eta3))
        res["cocycle"].record(lhs == cr.cross_ratio(g, Q(xi, xi2, eta, eta3)), (name, ends))
        tri = k + cr.cross_ratio(g, Q(xi2, eta, xi, eta2)) + cr.cross_ratio(g, Q(eta, xi, xi2, eta2))
        res["triple"].record(tri == 0, (name, ends[:4], tri))
        p = random_point(g, rng)
        shift = 1 if corrupt and i == 0 else 0
        res["basepoint"].record(cr.cross_ratio(g, Q(xi, xi2, eta, eta2), p) + shift == k, (name, p, ends[:4]))
        if i < 200:
            t0 = cr.twisting_time(g, Q(xi, xi2, eta, eta2))
            res["twisting"].record(t0 == k, (name, ends[:4], t0, k))
    lengths = SuiteResult("length-via-crossratio")
    beta_shift = SuiteResult("beta-translation")
    tree_len = SuiteResult("tree-lengths")
    for i in range(100):
        name, g = graphs[i % len(graphs)]
        gamma = random_word(rng, g.rank, 8, min_len=1)
        axis = axis_endpoints(g, gamma)
        xi = random_end(g, rng)
        while xi in axis:
            xi = random_end(g, rng)
        value = cr.length_via_crossratio(g, gamma, xi)
        lengths.record(value == 2 * translation_length(g, gamma), (name, str(gamma), xi, value))
        x = random_point(g, rng)
        a, b = random_end(g, rng), random_end(g, rng)
        if a != b:
            lhs = beta(g, x, act_on_end(g, gamma, a), act_on_end(g, gamma, b))
            back = act_on_point(g, gamma.inverse(), x)
            rhs = beta(g, x, a, b) + busemann(g, a, x, back) + busemann(g, b, x, back)
            beta_shift.record(lhs == rhs, (name, str(gamma), x, a, b))
        p, q = random_vertex(g, rng), random_vertex(g, rng)
        if p != q:
            k = cr.cross_ratio(g, cr.tree_length_quadruple(g, p, q))
            tree_len.record(k == 2 * tree_distance(g, p, q), (name, p, q, k))
    stab = SuiteResult("lengths-stabilize")
    g = rose(1, 1)
    for w1, w2 in (("a", "baB"), ("a", "b"), ("ab", "aB"), ("aab", "bA")):
        g1, g2 = Word.parse(w1), Word.parse(w2)
        seq = cr.crossratio_from_lengths(g, g1, g2, 8)
        m1, p1 = axis_endpoints(g, g1)
        m2, p2 = axis_endpoints(g, g2)
        target = cr.cross_ratio(g, cr.Quadruple(m1, m2, p1, p2))
        stab.record(cr.stabilized_value(seq) == target, (w1, w2, seq, target))
    return [res[k] for k in names] + [lengths, beta_shift, tree_len, stab]


# ------------------------------------------------------------------ dynamics
def _disjoint_rectangle(g, rng):
    while True:
        xi, eta = random_end(g, rng), random_end(g, rng)
        if xi != eta:
            break
    k = next(i for i in range(10**6) if xi.edge(i) != eta.edge(i))
    c_minus = EndCylinder((), xi.head(k + rng.randint(1, 2)))
    c_plus = EndCylinder((), eta.head(k + rng.randint(1, 2)))
    p = TreePoint(xi.head(rng.randint(0, k)))
    return c_minus, c_plus, p


def dynamics_suites(seed: int = 0, corrupt: bool = False) -> list[SuiteResult]:
    rng = random.Random(seed)
    refine, invariance, total, stationary, coherence = (
        SuiteResult(k) for k in ("pair-refinement", "pair-invariance", "total-mass", "stationarity", "verdict-coherence")
    )
    for name, g in fixture_graphs().items():
        m = BMQuotientMeasure.of(g)
        stationary.record(np.allclose(m.pi @ m.kernel, m.pi, atol=1e-12, rtol=0), (name, m.pi))
        total.record(_close(m.total_mass(), m.total_mass_from_cylinders(), 1e-10), (name, m.total_mass()))
        for _ in range(20):
            cm, cp, p = _disjoint_rectangle(g, rng)
            mass = bm_pair_mass(m, cm, cp, p)
            parts = sum(bm_pair_mass(m, cm, EndCylinder(k.tail, (k.edge,)), p) for k in cone_of(g, cp).children(g))
            parts2 = sum(bm_pair_mass(m, EndCylinder(k.tail, (k.edge,)), cp, p) for k in cone_of(g, cm).children(g))
            refine.record(_close(mass, parts, 1e-10) and _close(mass, parts2, 1e-10), (name, cm, cp, p))
            for letter in range(1, g.rank + 1):
                gen = Word((letter,))
                moved = bm_pair_mass(
                    m, translate_cylinder(g, gen, cm), translate_cylinder(g, gen, cp), act_on_point(g, gen, p)
                )
                invariance.record(_close(mass, moved, 1e-10), (name, letter, cm, cp, p))
        verdict = mixing_verdict(g)
        c = cr.arithmeticity(list(g.lengths)).c
        spectrum = set()
        for w in enumerate_words(g.rank, 6 if g.rank <= 2 else 4):
            loop = w.loop(g)
            if loop and not cyclic_reduction(loop)[0]:
                spectrum.add(translation_length(g, w))
        c_spec = cr.arithmeticity(sorted(spectrum)).c
        ok = verdict.label == "NOT_MIXING" and verdict.c == c and (c_spec / c).denominator == 1
        coherence.record(ok, (name, verdict.label, verdict.c, c, c_spec))
    circle = SuiteResult("circle-factor")
    m = BMQuotientMeasure.of(rose(1, 1))
    obs = circle_observable(1.0)
    curve = correlation_curve(m, obs, obs, range(0, 6), 2000, seed)
    for est in curve[1:]:
        circle.record(abs(abs(est.value) - abs(curve[0].value)) <= 3 * est.stderr + 1e-12, (est.T, est.value, curve[0].value))
    return [refine, invariance, total, stationary, coherence, circle]


def quotient_suites(seed: int = 0, corrupt: bool = False) -> list[SuiteResult]:
    fixtures = builtin_fixtures(seed)
    if corrupt:
        fixtures = [fixtures[0].corrupted()] + fixtures
    return run_quotient_suites(fixtures, seed)


SUITES = {
    "graph_core": graph_core_suites,
    "patterson": patterson_suites,
    "crossratio": crossratio_suites,
    "dynamics": dynamics_suites,
    "quotient_measure": quotient_suites,
}


def run_selftest(suites=None, seed: int = 0, corrupt: bool = False) -> dict[str, list[SuiteResult]]:
    names = list(SUITES) if not suites else list(suites)
    return {name: SUITES[name](seed=seed, corrupt=corrupt) for name in names}
