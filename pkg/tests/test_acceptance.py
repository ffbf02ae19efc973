"""Acceptance gate: one test per criterion, each reporting a PASS/FAIL line.

The lines are collected in ``REPORT`` and printed in the pytest terminal
summary (see conftest.py), or directly when this file is run as a script.
"""

from __future__ import annotations

import contextlib
import io
import json
import math
import subprocess
import sys
import time
from fractions import Fraction

import pytest

from treebm import crossratio as cr
from treebm.cli import main as cli_main
from treebm.dynamics import (
    NOT_MIXING,
    BMQuotientMeasure,
    MixingBudget,
    birkhoff_average,
    circle_observable,
    correlation_curve,
    edge_indicator,
    mixing_verdict,
)
from treebm.graph_core import Word, enumerate_words, rose, tree_distance, vertex, vertex_at
from treebm.patterson import conformality_residual, critical_exponent, poincare_partial, shadow_lemma_check
from treebm.quotient_measure import builtin_fixtures, run_quotient_suites
from treebm.selftest import crossratio_suites

REPORT: dict[str, str] = {}
E = vertex()


def report(key: str, title: str, ok: bool, detail: str) -> None:
    REPORT[key] = f"criterion {key} ({title}): {'PASS' if ok else 'FAIL'}  {detail}"
    assert ok, REPORT[key]


def analyze(tmp_path, lengths) -> dict[str, str]:
    path = tmp_path / f"g{len(list(tmp_path.iterdir()))}.json"
    path.write_text(json.dumps({"vertices": 1, "edges": [{"from": 0, "to": 0, "len": str(x)} for x in lengths]}))
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = cli_main(["analyze", "--graph", str(path), "--radius", "20"])
    assert code == 0
    fields = {}
    for line in buf.getvalue().splitlines():
        for token in line.split():
            if "=" in token:
                k, v = token.split("=", 1)
                fields[k] = v
    return fields


# ------------------------------------------------------------------------ 1
def test_criterion_1_critical_exponent(tmp_path):
    start = time.perf_counter()
    unit = analyze(tmp_path, [1, 1])
    three = analyze(tmp_path, [1, 1, 1])
    doubled = analyze(tmp_path, [2, 2])
    elapsed = time.perf_counter() - start
    d_unit, d_growth = float(unit["delta_spectral"]), float(unit["delta_growth"])
    d_three, d_double = float(three["delta_spectral"]), float(doubled["delta_spectral"])
    errs = (abs(d_unit - math.log(3)), abs(d_growth - math.log(3)), abs(d_three - math.log(5)), abs(d_double - d_unit / 2))
    ok = errs[0] <= 1e-9 and errs[1] <= 2e-2 and errs[2] <= 1e-9 and errs[3] <= 1e-9 and elapsed < 5
    detail = (
        f"|d-ln3|={errs[0]:.1e} |growth-ln3|={errs[1]:.1e} |d3-ln5|={errs[2]:.1e} "
        f"|d(2x)-d/2|={errs[3]:.1e} time={elapsed:.2f}s"
    )
    report("1", "critical exponent", ok, detail)


# ------------------------------------------------------------------------ 2
def test_criterion_2a_poincare_diverges_below_delta():
    g = rose(1, 1)
    s = critical_exponent(g).delta - 0.1
    sums = [poincare_partial(g, s, E, E, r) for r in range(10, 31, 5)]
    ratios = [b / a for a, b in zip(sums, sums[1:])]
    report("2a", "Poincare sums below delta", min(ratios) >= 1.5, "ratios=" + ",".join(f"{x:.3f}" for x in ratios))


def test_criterion_2b_poincare_converges_above_delta():
    g = rose(1, 1)
    s = critical_exponent(g).delta + 0.1
    sums = [poincare_partial(g, s, E, E, r) for r in range(10, 31, 5)]
    incs = [b - a for a, b in zip(sums, sums[1:])]
    report("2b", "Poincare sums above delta", incs[-1] < 1e-4, "increments=" + ",".join(f"{x:.3g}" for x in incs))


# ------------------------------------------------------------------------ 3
def test_criterion_3_conformality():
    start = time.perf_counter()
    worst, pairs = 0.0, 0
    for g in (rose(1, 1), rose(1, 2)):
        w = critical_exponent(g)
        for u in enumerate_words(g.rank, 1):
            p = vertex_at(g, u)
            for v in enumerate_words(g.rank, 5):
                q = vertex_at(g, v)
                if tree_distance(g, p, q) > 4:
                    continue
                worst = max(worst, conformality_residual(w, p, q, 8))
                pairs += 1
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9 and elapsed < 10
    report("3", "conformality", ok, f"pairs={pairs} max residual={worst:.1e} time={elapsed:.2f}s")


# ------------------------------------------------------------------------ 4
def test_criterion_4_shadow_lemma():
    w = critical_exponent(rose(1, 1))
    reps = [shadow_lemma_check(w, E, r, 6) for r in (Fraction(1, 2), 1, 2)]
    ok = all(r.violations == 0 and r.max_ratio <= 1 for r in reps)
    detail = " ".join(f"r={r.radius}: n={r.checked} violations={r.violations} max={r.max_ratio:.3f}" for r in reps)
    report("4", "shadow lemma", ok, detail)


# ------------------------------------------------------------------------ 5
def test_criterion_5_crossratio_battery():
    start = time.perf_counter()
    results = crossratio_suites(seed=0, n=1000)
    g = rose(1, 1)
    fixtures = {
        "(a,baB)": (cr.stabilized_value(cr.crossratio_from_lengths(g, Word.parse("a"), Word.parse("baB"), 8)), -2),
        "(a,b)": (cr.stabilized_value(cr.crossratio_from_lengths(g, Word.parse("a"), Word.parse("b"), 8)), 0),
    }
    elapsed = time.perf_counter() - start
    counts = {r.name: (r.passed, r.failed) for r in results}
    ok = (
        all(f == 0 for _, f in counts.values())
        and all(got == want for got, want in fixtures.values())
        and counts["invariance"][0] == 1000
        and counts["length-via-crossratio"][0] == 100
        and counts["twisting"][0] == 200
        and elapsed < 30
    )
    detail = " ".join(f"{k}={p}/{p + f}" for k, (p, f) in counts.items())
    detail += " " + " ".join(f"{k}->{got}" for k, (got, _) in fixtures.items()) + f" time={elapsed:.1f}s"
    report("5", "cross-ratio battery", ok, detail)


# ------------------------------------------------------------------------ 6
def test_criterion_6_quotient_measure():
    fixtures = builtin_fixtures(seed=0, n_random=50)
    results = run_quotient_suites(fixtures, seed=0)
    ok = len(fixtures) == 52 and all(r.failed == 0 and r.passed > 0 for r in results)
    detail = f"fixtures={len(fixtures)} " + " ".join(f"{r.name}={r.passed}/{r.passed + r.failed}" for r in results)
    report("6", "quotient measure", ok, detail)


# ------------------------------------------------------------------------ 7
def test_criterion_7_mixing_dichotomy():
    start = time.perf_counter()
    budget = MixingBudget()
    unit = BMQuotientMeasure.of(rose(1, 1))
    obs = circle_observable(1.0)
    curve = correlation_curve(unit, obs, obs, range(0, 11), budget.samples, budget.seed)
    c0 = abs(curve[0].value)
    kept = min(abs(c.value) for c in curve[1:]) / c0
    golden = mixing_verdict(rose(1.0, 1.6180339887), budget)
    decay = golden.evidence["decay"]
    verdicts = [mixing_verdict(rose(*ls)) for ls in ((1, 1), (2, 3), (1, "3/2"))]
    expected = [(NOT_MIXING, 1), (NOT_MIXING, 1), (NOT_MIXING, Fraction(1, 2))]
    got = [(v.label, v.c) for v in verdicts]
    elapsed = time.perf_counter() - start
    ok = kept >= 0.9 and decay <= 0.05 and got == expected and elapsed < 60
    detail = (
        f"(a) min|C(k)|/|C(0)|={kept:.3f} (b) max|C(T)|/|C(0)| on [50,100]={decay:.4f} "
        f"(c) c={[v.c_text for v in verdicts]} time={elapsed:.1f}s"
    )
    report("7", "mixing dichotomy", ok, detail)


# ------------------------------------------------------------------------ 8
def test_criterion_8_ergodicity():
    cases = [
        ("unit rose, a-edge", BMQuotientMeasure.of(rose(1, 1)), [0]),
        ("(1,2) rose, b-loop", BMQuotientMeasure.of(rose(1, 2)), [2, 3]),
    ]
    parts, ok = [], True
    for label, m, edges in cases:
        r = birkhoff_average(m, edge_indicator(edges), 1e5, seed=0)
        diff = abs(r.time_average - r.space_average)
        ok &= diff <= 0.02 and diff <= 3 * r.stderr
        parts.append(f"{label}: time={r.time_average:.4f} space={r.space_average:.4f} 3sigma={3 * r.stderr:.4f}")
    report("8", "ergodicity", ok, "; ".join(parts))


# ------------------------------------------------------------------------ 9
def test_criterion_9_selftest_deterministic():
    runs = [subprocess.run([sys.executable, "-m", "treebm", "selftest"], capture_output=True) for _ in range(2)]
    codes = [r.returncode for r in runs]
    same = runs[0].stdout == runs[1].stdout
    ok = codes == [0, 0] and same
    report("9", "selftest", ok, f"exit codes={codes} byte-identical={same} bytes={len(runs[0].stdout)}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
