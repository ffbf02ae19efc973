"""Circle-observable correlations for arithmetic and non-arithmetic roses.

Writes a long-format CSV (graph, T, corr, stderr, ratio) to stdout and a
verdict per graph to stderr.

    python3 scripts/mixing_experiment.py --samples 10000 --t-max 100
"""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from treebm.dynamics import BMQuotientMeasure, MixingBudget, circle_observable, correlation_curve, mixing_verdict
from treebm.graph_core import rose

CASES = {
    "unit": (1, 1),
    "1-3/2": (1, "3/2"),
    "2-3": (2, 3),
    "golden": (1.0, 1.6180339887),
    "sqrt2": (1.0, 1.41421356237),
}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--samples", type=int, default=10_000)
    ap.add_argument("--t-max", type=float, default=100.0)
    ap.add_argument("--step", type=float, default=2.5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--cases", nargs="+", choices=sorted(CASES), default=sorted(CASES))
    args = ap.parse_args(argv)

    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["graph", "T", "corr", "stderr", "ratio"])
    times = np.arange(0.0, args.t_max + 1e-9, args.step)
    for name in args.cases:
        g = rose(*CASES[name])
        budget = MixingBudget(samples=args.samples, t_min=args.t_max / 2, t_max=args.t_max, seed=args.seed)
        verdict = mixing_verdict(g, budget)
        period = float(verdict.c) if verdict.c is not None else float(min(g.lengths))
        obs = circle_observable(period)
        curve = correlation_curve(BMQuotientMeasure.of(g), obs, obs, times, args.samples, args.seed)
        c0 = abs(curve[0].value)
        for c in curve:
            out.writerow([name, c.T, f"{c.value:.6f}", f"{c.stderr:.6f}", f"{abs(c.value) / c0:.4f}"])
        print(f"{name}: {verdict.label} c={verdict.c_text}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
