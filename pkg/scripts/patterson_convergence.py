"""Truncated Patterson masses against the Gibbs realization as s approaches delta.

Prints one CSV row per (graph, s - delta, radius): the largest absolute gap
over depth-2 cylinders, and the last Poincare increment at that radius.

    python3 scripts/patterson_convergence.py --graph rose-1-2 --radii 10 20 30 40
"""

from __future__ import annotations

import argparse
import csv
import sys

from treebm.graph_core import TreePoint
from treebm.patterson import critical_exponent, gibbs_measure_table, patterson_measure_approx, poincare_partial
from treebm.sampling import fixture_graphs


def main(argv=None) -> int:
    graphs = fixture_graphs()
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--graph", choices=sorted(graphs), default="rose-unit")
    ap.add_argument("--offsets", type=float, nargs="+", default=[0.5, 0.2, 0.1, 0.05])
    ap.add_argument("--radii", type=float, nargs="+", default=[10, 20, 30])
    ap.add_argument("--depth", type=int, default=2)
    args = ap.parse_args(argv)

    g = graphs[args.graph]
    w = critical_exponent(g)
    p = TreePoint()
    gibbs = gibbs_measure_table(w, p, args.depth).masses
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["graph", "s_minus_delta", "radius", "max_gap", "poincare_increment"])
    for offset in args.offsets:
        s = w.delta + offset
        for radius in args.radii:
            approx = patterson_measure_approx(g, p, s, radius, depth=args.depth, delta=w.delta).masses
            gap = max(abs(approx[c] - gibbs[c]) for c in gibbs)
            inc = poincare_partial(g, s, p, p, radius) - poincare_partial(g, s, p, p, radius - 5)
            out.writerow([args.graph, offset, radius, f"{gap:.3e}", f"{inc:.3e}"])
    return 0


if __name__ == "__main__":
    sys.exit(main())
