"""Command line entry point: ``treebm <subcommand> ...``.

Exit codes: 0 ok, 1 invariant failure, 2 input error, 3 model-constraint violation.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from . import crossratio as cr
from .dynamics import BMQuotientMeasure, MixingBudget, circle_observable, correlation_curve, mixing_verdict
from .errors import BallTooLarge, GraphFormatError, ValenceError
from .graph_core import MetricGraph, TreePoint, cyclic_reduction, enumerate_words, load_graph, parse_end, rose, translation_length
from .patterson import critical_exponent, gibbs_cylinder_measure, growth_slope, patterson_measure_approx
from .quotient_measure import builtin_fixtures, run_quotient_suites
from .selftest import SUITES, run_selftest

EXIT_OK, EXIT_INVARIANT, EXIT_INPUT, EXIT_MODEL = 0, 1, 2, 3

CAPS = {"depth": 10, "radius": 40, "t_max": 10_000.0, "samples": 1_000_000, "word_len": 8}


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    graph: str | None = None
    seed: int = 0
    out: str | None = None
    knobs: dict = field(default_factory=dict)

    def digest(self, graph: MetricGraph | None = None) -> str:
        payload = asdict(self)
        payload.pop("out")
        if graph is not None:
            payload["graph"] = graph.to_json()
        text = json.dumps(payload, sort_keys=True, default=str)
        return hashlib.sha256(text.encode()).hexdigest()[:16]


def _check_caps(**knobs) -> None:
    for k, v in knobs.items():
        if v is None:
            continue
        if v < 0 or v > CAPS[k]:
            raise InputError(f"{k}={v} outside [0, {CAPS[k]}]")


def _graph(path: str | None) -> MetricGraph:
    if path is None:
        return rose(1, 1)
    return load_graph(path)


def _write_csv(out: str | None, header: list[str], rows: list[list], digest: str) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    buf.write(f"# config_hash={digest}\n")
    if out is None:
        sys.stdout.write(buf.getvalue())
    else:
        with open(out, "w", newline="") as fh:
            fh.write(buf.getvalue())


def _fmt(x: float) -> str:
    return repr(float(x))


def _c_text(verdict) -> str:
    if isinstance(verdict, cr.Arithmetic):
        return str(verdict.c) if isinstance(verdict.c, Fraction) else repr(verdict.c)
    return "NA"


def _length_spectrum(g: MetricGraph, max_len: int) -> list[Fraction]:
    out = set()
    for w in enumerate_words(g.rank, max_len):
        loop = w.loop(g)
        if loop and not cyclic_reduction(loop)[0]:
            out.add(translation_length(g, w))
    return sorted(out)


# -------------------------------------------------------------- subcommands
def cmd_analyze(args) -> int:
    _check_caps(radius=args.radius, word_len=args.word_len)
    g = _graph(args.graph)
    w = critical_exponent(g)
    slope = growth_slope(g, args.radius)
    spectrum = _length_spectrum(g, args.word_len)
    if g.inexact:
        verdict = cr.arithmeticity([float(x) for x in g.lengths], exact=False, c_min=args.c_min)
    else:
        verdict = cr.arithmeticity(list(g.lengths))
    print(f"graph: {json.dumps(g.to_json(), sort_keys=True)}")
    print(f"merged_valence2={g.merged} rank={g.rank} exact={not g.inexact}")
    print(f"delta_spectral={w.delta:.12f} residual={w.residual:.2e}")
    print(f"delta_growth={slope:.12f} (secant slope of log|ball| over radius [{args.radius / 2}, {args.radius}])")
    print("length_spectrum: " + " ".join(str(x) for x in spectrum[:24]) + (" ..." if len(spectrum) > 24 else ""))
    print(f"arithmeticity: {verdict}")
    print(f"DELTA={w.delta:.7f} C={_c_text(verdict)}")
    return EXIT_OK


def cmd_measure(args) -> int:
    _check_caps(depth=args.depth, radius=args.radius)
    g = _graph(args.graph)
    w = critical_exponent(g)
    p = TreePoint()
    s = w.delta + args.s_offset
    approx = patterson_measure_approx(g, p, s, args.radius, depth=args.depth, delta=w.delta)
    rows = []
    for cyl, mp in approx.masses.items():
        mg = gibbs_cylinder_measure(w, p, cyl)
        label = ".".join(g.edge_label(d) for d in cyl.path)
        rows.append([label, cyl.depth, _fmt(mg), _fmt(mp), _fmt(abs(mg - mp))])
    rows.sort(key=lambda r: (r[1], r[0]))
    cfg = RunConfig("measure", args.graph, 0, args.out, {"depth": args.depth, "radius": args.radius, "s_offset": args.s_offset})
    _write_csv(args.out, ["cylinder", "depth", "mass_gibbs", "mass_patterson", "residual"], rows, cfg.digest(g))
    print(f"DELTA={w.delta:.7f} s={s:.7f}", file=sys.stderr)
    return EXIT_OK


def _print_suites(results) -> bool:
    ok = True
    first = None
    for module, suites in results.items():
        for r in suites:
            print(f"{module}/{r.name}: passed={r.passed} failed={r.failed}")
            if r.failed:
                ok = False
                if first is None:
                    first = f"{module}/{r.name}: {r.counterexample}"
    if first is not None:
        print(f"COUNTEREXAMPLE {first}")
    return ok


def cmd_crossratio(args) -> int:
    if args.suite:
        ok = _print_suites({"crossratio": SUITES["crossratio"](seed=args.seed)})
        return EXIT_OK if ok else EXIT_INVARIANT
    if len(args.ends) != 4:
        raise InputError("crossratio needs four end expressions (or --suite)")
    g = _graph(args.graph)
    try:
        q = cr.Quadruple(*(parse_end(g, e) for e in args.ends))
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    if not q.valid:
        raise InputError("degenerate quadruple: some required pair of ends coincides")
    print(cr.cross_ratio(g, q))
    return EXIT_OK


def cmd_mix(args) -> int:
    _check_caps(t_max=args.T_max, samples=args.samples)
    g = _graph(args.graph)
    budget = MixingBudget(samples=args.samples, t_min=args.T_max / 2, t_max=args.T_max, seed=args.seed, c_min=args.c_min)
    verdict = mixing_verdict(g, budget)
    period = float(verdict.c) if verdict.c is not None else float(min(g.lengths))
    step = period * math.ceil(1.0 / period)
    times = [k * step for k in range(int(args.T_max // step) + 1)]
    m = BMQuotientMeasure.of(g)
    obs = circle_observable(period)
    curve = correlation_curve(m, obs, obs, times, args.samples, args.seed)
    rows = [[_fmt(c.T), _fmt(c.value), _fmt(c.stderr)] for c in curve]
    cfg = RunConfig("mix", args.graph, args.seed, args.out, {"t_max": args.T_max, "samples": args.samples, "c_min": args.c_min})
    _write_csv(args.out, ["T", "corr", "stderr"], rows, cfg.digest(g))
    if verdict.evidence.get("consistent") is False:
        print("warning: correlation decay disagrees with the lattice fit", file=sys.stderr)
    print(f"VERDICT={verdict.label} c={verdict.c_text}")
    return EXIT_OK


def cmd_quotient_demo(args) -> int:
    results = run_quotient_suites(builtin_fixtures(args.seed), args.seed)
    print(f"{'check':<16}{'passed':>8}{'failed':>8}  status")
    ok = True
    for r in results:
        print(f"{r.name:<16}{r.passed:>8}{r.failed:>8}  {'PASS' if not r.failed else 'FAIL'}")
        ok &= not r.failed
    return EXIT_OK if ok else EXIT_INVARIANT


def cmd_selftest(args) -> int:
    for s in args.suite or []:
        if s not in SUITES:
            raise InputError(f"unknown suite {s!r}; choose from {', '.join(SUITES)}")
    ok = _print_suites(run_selftest(args.suite, seed=args.seed, corrupt=args.corrupt_fixture))
    print("SELFTEST " + ("PASS" if ok else "FAIL"))
    return EXIT_OK if ok else EXIT_INVARIANT


# ------------------------------------------------------------------ parser
def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="treebm", description="Boundary measures and geodesic flows on metric graphs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="critical exponent, rank, length spectrum, arithmeticity")
    p.add_argument("--graph", required=True, help="graph JSON file")
    p.add_argument("--radius", type=float, default=20, help="word radius for the growth estimate")
    p.add_argument("--word-len", type=int, default=6, help="longest cyclic word in the length spectrum")
    p.add_argument("--c-min", type=float, default=1e-4, help="smallest lattice spacing tried for inexact lengths")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("measure", help="Gibbs vs truncated Patterson masses of cylinders, as CSV")
    p.add_argument("--graph", required=True, help="graph JSON file")
    p.add_argument("--depth", type=int, default=2, help="deepest cylinder level in the table")
    p.add_argument("--radius", type=float, default=14, help="truncation radius of the Patterson sum")
    p.add_argument("--s-offset", type=float, default=0.1, help="Patterson exponent s = delta + offset")
    p.add_argument("--out", help="CSV path; stdout if omitted")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("crossratio", help="exact cross-ratio of four ends written prefix:(period)")
    p.add_argument("ends", nargs="*", help="xi xi' eta eta'")
    p.add_argument("--graph", help="graph JSON file; unit rose if omitted")
    p.add_argument("--suite", action="store_true", help="run the identity battery instead")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_crossratio)

    p = sub.add_parser("mix", help="correlation decay of the circle observable, as CSV, plus a verdict")
    p.add_argument("--graph", required=True, help="graph JSON file")
    p.add_argument("--T-max", dest="T_max", type=float, default=100.0, help="largest time lag")
    p.add_argument("--samples", type=int, default=10_000, help="number of trajectories")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--c-min", type=float, default=1e-4, help="smallest lattice spacing tried for inexact lengths")
    p.add_argument("--out", help="CSV path; stdout if omitted")
    p.set_defaults(func=cmd_mix)

    p = sub.add_parser("quotient-demo", help="fundamental-domain checks on built-in finite actions")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_quotient_demo)

    p = sub.add_parser("selftest", help="run every invariant suite")
    p.add_argument("--suite", action="append", help=f"one of {', '.join(SUITES)}; repeatable")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--corrupt-fixture", action="store_true", help="test hook: inject corrupted fixtures")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not 0 <= getattr(args, "seed", 0) < 2**64:
        print("error: seed must fit in 64 bits", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except ValenceError as exc:
        print(f"model constraint violated: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except (GraphFormatError, InputError, BallTooLarge) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
