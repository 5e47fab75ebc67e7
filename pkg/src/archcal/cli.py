"""Command line: ``archcal sim``, ``archcal calibrate`` and ``archcal plot``."""

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import generator as gen_mod
from .mtp import calibrate, calibrate_bonferroni, decide
from .sim import QUICK_L, SimConfig, expand_sweep, run


def read_matrix(path):
    """Numeric CSV with a header row; ``#`` comment lines are skipped."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            lines = [ln for ln in fh if ln.strip() and not ln.startswith("#")]
    except OSError as exc:
        raise ValueError(f"cannot read {path}: {exc.strerror}") from None
    rows = list(csv.reader(lines))
    if len(rows) < 2:
        raise ValueError(f"{path}: expected a header row and at least one data row")
    header, body = rows[0], rows[1:]
    try:
        data = np.array([[float(v) for v in row] for row in body])
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None
    if data.ndim != 2 or data.shape[1] != len(header):
        raise ValueError(f"{path}: every row needs {len(header)} values")
    if not np.all(np.isfinite(data)):
        raise ValueError(f"{path}: non-finite values")
    return data


def _parse_sweep(text):
    var, _, vals = text.partition("=")
    values = [v for v in vals.split(",") if v.strip()]
    return var.strip(), values


def _cmd_sim(args):
    sweep = None
    if args.sweep:
        var, values = _parse_sweep(args.sweep)
        sweep = (var, expand_sweep(var, values, args.preset))
    L = args.L if args.L is not None else (QUICK_L if args.preset == "quick" else 1000)
    methods = tuple(m.strip() for m in args.methods.split(",")) if args.methods else ()
    cfg = SimConfig(
        sim=args.sim, tau=args.tau, B=args.B, n=args.n, m=args.m, mu=args.mu, rho=args.rho,
        pi0=args.pi0, alpha=args.alpha, L=L, M=args.M, methods=methods, seed=args.seed, sides=args.sides,
    )
    paths = run(cfg, args.out, sweep=sweep, threads=args.threads, plots=not args.no_plots)
    for key, value in paths.items():
        for p in value if isinstance(value, list) else [value]:
            print(f"{key}: {p}")


def _cmd_calibrate(args):
    stats = read_matrix(args.stats)
    B, m = stats.shape
    if args.method == "bonferroni":
        result, gen = calibrate_bonferroni(m, args.alpha), None
    else:
        if m < 2:
            raise ValueError("need at least two columns of statistics")
        if args.method == "gnz":
            gen = gen_mod.fit_generator_gnz(stats)
        elif args.M is None:
            gen = gen_mod.fit_generator_pairwise(stats, "all_pairs")
        else:
            gen = gen_mod.fit_generator_pairwise(stats, "monte_carlo", args.M, args.seed)
        result = calibrate(gen, m, args.alpha, args.method)
    doc = {"alpha": args.alpha, "m": m, "B": B, **result.to_dict()}
    if args.pvalues:
        p = read_matrix(args.pvalues)
        if p.shape[1] != m:
            raise ValueError(f"{args.pvalues}: expected {m} p-values per row, got {p.shape[1]}")
        doc["decisions"] = decide(p, result.alpha_loc).astype(bool).tolist()
    if args.generator_out and gen is not None:
        Path(args.generator_out).write_text(gen_mod.dumps(gen) + "\n", encoding="utf-8")
    print(json.dumps(doc, indent=2))


def _cmd_plot(args):
    from .plots import emit_plots

    for p in emit_plots(args.csv, args.out):
        print(p)


def build_parser():
    parser = argparse.ArgumentParser(prog="archcal", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sim", help="run simulation 1, 2 or 3")
    s.add_argument("--sim", type=int, choices=(1, 2, 3), required=True)
    s.add_argument("--tau", type=float, default=0.5)
    s.add_argument("--B", type=int, default=100)
    s.add_argument("--n", type=int, default=100)
    s.add_argument("--m", type=int, default=6)
    s.add_argument("--mu", type=float, default=0.2)
    s.add_argument("--rho", type=float, default=None, help="sim 3; default sin(pi * tau / 2)")
    s.add_argument("--pi0", type=float, default=0.5)
    s.add_argument("--alpha", type=float, default=0.05)
    s.add_argument("--L", type=int, default=None, help="repetitions (default 1000, quick preset 200)")
    s.add_argument("--M", type=int, default=100, help="column pairs for the pairwise estimator")
    s.add_argument("--methods", default=None, help="comma list of gnz,pairwise,bonferroni,oracle")
    s.add_argument("--sweep", default=None, help="var=v1,v2,... (bare var: the standard grid, capped by --preset quick)")
    s.add_argument("--preset", choices=("quick", "full"), default="full")
    s.add_argument("--threads", type=int, default=None, help="worker processes (capped by ARCHCAL_THREADS)")
    s.add_argument("--sides", type=int, choices=(1, 2), default=2, help="p-values: two-sided (default) or upper one-sided")
    s.add_argument("--no-plots", action="store_true")
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=_cmd_sim)

    c = sub.add_parser("calibrate", help="local significance level from a matrix of LFC statistics")
    c.add_argument("--stats", required=True, help="CSV, header row, one replicate per line")
    c.add_argument("--alpha", type=float, required=True)
    c.add_argument("--method", choices=("gnz", "pairwise", "bonferroni"), required=True)
    c.add_argument("--pvalues", default=None, help="CSV of p-values (header row, m columns)")
    c.add_argument("--M", type=int, default=None, help="pairwise: sample M column pairs instead of all")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--generator-out", default=None, help="write the fitted generator as JSON")
    c.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("plot", help="SVG plots from a summary or pointwise CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_plot)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except ValueError as exc:
        print(f"archcal: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
