"""Command-line front end: ``suploc {moments,recover,sweep,report}``.

Exit codes: 0 success, 2 input error, 3 numerical failure, 4 recovery
warnings under ``--strict``.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import sweep as sweep_mod
from ._io import read_json, write_text
from .errors import InputError, NonPSD, NumericalError, ParseError
from .measure import moments, spec_from_dict
from .metrics import SupportSet, hausdorff
from .momentio import DEFAULT_TAU, MomentData, moments_from_dict
from .recover import suploc

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_WARNING = 4

REGIMES = ("flat", "single", "outside", "general", "auto")


def _load_source(path):
    """A measure spec or a moment file, told apart by their keys."""
    data = read_json(path)
    if isinstance(data, dict) and ({"moments", "matrix"} & set(data)):
        return moments_from_dict(data)
    return spec_from_dict(data)


def cmd_moments(args) -> int:
    spec = spec_from_dict(read_json(args.input))
    if args.degree < 0:
        raise InputError("--degree must be non-negative")
    y = moments(spec, 2 * args.degree)
    write_text(args.out, json.dumps({"moments": [float(v) for v in y]}) + "\n")
    return EXIT_OK


def cmd_recover(args) -> int:
    source = _load_source(args.input)
    est = suploc(source, args.epsilon, args.degree, args.regime, args.tau)
    write_text(args.out, est.to_json() + "\n")
    summary = (
        f"regime={est.regime.value} N={est.degree} atoms={len(est.atoms)} "
        f"intervals={len(est.intervals)} pollution={len(est.pollution)}"
    )
    if not isinstance(source, MomentData):
        d_h = hausdorff(SupportSet.from_spec(source), SupportSet.from_estimate(est)) if (
            est.atoms or est.intervals
        ) else float("inf")
        summary += f" d_H={d_h:.3e}"
    if est.warnings:
        summary += " warnings=" + ",".join(est.warnings)
    print(summary, file=sys.stderr)
    if args.strict and est.warnings:
        return EXIT_WARNING
    return EXIT_OK


def cmd_sweep(args) -> int:
    data = read_json(args.input)
    if not isinstance(data, dict):
        raise ParseError("sweep config must be a JSON object")
    # command-line flags override the file only when given
    overrides = {
        "epsilon": args.epsilon,
        "regime": args.regime,
        "noise_sigma": args.noise_sigma,
        "seed": args.seed,
        "tau": args.tau,
    }
    data.update({k: v for k, v in overrides.items() if v is not None})
    if args.degree is not None:
        data["degrees"] = [args.degree]
    cfg = sweep_mod.config_from_dict(data)
    rows = sweep_mod.run_sweep(cfg)
    write_text(args.out, sweep_mod.rows_to_csv(rows))
    flagged = sum(1 for row in rows if row["warnings"])
    print(f"cells={len(rows)} flagged={flagged}", file=sys.stderr)
    if args.strict and flagged:
        return EXIT_WARNING
    return EXIT_OK


def cmd_report(args) -> int:
    if str(args.input) == "-":
        rows = sweep_mod.read_csv(sys.stdin)
    else:
        rows = sweep_mod.read_csv(args.input)
    if not rows:
        raise ParseError("sweep CSV has no rows")
    write_text(args.out, sweep_mod.report_csv(rows, args.threshold))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="suploc",
        description="Locate atoms and intervals of a measure from its moments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, default_degree, regime_default, sweep=False):
        p.add_argument("input", help='input file, or "-" for stdin')
        p.add_argument("--out", default=None, help="output file (default: stdout)")
        p.add_argument("--epsilon", type=float, default=None if sweep else 1e-2)
        p.add_argument("--degree", type=int, default=default_degree)
        p.add_argument("--regime", choices=REGIMES, default=regime_default)
        p.add_argument("--tau", type=float, default=None if sweep else DEFAULT_TAU)
        p.add_argument("--strict", action="store_true", help="exit 4 on recovery warnings")

    p = sub.add_parser("moments", help="moments y_0..y_2N of a measure spec")
    p.add_argument("input", help='measure spec JSON, or "-"')
    p.add_argument("--degree", type=int, required=True, help="N; writes 2N+1 moments")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("recover", help="estimate the support from a spec or moment file")
    common(p, 40, "auto")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("sweep", help="run a parameter sweep, write CSV")
    common(p, None, None, sweep=True)
    p.add_argument("--noise-sigma", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("report", help="aggregate a sweep CSV over c")
    p.add_argument("input", help='sweep CSV, or "-"')
    p.add_argument("--out", default=None)
    p.add_argument("--threshold", type=float, default=0.8)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NonPSD as exc:
        print(f"error: NonPSD: moment matrix not PSD, min_eig={exc.min_eig:.6e}", file=sys.stderr)
        return EXIT_INPUT
    except InputError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
