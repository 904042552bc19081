"""Command-line interface.

Subcommands map to the result classes of the analysis: `analyze` runs one
scenario, `sweep` emits a CSV over a parameter grid, `validate` puts the
analytic outage next to the Monte-Carlo estimate, and `fair-pm` searches for
the band split that equalizes per-class blocking.

Exit codes: 0 success, 1 configuration/validation error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from .blocking_energy import fair_pm_search
from .config import load_scenario
from .errors import ConfigError, HetloadError, NumericalError
from .runner import SweepSpec, run_scenario, run_sweep

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="scenario JSON file")
    parser.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    parser.add_argument("--quiet", action="store_true", help="suppress progress output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hetload",
        description="Load-aware coverage, blocking and energy analysis for "
        "two-tier random cellular networks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="run one scenario and print the report")
    _add_common(p)
    p.add_argument("--out", default=None, help="write the JSON report here")
    p.add_argument(
        "--mc-trials", type=int, default=0,
        help="attach a Monte-Carlo outage validation block with this many trials",
    )

    p = sub.add_parser("sweep", help="sweep one parameter and emit a CSV")
    _add_common(p)
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument(
        "--variable", required=True, choices=("lambda_m", "lambda_f", "p_m", "beta")
    )
    p.add_argument(
        "--values", required=True,
        help="comma-separated, strictly increasing sweep values",
    )
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("validate", help="analytic vs Monte-Carlo outage, side by side")
    _add_common(p)
    p.add_argument("--mc-trials", type=int, default=100_000)
    p.add_argument("--out", default=None, help="write the JSON comparison here")

    p = sub.add_parser("fair-pm", help="find the band split equalizing class blocking")
    _add_common(p)
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--bracket", default="0.05,0.95", help="search interval lo,hi")
    return parser


def _load(args):
    config = load_scenario(args.config)
    if args.seed is not None:
        from dataclasses import replace

        config = replace(config, seed=args.seed)
    return config


def _cmd_analyze(args) -> int:
    config = _load(args)
    report = run_scenario(config, mc_trials=args.mc_trials)
    doc = json.dumps(report.to_dict(), indent=2)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(doc + "\n")
    if not args.quiet:
        print(doc)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    config = _load(args)
    try:
        values = tuple(float(v) for v in args.values.split(",") if v.strip() != "")
    except ValueError as exc:
        raise ConfigError("sweep.values", f"could not parse values: {exc}") from exc
    spec = SweepSpec(variable=args.variable, values=values)
    results = run_sweep(config, spec, args.out, workers=args.workers)
    failures = [r for r in results if r[1] is None]
    if not args.quiet:
        print(f"wrote {len(results)} rows to {args.out} ({len(failures)} failed points)")
    return EXIT_OK


def _cmd_validate(args) -> int:
    config = _load(args)
    report = run_scenario(config, mc_trials=args.mc_trials)
    sim = report.validation
    rows = {
        "beta": config.beta,
        "analytic_outage_ccu": 1.0 - report.cov_ccu_at_beta,
        "analytic_outage_ceu": 1.0 - report.cov_ceu_at_beta,
        "mc_outage_ccu": sim.ccu[0].mean,
        "mc_outage_ccu_stderr": sim.ccu[0].stderr,
        "mc_outage_ceu": sim.ceu[0].mean,
        "mc_outage_ceu_stderr": sim.ceu[0].stderr,
        "trials": sim.trials,
    }
    doc = json.dumps(rows, indent=2)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(doc + "\n")
    if not args.quiet:
        print(doc)
    return EXIT_OK


def _cmd_fair_pm(args) -> int:
    config = _load(args)
    try:
        lo, hi = (float(v) for v in args.bracket.split(","))
    except ValueError as exc:
        raise ConfigError("bracket", f"expected 'lo,hi', got {args.bracket!r}") from exc
    p_m = fair_pm_search(config, target_tol=args.tol, bracket=(lo, hi))
    if not args.quiet:
        print(json.dumps({"p_m": p_m}))
    return EXIT_OK


_COMMANDS = {
    "analyze": _cmd_analyze,
    "sweep": _cmd_sweep,
    "validate": _cmd_validate,
    "fair-pm": _cmd_fair_pm,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except HetloadError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
