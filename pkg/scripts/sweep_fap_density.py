#!/usr/bin/env python3
"""Impact of femto access point density on per-class coverage and blocking
at fixed macro load. Edge-user columns stay flat under shared allocation."""

import argparse
import pathlib

from hetload import CsaPolicy, SsaPolicy
from hetload.runner import SweepSpec, run_sweep

import common


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="results", type=pathlib.Path)
    parser.add_argument("--workers", default=1, type=int)
    args = parser.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)

    values = tuple(r * common.LAMBDA_B for r in (10, 25, 50, 75, 100, 150))
    sweep = SweepSpec(variable="lambda_f", values=values)
    for name, cfg in {
        "csa": common.default_config(CsaPolicy()),
        "ssa_pm04": common.default_config(SsaPolicy(p_m=0.4)),
    }.items():
        out = args.out_dir / f"fap_sweep_{name}.csv"
        run_sweep(cfg, sweep, out, workers=args.workers)
        print(f"wrote {out}")


if __name__ == "__main__":
    main()
