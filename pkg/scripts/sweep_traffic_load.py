#!/usr/bin/env python3
"""Per-class coverage and blocking versus macro traffic load, comparing
co-channel allocation against shared allocation at several band splits."""

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

    values = tuple(v * 1e-4 for v in (0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0))
    sweep = SweepSpec(variable="lambda_m", values=values)
    cases = {
        "csa": common.default_config(CsaPolicy(), lambda_f_per_m2=100 * common.LAMBDA_B),
        "ssa_pm03": common.default_config(
            SsaPolicy(p_m=0.3), lambda_f_per_m2=100 * common.LAMBDA_B
        ),
        "ssa_pm05": common.default_config(
            SsaPolicy(p_m=0.5), lambda_f_per_m2=100 * common.LAMBDA_B
        ),
    }
    for name, cfg in cases.items():
        out = args.out_dir / f"load_sweep_{name}.csv"
        run_sweep(cfg, sweep, out, workers=args.workers)
        print(f"wrote {out}")


if __name__ == "__main__":
    main()
