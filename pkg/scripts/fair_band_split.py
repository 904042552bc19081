#!/usr/bin/env python3
"""Band split p_m that equalizes center and edge blocking, across femto
densities."""

import argparse
import csv
import pathlib

from hetload import SsaPolicy
from hetload.blocking_energy import fair_pm_search, network_blocking
from hetload.errors import BracketSearchError
from hetload.load import solve_fixed_point

import common


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="results", type=pathlib.Path)
    parser.add_argument("--lambda-m", default=3e-4, type=float)
    args = parser.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)
    out = args.out_dir / "fair_band_split.csv"

    rows = []
    for ratio in (10, 25, 50, 100, 150):
        cfg = common.default_config(
            SsaPolicy(p_m=0.4),
            lambda_f_per_m2=ratio * common.LAMBDA_B,
            lambda_m_per_min_m2=args.lambda_m,
        )
        try:
            p_m = fair_pm_search(cfg, target_tol=1e-4, bracket=(0.15, 0.8))
        except BracketSearchError as exc:
            print(f"ratio={ratio}: {exc}")
            rows.append({"lambda_f_over_lambda_b": ratio, "fair_p_m": "",
                         "block_ccu": "", "block_ceu": ""})
            continue
        fair_cfg = cfg.with_policy(SsaPolicy(p_m=p_m))
        rep = network_blocking(fair_cfg, solve_fixed_point(fair_cfg))
        rows.append({"lambda_f_over_lambda_b": ratio, "fair_p_m": p_m,
                     "block_ccu": rep.b_ccu, "block_ceu": rep.b_ceu})
        print(f"ratio={ratio}: fair p_m = {p_m:.4f} (blocking {rep.b_ccu:.5f})")

    with open(out, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
