#!/usr/bin/env python3
"""Analytic outage vs Monte-Carlo simulation across activity factors and
femto densities (shared allocation, p_m = 0.4). Writes one CSV."""

import argparse
import csv
import pathlib

from hetload import SsaPolicy, effective_fap_density, simulate_outage
from hetload.coverage import cov_ccu, cov_ceu_series, CoverageInputs

import common


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="results", type=pathlib.Path)
    parser.add_argument("--trials", default=100_000, type=int)
    parser.add_argument("--seed", default=7, type=int)
    args = parser.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)
    out = args.out_dir / "outage_validation.csv"

    rows = []
    for zeta in (0.1, 1.0):
        for ratio in (10, 50, 100):
            cfg = common.default_config(
                SsaPolicy(p_m=0.4), lambda_f_per_m2=ratio * common.LAMBDA_B
            )
            lam_f_eff = effective_fap_density(
                cfg.policy, cfg.lambda_f_per_m2, cfg.n_channels, "ccu"
            )
            base = dict(
                beta=cfg.beta, lambda_b=cfg.lambda_b_per_m2, zeta=zeta,
                delta=cfg.delta, region_ratio=cfg.region_ratio, p_f_rel=cfg.p_f_rel,
            )
            ana_ccu = 1.0 - cov_ccu(CoverageInputs(lambda_f_eff=lam_f_eff, **base))
            ana_ceu = 1.0 - cov_ceu_series(CoverageInputs(lambda_f_eff=0.0, **base))
            sim = simulate_outage(cfg, zeta, trials=args.trials, seed=args.seed)
            rows.append({
                "zeta": zeta,
                "lambda_f_over_lambda_b": ratio,
                "analytic_outage_ccu": ana_ccu,
                "mc_outage_ccu": sim.ccu[0].mean,
                "mc_stderr_ccu": sim.ccu[0].stderr,
                "analytic_outage_ceu": ana_ceu,
                "mc_outage_ceu": sim.ceu[0].mean,
                "mc_stderr_ceu": sim.ceu[0].stderr,
            })
            print(f"zeta={zeta} ratio={ratio}: "
                  f"ccu {ana_ccu:.4f}/{sim.ccu[0].mean:.4f} "
                  f"ceu {ana_ceu:.4f}/{sim.ceu[0].mean:.4f}")

    with open(out, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
