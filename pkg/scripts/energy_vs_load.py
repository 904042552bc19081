#!/usr/bin/env python3
"""Area energy efficiency versus macro load for shared and co-channel
allocation at two rate requirements."""

import argparse
import csv
import pathlib

from hetload import CsaPolicy, SsaPolicy
from hetload.blocking_energy import energy_efficiency, network_blocking
from hetload.load import solve_fixed_point

import common


def eta_for(policy, lam_m, rate):
    cfg = common.default_config(policy, lambda_m_per_min_m2=lam_m, rate_bps=rate)
    sol = solve_fixed_point(cfg)
    rep = network_blocking(cfg, sol)
    return energy_efficiency(cfg, sol, rep).eta


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="results", type=pathlib.Path)
    parser.add_argument("--p-m", default=0.3, type=float)
    args = parser.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)
    out = args.out_dir / "energy_vs_load.csv"

    loads = [v * 1e-4 for v in (0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 4.0)]
    rows = []
    for rate in (180e3, 360e3):
        for lam in loads:
            rows.append({
                "rate_requirement_bps": rate,
                "lambda_m_per_min_m2": lam,
                "eta_ssa_bps_per_joule_m2": eta_for(SsaPolicy(p_m=args.p_m), lam, rate),
                "eta_csa_bps_per_joule_m2": eta_for(CsaPolicy(), lam, rate),
            })
            print(f"rate={rate:.0f} lam={lam:.2e}: "
                  f"ssa={rows[-1]['eta_ssa_bps_per_joule_m2']:.4f} "
                  f"csa={rows[-1]['eta_csa_bps_per_joule_m2']:.4f}")

    with open(out, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
