"""Scenario pipeline composition, parameter sweeps and CSV emission."""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from .blocking_energy import (
    BlockingReport,
    EnergyReport,
    energy_efficiency,
    network_blocking,
)
from .config import ScenarioConfig, SsaPolicy, scenario_to_dict
from .coverage import CoverageCurve
from .errors import ConfigError, ZeroLoadError
from .load import LoadSolution, solve_fixed_point
from .montecarlo import OutageEstimates, simulate_outage


@dataclass(frozen=True)
class ScenarioReport:
    """Everything the pipeline produces for one scenario."""

    config: ScenarioConfig
    solution: LoadSolution
    coverage: CoverageCurve
    cov_ccu_at_beta: float
    cov_ceu_at_beta: float
    blocking: BlockingReport
    energy: EnergyReport | None
    validation: OutageEstimates | None = None

    def to_dict(self) -> dict:
        out = {
            "config": scenario_to_dict(self.config),
            "solution": {
                "policy": self.solution.policy,
                "zeta_sc": self.solution.zeta_sc,
                "zeta_se": self.solution.zeta_se,
                "zeta_c": self.solution.zeta_c,
                "nbar_c": self.solution.nbar_c,
                "nbar_e": self.solution.nbar_e,
                "residual": self.solution.residual,
                "iterations": self.solution.iterations,
            },
            "coverage": {
                "thresholds": list(self.coverage.thresholds),
                "ccu": list(self.coverage.ccu),
                "ceu": list(self.coverage.ceu),
            },
            "cov_ccu_at_beta": self.cov_ccu_at_beta,
            "cov_ceu_at_beta": self.cov_ceu_at_beta,
            "blocking": {
                "b_ccu": self.blocking.b_ccu,
                "b_ceu": self.blocking.b_ceu,
                "b_network": self.blocking.b_network,
            },
            "energy": None
            if self.energy is None
            else {"eta": self.energy.eta, "zeta_overall": self.energy.zeta_overall},
        }
        if self.validation is not None:
            out["validation"] = {
                "thresholds": list(self.validation.thresholds),
                "outage_ccu": [
                    {"mean": e.mean, "stderr": e.stderr, "trials": e.trials}
                    for e in self.validation.ccu
                ],
                "outage_ceu": [
                    {"mean": e.mean, "stderr": e.stderr, "trials": e.trials}
                    for e in self.validation.ceu
                ],
            }
        return out


def _coverage_at(config: ScenarioConfig, solution: LoadSolution, beta: float):
    from .config import effective_fap_density
    from .coverage import CoverageInputs, cov_ccu, cov_ceu_series

    base = dict(
        beta=beta,
        lambda_b=config.lambda_b_per_m2,
        delta=config.delta,
        region_ratio=config.region_ratio,
        p_f_rel=config.p_f_rel,
    )
    ccu_inputs = CoverageInputs(
        zeta=solution.zeta_ccu,
        lambda_f_eff=effective_fap_density(
            config.policy, config.lambda_f_per_m2, config.n_channels, "ccu"
        ),
        **base,
    )
    ceu_inputs = CoverageInputs(
        zeta=solution.zeta_ceu,
        lambda_f_eff=effective_fap_density(
            config.policy, config.lambda_f_per_m2, config.n_channels, "ceu"
        ),
        **base,
    )
    return (
        cov_ccu(ccu_inputs),
        cov_ceu_series(ceu_inputs, config.series_tol, config.series_max_terms),
    )


def run_scenario(
    config: ScenarioConfig, mc_trials: int = 0, seed: int | None = None
) -> ScenarioReport:
    """Full analytic pipeline for one scenario, with an optional Monte-Carlo
    outage validation block when mc_trials > 0."""
    solution = solve_fixed_point(config)
    curve = CoverageCurve(
        thresholds=tuple(config.mcs_thresholds),
        ccu=solution.ccu_coverage,
        ceu=solution.ceu_coverage,
    )
    cov_c, cov_e = _coverage_at(config, solution, config.beta)
    blocking = network_blocking(config, solution)
    try:
        energy = energy_efficiency(config, solution, blocking)
    except ZeroLoadError:
        energy = None
    validation = None
    if mc_trials > 0:
        validation = simulate_outage(
            config,
            (solution.zeta_ccu, solution.zeta_ceu),
            thresholds=(config.beta,),
            trials=mc_trials,
            seed=config.seed if seed is None else seed,
        )
    return ScenarioReport(
        config=config,
        solution=solution,
        coverage=curve,
        cov_ccu_at_beta=cov_c,
        cov_ceu_at_beta=cov_e,
        blocking=blocking,
        energy=energy,
        validation=validation,
    )


_SWEEP_VARIABLES = ("lambda_m", "lambda_f", "p_m", "beta")


@dataclass(frozen=True)
class SweepSpec:
    """A one-dimensional parameter sweep request."""

    variable: str
    values: tuple[float, ...]

    def __post_init__(self):
        if self.variable not in _SWEEP_VARIABLES:
            raise ConfigError(
                "sweep.variable",
                f"must be one of {_SWEEP_VARIABLES}, got {self.variable!r}",
            )
        if len(self.values) == 0:
            raise ConfigError("sweep.values", "sweep must contain at least one value")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ConfigError("sweep.values", "values must be strictly increasing")


def apply_sweep_value(
    config: ScenarioConfig, variable: str, value: float
) -> ScenarioConfig:
    if variable == "lambda_m":
        return replace(config, lambda_m_per_min_m2=value)
    if variable == "lambda_f":
        return replace(config, lambda_f_per_m2=value)
    if variable == "beta":
        return replace(config, beta=value)
    if variable == "p_m":
        if not isinstance(config.policy, SsaPolicy):
            raise ConfigError("sweep.variable", "p_m sweeps require the SSA policy")
        return config.with_policy(SsaPolicy(p_m=value))
    raise ConfigError("sweep.variable", f"unknown variable {variable!r}")


SWEEP_COLUMNS = (
    "zeta_sc",
    "zeta_se",
    "zeta_c",
    "nbar_ccu_channels",
    "nbar_ceu_channels",
    "cov_ccu_at_beta",
    "cov_ceu_at_beta",
    "block_ccu",
    "block_ceu",
    "block_network",
    "eta_bps_per_joule_m2",
)

_VARIABLE_HEADER = {
    "lambda_m": "lambda_m_per_min_m2",
    "lambda_f": "lambda_f_per_m2",
    "p_m": "p_m",
    "beta": "beta",
}


def _format(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return format(x, ".12g")


def _sweep_point(args) -> tuple[float, dict | None, str]:
    config, variable, value = args
    try:
        cfg = apply_sweep_value(config, variable, value)
        report = run_scenario(cfg)
    except Exception as exc:  # recorded as a marked row, never aborts the sweep
        return value, None, f"error:{type(exc).__name__}"
    row = {
        "zeta_sc": report.solution.zeta_sc,
        "zeta_se": report.solution.zeta_se,
        "zeta_c": report.solution.zeta_c,
        "nbar_ccu_channels": report.solution.nbar_c,
        "nbar_ceu_channels": report.solution.nbar_e,
        "cov_ccu_at_beta": report.cov_ccu_at_beta,
        "cov_ceu_at_beta": report.cov_ceu_at_beta,
        "block_ccu": report.blocking.b_ccu,
        "block_ceu": report.blocking.b_ceu,
        "block_network": report.blocking.b_network,
        "eta_bps_per_joule_m2": None if report.energy is None else report.energy.eta,
    }
    return value, row, "ok"


def run_sweep(
    config: ScenarioConfig,
    sweep: SweepSpec,
    out_path,
    workers: int = 1,
) -> list[tuple[float, dict | None, str]]:
    """Run the sweep and write one CSV row per value (ordered by value).

    Failed points are marked in the status column rather than aborting the
    sweep. Numbers are written with 12 significant digits, UTF-8, newline
    line endings.
    """
    points = [(config, sweep.variable, v) for v in sweep.values]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_point, points))
    else:
        results = [_sweep_point(p) for p in points]
    results.sort(key=lambda r: r[0])

    header = [_VARIABLE_HEADER[sweep.variable], *SWEEP_COLUMNS, "status"]
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for value, row, status in results:
            if row is None:
                writer.writerow([_format(value)] + [""] * len(SWEEP_COLUMNS) + [status])
            else:
                writer.writerow(
                    [_format(value)]
                    + [_format(row[c]) for c in SWEEP_COLUMNS]
                    + [status]
                )
    return results
