"""Channel demand, activity factors, and the coverage-load fixed point.

A service at SIR threshold Gamma_i needs rate_bps / (B log2(1+Gamma_i))
channels; averaging over the MCS selection probabilities implied by the
coverage curve gives the mean per-service demand. Demand sets the offered
load per base station, offered load sets the channel activity factor, and
activity thins the interferer field that the coverage curve was computed
from, closing the loop. The loop is solved as a scalar root problem by
bisection (a damped Picard iteration is kept as a cross-check).

Under shared allocation the center and edge bands carry decoupled traffic,
giving two independent scalar fixed points; co-channel and orthogonal
allocation couple both classes through a single activity factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import special
from .config import (
    McsTable,
    ScenarioConfig,
    SsaPolicy,
    effective_fap_density,
    macro_channels,
)
from .coverage import CoverageInputs, cov_ccu, cov_ceu_series
from .errors import FixedPointError

_GAMMA_SHAPE = 3.5  # empirical cell-area law: Gamma(3.5) with mean 1/lambda_b


def mcs_probabilities(coverage_at_thresholds: Sequence[float]) -> np.ndarray:
    """MCS selection probabilities of a served user.

    P_i = [C(Gamma_i) - C(Gamma_{i+1})] / C(Gamma_1) with C(Gamma_{T+1}) = 0;
    the normalizer is the probability of being served at all (coverage at the
    lowest threshold), which makes the masses a proper distribution over the
    MCS levels.
    """
    cov = np.asarray(coverage_at_thresholds, dtype=float)
    if cov.ndim != 1 or cov.size < 1:
        raise ValueError("need a 1-D coverage vector")
    if np.any(cov < -1e-12) or np.any(cov > 1 + 1e-12):
        raise ValueError("coverage values must lie in [0, 1]")
    if np.any(np.diff(cov) > 1e-12):
        raise ValueError("coverage must be nonincreasing over the thresholds")
    if cov[0] <= 0.0:
        raise ValueError("no user is served at the lowest MCS threshold")
    diffs = cov - np.append(cov[1:], 0.0)
    return np.clip(diffs, 0.0, None) / cov[0]


def mean_channels(coverage_at_thresholds: Sequence[float], mcs: McsTable) -> float:
    """Mean number of channels per admitted service."""
    masses = mcs_probabilities(coverage_at_thresholds)
    if masses.size != len(mcs.thresholds):
        raise ValueError("coverage vector length must match the MCS table")
    return float(np.dot(mcs.channel_demands(), masses))


def cell_area_pdf(a, lambda_b: float):
    """Density of the typical cell area: Gamma(3.5, rate 3.5 lambda_b).

    Integrates to one with mean 1/lambda_b; the mode sits at 2.5/(3.5
    lambda_b). Accepts scalar or array a.
    """
    if lambda_b <= 0:
        raise ValueError("lambda_b must be positive")
    arr = np.asarray(a, dtype=float)
    if np.any(arr < 0):
        raise ValueError("cell area must be nonnegative")
    rate = _GAMMA_SHAPE * lambda_b
    out = (
        rate**_GAMMA_SHAPE
        / math.gamma(_GAMMA_SHAPE)
        * arr ** (_GAMMA_SHAPE - 1.0)
        * np.exp(-rate * arr)
    )
    return out if out.ndim else float(out)


def cell_area_quantile(q: float, lambda_b: float) -> float:
    """Quantile of the cell-area law (used to truncate area integrals)."""
    from scipy.special import gammaincinv

    if not 0.0 < q < 1.0:
        raise ValueError("quantile must lie in (0, 1)")
    return float(gammaincinv(_GAMMA_SHAPE, q) / (_GAMMA_SHAPE * lambda_b))


def activity_factor(offered_ratio: float) -> float:
    """Channel activity factor of a base station at the given offered ratio.

    `offered_ratio` is arrival_rate * mean_demand / (lambda_b * mu * band
    size): the mean cell's offered channel load relative to the band. The
    per-cell activity min(a * offered_ratio * lambda_b, 1) averaged over the
    Gamma(3.5) area law gives

        rho/3.5 * gamma(4.5, 3.5/rho)/Gamma(3.5) + Gamma(3.5, 3.5/rho)/Gamma(3.5)

    which rises monotonically from 0 to 1 in the offered ratio rho.
    """
    if offered_ratio < 0:
        raise ValueError("offered ratio must be nonnegative")
    if offered_ratio == 0.0:
        return 0.0
    x = _GAMMA_SHAPE / offered_ratio
    clipped = (
        offered_ratio
        / _GAMMA_SHAPE
        * special.reg_lower_gamma(_GAMMA_SHAPE + 1.0, x)
        * _GAMMA_SHAPE  # Gamma(4.5) / Gamma(3.5)
    )
    saturated = special.reg_upper_gamma(_GAMMA_SHAPE, x)
    return min(clipped + saturated, 1.0)


@dataclass(frozen=True)
class LoadSolution:
    """Converged activity factors with the coverage and demand state behind
    them. `zeta_sc`/`zeta_se` are set under SSA, `zeta_c` otherwise."""

    policy: str
    zeta_sc: float | None
    zeta_se: float | None
    zeta_c: float | None
    nbar_c: float
    nbar_e: float
    ccu_coverage: tuple[float, ...]
    ceu_coverage: tuple[float, ...]
    residual: float
    iterations: int

    @property
    def zeta_ccu(self) -> float:
        """Activity thinning the interferers of a cell-center user."""
        return self.zeta_sc if self.zeta_sc is not None else self.zeta_c

    @property
    def zeta_ceu(self) -> float:
        return self.zeta_se if self.zeta_se is not None else self.zeta_c

    @property
    def zeta_overall(self) -> float:
        """Bandwidth-weighted activity of a base station."""
        if self.zeta_c is not None:
            return self.zeta_c
        return self._pm * self.zeta_sc + (1.0 - self._pm) * self.zeta_se

    _pm: float | None = None


def _bisect_fixed_point(
    phi: Callable[[float], float], tol: float, max_iter: int
) -> tuple[float, float, int]:
    """Root of g(z) = z - phi(z) on [0, 1] by bisection.

    phi maps [0, 1] into [0, 1], so g(0) <= 0 <= g(1) and a root is always
    bracketed. Returns (zeta, residual, iterations).
    """
    g_lo = -phi(0.0)
    if abs(g_lo) <= tol:
        return 0.0, abs(g_lo), 0
    g_hi = 1.0 - phi(1.0)
    if g_lo > 0 or g_hi < 0:
        raise FixedPointError(
            f"fixed-point map lost its bracket: g(0)={g_lo:.3e}, g(1)={g_hi:.3e}"
        )
    if abs(g_hi) <= tol:
        return 1.0, abs(g_hi), 0
    lo, hi = 0.0, 1.0
    mid, g_mid = 0.5, 0.0
    for it in range(1, max_iter + 1):
        mid = 0.5 * (lo + hi)
        g_mid = mid - phi(mid)
        if abs(g_mid) <= tol:
            return mid, abs(g_mid), it
        if g_mid > 0:
            hi = mid
        else:
            lo = mid
    raise FixedPointError(
        f"bisection did not reach tol={tol} in {max_iter} iterations; "
        f"last bracket [{lo}, {hi}], residual {abs(g_mid):.3e}"
    )


def _picard_fixed_point(
    phi: Callable[[float], float], tol: float, max_iter: int, damping: float = 0.5
) -> tuple[float, float, int]:
    """Damped Picard iteration, kept as an independent cross-check solver."""
    z = 0.5
    for it in range(1, max_iter + 1):
        z = (1.0 - damping) * z + damping * phi(z)
        residual = abs(z - phi(z))
        if residual <= tol:
            return z, residual, it
    raise FixedPointError(f"Picard iteration did not converge in {max_iter} steps")


def _ssa_band_map(
    config: ScenarioConfig, user_class: str
) -> tuple[Callable[[float], float], Callable[[float], tuple[float, tuple[float, ...]]]]:
    policy: SsaPolicy = config.policy
    r2 = config.region_ratio**2
    arrival = config.lambda_m_per_min_m2 * (r2 if user_class == "ccu" else 1.0 - r2)
    band = config.n_channels * (policy.p_m if user_class == "ccu" else 1.0 - policy.p_m)
    lam_f_eff = effective_fap_density(
        policy, config.lambda_f_per_m2, config.n_channels, user_class
    )

    def demand(zeta: float) -> tuple[float, tuple[float, ...]]:
        inputs = CoverageInputs(
            beta=1.0,
            lambda_b=config.lambda_b_per_m2,
            lambda_f_eff=lam_f_eff,
            zeta=zeta,
            delta=config.delta,
            region_ratio=config.region_ratio,
            p_f_rel=config.p_f_rel,
        )
        if user_class == "ccu":
            cov = tuple(cov_ccu(inputs.at_beta(b)) for b in config.mcs_thresholds)
        else:
            cov = tuple(
                cov_ceu_series(inputs.at_beta(b), config.series_tol, config.series_max_terms)
                for b in config.mcs_thresholds
            )
        return mean_channels(cov, config.mcs), cov

    def phi(zeta: float) -> float:
        nbar, _ = demand(zeta)
        offered = arrival * nbar / (config.lambda_b_per_m2 * config.mu_per_min * band)
        return activity_factor(offered)

    return phi, demand


def _coupled_map(config: ScenarioConfig):
    """CSA/OSA: one activity factor drives both classes."""
    r2 = config.region_ratio**2
    n_macro = macro_channels(config.policy, config.n_channels)
    lam_f_ccu = effective_fap_density(
        config.policy, config.lambda_f_per_m2, config.n_channels, "ccu"
    )
    lam_f_ceu = effective_fap_density(
        config.policy, config.lambda_f_per_m2, config.n_channels, "ceu"
    )

    def demand(zeta: float):
        base = dict(
            lambda_b=config.lambda_b_per_m2,
            zeta=zeta,
            delta=config.delta,
            region_ratio=config.region_ratio,
            p_f_rel=config.p_f_rel,
        )
        ccu_inputs = CoverageInputs(beta=1.0, lambda_f_eff=lam_f_ccu, **base)
        ceu_inputs = CoverageInputs(beta=1.0, lambda_f_eff=lam_f_ceu, **base)
        cov_c = tuple(cov_ccu(ccu_inputs.at_beta(b)) for b in config.mcs_thresholds)
        cov_e = tuple(
            cov_ceu_series(ceu_inputs.at_beta(b), config.series_tol, config.series_max_terms)
            for b in config.mcs_thresholds
        )
        nbar_c = mean_channels(cov_c, config.mcs)
        nbar_e = mean_channels(cov_e, config.mcs)
        nbar = r2 * nbar_c + (1.0 - r2) * nbar_e  # arrival-weighted mean demand
        return nbar, nbar_c, nbar_e, cov_c, cov_e

    def phi(zeta: float) -> float:
        nbar = demand(zeta)[0]
        offered = (
            config.lambda_m_per_min_m2
            * nbar
            / (config.lambda_b_per_m2 * config.mu_per_min * n_macro)
        )
        return activity_factor(offered)

    return phi, demand


def solve_fixed_point(
    config: ScenarioConfig,
    tol: float | None = None,
    max_iter: int | None = None,
    method: str = "bisection",
) -> LoadSolution:
    """Solve the coverage-activity fixed point for the configured policy."""
    tol = config.solver_tol if tol is None else tol
    max_iter = config.solver_max_iter if max_iter is None else max_iter
    if method == "bisection":
        solver = _bisect_fixed_point
    elif method == "picard":
        solver = _picard_fixed_point
    else:
        raise ValueError(f"unknown solver method {method!r}")

    if isinstance(config.policy, SsaPolicy):
        phi_c, demand_c = _ssa_band_map(config, "ccu")
        phi_e, demand_e = _ssa_band_map(config, "ceu")
        zeta_sc, res_c, it_c = solver(phi_c, tol, max_iter)
        zeta_se, res_e, it_e = solver(phi_e, tol, max_iter)
        nbar_c, cov_c = demand_c(zeta_sc)
        nbar_e, cov_e = demand_e(zeta_se)
        return LoadSolution(
            policy=config.policy.name,
            zeta_sc=zeta_sc,
            zeta_se=zeta_se,
            zeta_c=None,
            nbar_c=nbar_c,
            nbar_e=nbar_e,
            ccu_coverage=cov_c,
            ceu_coverage=cov_e,
            residual=max(res_c, res_e),
            iterations=max(it_c, it_e),
            _pm=config.policy.p_m,
        )

    phi, demand = _coupled_map(config)
    zeta_c, res, iters = solver(phi, tol, max_iter)
    _, nbar_c, nbar_e, cov_c, cov_e = demand(zeta_c)
    return LoadSolution(
        policy=config.policy.name,
        zeta_sc=None,
        zeta_se=None,
        zeta_c=zeta_c,
        nbar_c=nbar_c,
        nbar_e=nbar_e,
        ccu_coverage=cov_c,
        ceu_coverage=cov_e,
        residual=res,
        iterations=iters,
    )
