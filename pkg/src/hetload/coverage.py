"""Analytic coverage probabilities for cell-center and cell-edge users.

The cell-center expression is a single closed form. The cell-edge expression
is an alternating four-index series whose groups decay only cubically in the
summation index, so raw truncation converges far too slowly for tight
tolerances; each group is a signed combination of terms 1/(n + a), which
telescopes into digamma differences, and the implementation sums a few
explicit groups plus the exact digamma tail. The pre-series integral form is
kept alongside as an independent cross-check (it is the test oracle for the
series).

Spectrum policy enters only through the effective femto density seen by the
user class and the activity factor, so a single pair of core routines serves
the shared, co-channel and orthogonal allocations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

from scipy.integrate import quad
from scipy.special import digamma

from .errors import QuadratureError, SeriesConvergenceError
from .interference import femto_coefficient, kernel_g, kernel_h


@dataclass(frozen=True)
class CoverageInputs:
    """Everything a coverage evaluation needs at one SIR threshold.

    `lambda_f_eff` must already reflect the spectrum policy and user class
    (femto density per co-channel, zero where the class is protected).
    """

    beta: float
    lambda_b: float
    lambda_f_eff: float
    zeta: float
    delta: float
    region_ratio: float
    p_f_rel: float

    def __post_init__(self):
        if self.beta < 0:
            raise ValueError("beta must be nonnegative")
        if self.lambda_b <= 0:
            raise ValueError("lambda_b must be positive")
        if self.lambda_f_eff < 0:
            raise ValueError("lambda_f_eff must be nonnegative")
        if not 0.0 <= self.zeta <= 1.0:
            raise ValueError("zeta must lie in [0, 1]")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        if not 0.0 < self.region_ratio <= 1.0:
            raise ValueError("region ratio must lie in (0, 1]")
        if self.p_f_rel <= 0:
            raise ValueError("relative femto power must be positive")

    def at_beta(self, beta: float) -> "CoverageInputs":
        return replace(self, beta=beta)


class SeriesResult(NamedTuple):
    value: float
    terms: int


def cov_ccu(inputs: CoverageInputs) -> float:
    """Coverage probability of a cell-center user.

    1 / (1 + R^2 [zeta H(beta, delta, R) + F]) with F the femto coefficient.
    Exact for the generative model: conditioned on the serving distance, the
    interferer field of a CCU is an unconditioned thinned PPP outside r_c/R.
    """
    if inputs.beta == 0.0:
        return 1.0
    r2 = inputs.region_ratio**2
    h = kernel_h(inputs.beta, inputs.delta, inputs.region_ratio)
    f = femto_coefficient(
        inputs.beta, inputs.delta, inputs.lambda_f_eff, inputs.lambda_b, inputs.p_f_rel
    )
    return 1.0 / (1.0 + r2 * (inputs.zeta * h + f))


def _series_pieces(inputs: CoverageInputs):
    r2 = inputs.region_ratio**2
    h1 = kernel_h(inputs.beta, inputs.delta, 1.0)
    hr = kernel_h(inputs.beta, inputs.delta, inputs.region_ratio)
    g = kernel_g(inputs.beta, inputs.delta, inputs.region_ratio)
    f = femto_coefficient(
        inputs.beta, inputs.delta, inputs.lambda_f_eff, inputs.lambda_b, inputs.p_f_rel
    )
    return r2, h1, hr, g, f


def _ceu_unconditioned_term(inputs: CoverageInputs, r2, h1, f) -> float:
    # Mixture branch with the dominant interferer silent; weight (1 - zeta).
    total = 0.0
    for l in (0, 1):
        total += (-r2) ** l / (1.0 + r2**l * (inputs.zeta * h1 + f))
    return total / (1.0 - r2)


def cov_ceu_series(
    inputs: CoverageInputs, tol: float = 1e-8, max_terms: int = 1000
) -> float:
    """Coverage probability of a cell-edge user (series evaluation)."""
    return cov_ceu_series_detail(inputs, tol, max_terms).value


def cov_ceu_series_detail(
    inputs: CoverageInputs, tol: float = 1e-8, max_terms: int = 1000
) -> SeriesResult:
    """Series evaluation reporting the number of summed groups.

    Groups (fixed n, the four (k, l) sign combinations) are accumulated with
    compensated summation; after each group the exact remainder follows from
    the digamma telescoping of sum_n [1/(n+a) - 1/(n+b)], so the partial sums
    stabilize after the first couple of groups. Convergence is declared when
    consecutive tail-corrected partial sums differ by less than `tol`.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    if inputs.region_ratio == 1.0:
        raise ValueError("cell-edge coverage needs R < 1")
    if inputs.beta == 0.0:
        return SeriesResult(1.0, 0)
    r2, h1, hr, g, f = _series_pieces(inputs)
    zeta = inputs.zeta
    term1 = (1.0 - zeta) * _ceu_unconditioned_term(inputs, r2, h1, f)
    # The conditioned branch carries weight zeta and tends to the
    # unconditioned value as zeta -> 0, so below any meaningful tolerance it
    # only shifts the result by O(zeta); evaluating it down there would
    # overflow the b/c1 ratios. Substitute the limit.
    if zeta < 1e-12:
        return SeriesResult(term1 / (1.0 - zeta), 0)

    c1 = zeta * (1.0 - r2)
    prefactor = zeta * r2 / (1.0 - r2)
    # Denominator offsets b_kl: (n + k) c1 + |k-1| zeta R^2 G + R^2 (zeta H_R + F) + R^(2l)
    offsets = {}
    for k in (0, 1):
        for l in (0, 1):
            offsets[(k, l)] = (
                k * c1 + (1 - k) * zeta * r2 * g + r2 * (zeta * hr + f) + r2**l
            )

    def tail_from(m: int) -> float:
        # sum over n >= m of the four signed 1/(n c1 + b_kl) terms
        total = 0.0
        for (k, l), b in offsets.items():
            sign = (-1.0) ** (k + l + 1)
            total -= sign * digamma(m + b / c1)
        return total / c1

    running = 0.0
    compensation = 0.0
    previous = None
    for n in range(max_terms):
        group = 0.0
        for (k, l), b in offsets.items():
            sign = (-1.0) ** (k + l + 1)
            group += sign / (n * c1 + b)
        # Kahan step: alternating pieces already combined within the group.
        y = group - compensation
        t = running + y
        compensation = (t - running) - y
        running = t
        current = term1 + prefactor * (running + tail_from(n + 1))
        if previous is not None and abs(current - previous) < tol:
            return SeriesResult(min(max(current, 0.0), 1.0), n + 1)
        previous = current
    raise SeriesConvergenceError(
        f"cell-edge series did not meet tol={tol} within {max_terms} groups"
    )


def cov_ceu_integral(inputs: CoverageInputs, epsrel: float = 1e-8) -> float:
    """Cell-edge coverage by direct quadrature of the pre-series integral.

    Written in the substituted variable x = pi lambda_b r_e^2; serves as the
    independent oracle for the series evaluation.
    """
    if inputs.region_ratio == 1.0:
        raise ValueError("cell-edge coverage needs R < 1")
    if inputs.beta == 0.0:
        return 1.0
    r2, h1, hr, g, f = _series_pieces(inputs)
    zeta = inputs.zeta

    def weight(x: float) -> float:
        # exp(-x) - exp(-x / r2), written to survive tiny x
        return -math.exp(-x) * math.expm1(-x * (1.0 / r2 - 1.0))

    def unconditioned(x: float) -> float:
        return math.exp(-x * (zeta * h1 + f)) * weight(x)

    chat = zeta * (1.0 / r2 - 1.0)

    def conditioned(x: float) -> float:
        # chat > zeta*g always (the band integrand is below one), so the
        # bracket is positive and safe to form via expm1.
        num = -math.exp(-x * zeta * g) * math.expm1(-x * (chat - zeta * g))
        den = -math.expm1(-x * chat)
        return (num / den) * math.exp(-x * (zeta * hr + f)) * weight(x)

    off, err_off = quad(unconditioned, 0.0, math.inf, epsabs=1e-13, epsrel=epsrel, limit=300)
    if zeta < 1e-12:  # same continuity argument as the series evaluation
        value = off / (1.0 - r2) / (1.0 - zeta)
        return min(max(value, 0.0), 1.0)
    on, err_on = quad(conditioned, 0.0, math.inf, epsabs=1e-13, epsrel=epsrel, limit=300)
    if not (math.isfinite(off) and math.isfinite(on)):
        raise QuadratureError("cell-edge coverage integral diverged")
    if max(err_off, err_on) > max(1e-10, 10 * epsrel):
        raise QuadratureError(
            f"cell-edge coverage integral error estimate too large ({err_off}, {err_on})"
        )
    value = ((1.0 - zeta) * off + zeta * on) / (1.0 - r2)
    return min(max(value, 0.0), 1.0)


@dataclass(frozen=True)
class CoverageCurve:
    """Per-class coverage evaluated on an ordered SIR threshold grid."""

    thresholds: tuple[float, ...]
    ccu: tuple[float, ...]
    ceu: tuple[float, ...]

    def __post_init__(self):
        if not (len(self.thresholds) == len(self.ccu) == len(self.ceu)):
            raise ValueError("curve arrays must have equal length")
        if any(b <= a for a, b in zip(self.thresholds, self.thresholds[1:])):
            raise ValueError("thresholds must be strictly increasing")


def coverage_curve(
    thresholds,
    ccu_inputs: CoverageInputs,
    ceu_inputs: CoverageInputs,
    tol: float = 1e-8,
    max_terms: int = 1000,
) -> CoverageCurve:
    """Evaluate both classes on a threshold grid (no interpolation; the MCS
    machinery needs exact values at each threshold)."""
    th = tuple(float(t) for t in thresholds)
    ccu_vals = tuple(cov_ccu(ccu_inputs.at_beta(b)) for b in th)
    if ceu_inputs.region_ratio == 1.0:
        raise ValueError("cell-edge coverage needs R < 1")
    ceu_vals = tuple(cov_ceu_series(ceu_inputs.at_beta(b), tol, max_terms) for b in th)
    return CoverageCurve(thresholds=th, ccu=ccu_vals, ceu=ceu_vals)
