"""Laplace-transform kernels of the macro- and femto-tier interference.

Everything reduces to the tail integral J(L) = int_L^inf du / (1 + u^(1/delta))
with delta = 2/alpha in (0, 1). For alpha = 4 (delta = 1/2) the integral has
the closed form pi/2 - arctan(L); other exponents fall back to adaptive
quadrature with relative tolerance 1e-10.

The femto-tier transform integrates over the whole plane with no exclusion
zone and evaluates in closed form. Macro-tier transforms carry an exclusion
ball whose radius encodes what is known about the nearest interferer: r_c/R
for a cell-center user, r_e for a cell-edge user whose dominant interferer is
silent, and a conditioned annulus term when it transmits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.integrate import quad

from .errors import QuadratureError

_QUAD_EPSREL = 1e-10
_QUAD_EPSABS = 1e-14


@dataclass(frozen=True)
class PathLossModel:
    """Power-law path loss r^-alpha; caches delta = 2/alpha."""

    alpha: float

    def __post_init__(self):
        if not self.alpha > 2:
            raise ValueError(f"alpha must exceed 2 for finite interference, got {self.alpha}")

    @property
    def delta(self) -> float:
        return 2.0 / self.alpha


@dataclass(frozen=True)
class TierPowers:
    """Per-channel transmit powers of the two tiers."""

    p_b: float
    p_f: float

    def __post_init__(self):
        if self.p_b <= 0 or self.p_f <= 0:
            raise ValueError("transmit powers must be positive")

    @property
    def p_f_rel(self) -> float:
        return self.p_f / self.p_b


def _check_delta(delta: float) -> None:
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")


def tail_integral(lower: float, delta: float) -> float:
    """J(L) = int_L^inf du / (1 + u^(1/delta))."""
    _check_delta(delta)
    if lower < 0:
        raise ValueError("lower limit must be nonnegative")
    if delta == 0.5:
        return math.pi / 2.0 - math.atan(lower)
    val, err = quad(
        lambda u: 1.0 / (1.0 + u ** (1.0 / delta)),
        lower,
        math.inf,
        epsabs=_QUAD_EPSABS,
        epsrel=_QUAD_EPSREL,
        limit=200,
    )
    if not math.isfinite(val) or err > max(_QUAD_EPSABS, 10 * _QUAD_EPSREL * abs(val)):
        raise QuadratureError(f"tail integral failed at lower={lower}, delta={delta}")
    return val


def band_integral(lower: float, upper: float, delta: float) -> float:
    """int_lower^upper du / (1 + u^(1/delta)) over a finite band."""
    _check_delta(delta)
    if not 0 <= lower <= upper:
        raise ValueError("need 0 <= lower <= upper")
    if delta == 0.5:
        return math.atan(upper) - math.atan(lower)
    val, err = quad(
        lambda u: 1.0 / (1.0 + u ** (1.0 / delta)),
        lower,
        upper,
        epsabs=_QUAD_EPSABS,
        epsrel=_QUAD_EPSREL,
        limit=200,
    )
    if not math.isfinite(val):
        raise QuadratureError(f"band integral failed on [{lower}, {upper}], delta={delta}")
    return val


def kernel_h(beta: float, delta: float, region_ratio: float) -> float:
    """H(beta, delta, R) = beta^delta * J(R^-2 beta^-delta).

    Monotone increasing in beta and in R; for delta = 1/2 equals
    sqrt(beta) * arctan(R^2 sqrt(beta)).
    """
    _check_delta(delta)
    _check_region(region_ratio)
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    if beta == 0.0:
        return 0.0
    bd = beta**delta
    if delta == 0.5:
        return bd * math.atan(region_ratio**2 * bd)
    return bd * tail_integral(1.0 / (region_ratio**2 * bd), delta)


def kernel_g(beta: float, delta: float, region_ratio: float) -> float:
    """G(beta, delta, R) = H(beta, delta, 1) - H(beta, delta, R).

    Evaluated as a single finite-band integral to avoid cancellation.
    """
    _check_delta(delta)
    _check_region(region_ratio)
    if region_ratio == 1.0:
        return 0.0
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    if beta == 0.0:
        return 0.0
    bd = beta**delta
    return bd * band_integral(1.0 / bd, 1.0 / (region_ratio**2 * bd), delta)


def femto_coefficient(
    beta: float, delta: float, lambda_f_eff: float, lambda_b: float, p_f_rel: float
) -> float:
    """Femto interference as an additive coverage-denominator term.

    Equals pi * delta * (lambda_f_eff / lambda_b) * (beta * p_f_rel)^delta /
    sin(pi delta); the femto Laplace transform at s = beta r^alpha is
    exp(-pi lambda_b F r^2) with F this coefficient.
    """
    _check_delta(delta)
    if lambda_f_eff < 0 or lambda_b <= 0:
        raise ValueError("densities must be nonnegative (lambda_b positive)")
    if lambda_f_eff == 0.0 or beta == 0.0:
        return 0.0
    return (
        math.pi
        * delta
        * (lambda_f_eff / lambda_b)
        * (beta * p_f_rel) ** delta
        / math.sin(math.pi * delta)
    )


def lt_femto(s: float, lambda_f_eff: float, delta: float, p_f_rel: float) -> float:
    """Laplace transform of femto-tier interference at s.

    exp(-delta pi^2 lambda_f_eff (s p_f_rel)^delta csc(delta pi)): the plane
    integral of 1 - 1/(1 + u^(1/delta)) contributes a factor delta pi
    csc(delta pi) on top of pi lambda (s p)^delta.
    """
    _check_delta(delta)
    if s < 0 or lambda_f_eff < 0:
        raise ValueError("s and density must be nonnegative")
    if s == 0.0 or lambda_f_eff == 0.0:
        return 1.0
    expo = (
        delta
        * math.pi**2
        * lambda_f_eff
        * (s * p_f_rel) ** delta
        / math.sin(math.pi * delta)
    )
    return math.exp(-expo)


def lt_mbs_ccu(
    s: float, r_c: float, zeta: float, lambda_b: float, delta: float, region_ratio: float
) -> float:
    """LT of co-channel macro interference at a CCU served from distance r_c.

    Interferers form a thinned PPP of intensity zeta * lambda_b outside the
    ball of radius r_c / R (the dominant interferer cannot be closer).
    """
    _check_delta(delta)
    _check_region(region_ratio)
    _check_zeta(zeta)
    if r_c <= 0:
        raise ValueError("serving distance must be positive")
    if s == 0.0 or zeta == 0.0:
        return 1.0
    sd = s**delta
    j = tail_integral(r_c**2 / (region_ratio**2 * sd), delta)
    return math.exp(-math.pi * zeta * lambda_b * sd * j)


def lt_mbs_ceu_dominant_off(
    s: float, r_e: float, zeta: float, lambda_b: float, delta: float
) -> float:
    """LT of macro interference at a CEU when its dominant interferer is
    silent: thinned PPP outside the serving-distance ball."""
    _check_delta(delta)
    _check_zeta(zeta)
    if r_e <= 0:
        raise ValueError("serving distance must be positive")
    if s == 0.0 or zeta == 0.0:
        return 1.0
    sd = s**delta
    j = tail_integral(r_e**2 / sd, delta)
    return math.exp(-math.pi * zeta * lambda_b * sd * j)


def lt_mbs_ceu_dominant_on(
    s: float, r_e: float, zeta: float, lambda_b: float, delta: float, region_ratio: float
) -> float:
    """LT of macro interference at a CEU conditioned on an active dominant
    interferer.

    Product of the far-field transform (outside r_e / R) and the annulus
    [r_e, r_e/R] transform conditioned on holding at least one active
    interferer; c = pi zeta lambda_b (R^-2 - 1) is the mean active count in
    the annulus per unit r_e^2.
    """
    _check_delta(delta)
    _check_region(region_ratio)
    if region_ratio == 1.0:
        raise ValueError("conditioning annulus is empty at R=1")
    if not 0.0 < zeta <= 1.0:
        raise ValueError("conditioning requires an active fraction zeta in (0, 1]")
    if r_e <= 0:
        raise ValueError("serving distance must be positive")
    if s == 0.0:
        return 1.0
    c = math.pi * zeta * lambda_b * (region_ratio**-2 - 1.0)
    cr2 = c * r_e**2
    sd = s**delta
    far = math.exp(
        -math.pi * zeta * lambda_b * sd
        * tail_integral(r_e**2 / (region_ratio**2 * sd), delta)
    )
    ann = math.exp(
        -math.pi * zeta * lambda_b * sd
        * band_integral(r_e**2 / sd, r_e**2 / (region_ratio**2 * sd), delta)
    )
    return far * (ann - math.exp(-cr2)) / -math.expm1(-cr2)


def _check_region(region_ratio: float) -> None:
    if not 0.0 < region_ratio <= 1.0:
        raise ValueError(f"region ratio must lie in (0, 1], got {region_ratio}")


def _check_zeta(zeta: float) -> None:
    if not 0.0 <= zeta <= 1.0:
        raise ValueError(f"activity factor must lie in [0, 1], got {zeta}")
