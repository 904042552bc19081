"""Shared fixtures and independent Monte-Carlo oracle helpers.

The Laplace-functional oracles sample interferer fields directly with the
geometry module's PPP sampler and average exp(-s * I); they never touch the
closed forms they are used to check.
"""

import math

import numpy as np
import pytest

from hetload.config import CsaPolicy, OsaPolicy, ScenarioConfig, SsaPolicy
from hetload.coverage import CoverageInputs

DEFAULTS = dict(
    lambda_b_per_m2=5e-6,
    lambda_f_per_m2=50 * 5e-6,
    lambda_m_per_min_m2=2e-4,
    mu_per_min=1.0,
    alpha=4.0,
    p_b_watt=1.0,
    p_f_watt=0.01,
    n_channels=50,
    bandwidth_hz=180e3,
    rate_bps=90e3,
    region_ratio=0.707,
    beta=1.0,
)


def make_config(policy, **overrides) -> ScenarioConfig:
    params = dict(DEFAULTS)
    params.update(overrides)
    return ScenarioConfig(policy=policy, **params)


@pytest.fixture
def ssa_config() -> ScenarioConfig:
    return make_config(SsaPolicy(p_m=0.4))


@pytest.fixture
def csa_config() -> ScenarioConfig:
    return make_config(CsaPolicy())


@pytest.fixture
def osa_config() -> ScenarioConfig:
    return make_config(OsaPolicy(p_o=0.0))


def make_inputs(**overrides) -> CoverageInputs:
    params = dict(
        beta=1.0,
        lambda_b=DEFAULTS["lambda_b_per_m2"],
        lambda_f_eff=0.0,
        zeta=1.0,
        delta=0.5,
        region_ratio=DEFAULTS["region_ratio"],
        p_f_rel=0.01,
    )
    params.update(overrides)
    return CoverageInputs(**params)


# --- Monte-Carlo Laplace-functional oracles --------------------------------


def mc_laplace_annulus_field(
    s: float,
    density: float,
    alpha: float,
    inner: float,
    outer: float,
    power: float,
    reps: int,
    seed: int,
) -> np.ndarray:
    """Per-replication exp(-s * I) for a PPP of the given density confined to
    the annulus [inner, outer], power-scaled path loss r^-alpha."""
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    area = math.pi * (outer**2 - inner**2)
    counts = rng.poisson(density * area, reps)
    total = int(counts.sum())
    rep = np.repeat(np.arange(reps), counts)
    r2 = inner**2 + rng.random(total) * (outer**2 - inner**2)
    h = rng.exponential(1.0, total)
    contrib = power * h * r2 ** (-alpha / 2.0)
    interference = np.bincount(rep, weights=contrib, minlength=reps)
    return np.exp(-s * interference)


def mc_laplace_mbs(
    s: float,
    zeta: float,
    lambda_b: float,
    alpha: float,
    exclusion: float,
    window: float,
    reps: int,
    seed: int,
):
    """Mean and stderr of exp(-s I) over thinned PPPs outside an exclusion
    ball (thinning realized as density scaling)."""
    vals = mc_laplace_annulus_field(
        s, zeta * lambda_b, alpha, exclusion, window, 1.0, reps, seed
    )
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(reps))


def mc_laplace_mbs_conditional(
    s: float,
    zeta: float,
    lambda_b: float,
    alpha: float,
    r_e: float,
    region_ratio: float,
    window: float,
    reps: int,
    seed: int,
):
    """Conditional oracle for the dominant-active transform: thinned annulus
    [r_e, r_e/R] conditioned on at least one point, plus the far field."""
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    outer_ann = r_e / region_ratio
    density = zeta * lambda_b
    area_ann = math.pi * (outer_ann**2 - r_e**2)
    counts = rng.poisson(density * area_ann, reps)
    keep = counts >= 1
    kept = int(keep.sum())
    idx = np.repeat(np.arange(reps), counts)
    r2 = r_e**2 + rng.random(int(counts.sum())) * (outer_ann**2 - r_e**2)
    h = rng.exponential(1.0, int(counts.sum()))
    i_ann = np.bincount(idx, weights=h * r2 ** (-alpha / 2.0), minlength=reps)
    rng2 = np.random.default_rng(np.random.SeedSequence(seed + 1))
    area_far = math.pi * (window**2 - outer_ann**2)
    counts_f = rng2.poisson(density * area_far, reps)
    idx_f = np.repeat(np.arange(reps), counts_f)
    r2_f = outer_ann**2 + rng2.random(int(counts_f.sum())) * (window**2 - outer_ann**2)
    h_f = rng2.exponential(1.0, int(counts_f.sum()))
    i_far = np.bincount(idx_f, weights=h_f * r2_f ** (-alpha / 2.0), minlength=reps)
    vals = np.exp(-s * (i_ann + i_far))[keep]
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(kept))
