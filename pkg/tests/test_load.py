import math

import numpy as np
import pytest
from scipy.integrate import quad

from conftest import make_config
from hetload.config import CsaPolicy, McsTable, OsaPolicy, SsaPolicy
from hetload.load import (
    activity_factor,
    cell_area_pdf,
    cell_area_quantile,
    mcs_probabilities,
    mean_channels,
    solve_fixed_point,
)

LAMBDA_B = 5e-6


def test_single_mcs_demand_independent_of_coverage():
    # one threshold: every served user runs at that MCS, probability one
    mcs = McsTable(thresholds=(1.0,), bandwidth_hz=180_000.0, rate_bps=90_000.0)
    for coverage in ([0.9], [0.5], [0.05]):
        assert mean_channels(coverage, mcs) == pytest.approx(0.5, rel=1e-12)


def test_mean_channels_direct_summation_oracle():
    thresholds = tuple(10 ** (t / 10) for t in np.linspace(-6.5, 19.6, 15))
    mcs = McsTable(thresholds=thresholds, bandwidth_hz=180_000.0, rate_bps=90_000.0)
    coverage = np.linspace(0.95, 0.08, 15)  # synthetic nonincreasing curve
    got = mean_channels(coverage, mcs)
    # independent re-summation, scalar arithmetic only
    expected = 0.0
    for i, g in enumerate(thresholds):
        upper = coverage[i + 1] if i + 1 < len(thresholds) else 0.0
        p = (coverage[i] - upper) / coverage[0]
        expected += 90_000.0 / (180_000.0 * math.log2(1.0 + g)) * p
    assert got == pytest.approx(expected, rel=1e-12)


def test_mcs_probabilities_form_distribution():
    cov = [0.9, 0.7, 0.4, 0.1]
    masses = mcs_probabilities(cov)
    assert masses.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(masses >= 0)


def test_mcs_probabilities_rejects_unserved_population():
    with pytest.raises(ValueError):
        mcs_probabilities([0.0, 0.0])
    with pytest.raises(ValueError):
        mcs_probabilities([0.5, 0.6])  # increasing coverage is malformed


def test_cell_area_pdf_properties():
    # integrate to a far quantile: the mass sits near 1/lambda_b and a naive
    # (0, inf) rule never samples it
    upper = cell_area_quantile(1 - 1e-13, LAMBDA_B)
    val, _ = quad(lambda a: cell_area_pdf(a, LAMBDA_B), 0, upper, limit=300)
    assert abs(val - 1.0) <= 1e-9
    mean, _ = quad(lambda a: a * cell_area_pdf(a, LAMBDA_B), 0, upper, limit=300)
    assert mean == pytest.approx(1.0 / LAMBDA_B, rel=1e-6)
    assert cell_area_pdf(0.0, LAMBDA_B) == 0.0


def test_cell_area_mode():
    # Gamma(shape k, rate r) mode = (k - 1) / r
    mode = 2.5 / (3.5 * LAMBDA_B)
    grid = np.linspace(0.5 * mode, 1.5 * mode, 20001)
    vals = cell_area_pdf(grid, LAMBDA_B)
    assert grid[int(np.argmax(vals))] == pytest.approx(mode, rel=1e-3)


def test_cell_area_quantile_brackets_mass():
    q = cell_area_quantile(0.99, LAMBDA_B)
    mass, _ = quad(lambda a: cell_area_pdf(a, LAMBDA_B), 0, q)
    assert mass == pytest.approx(0.99, abs=1e-9)


def test_activity_factor_limits():
    assert activity_factor(0.0) == 0.0
    assert activity_factor(1e-9) == pytest.approx(1e-9, rel=1e-6)
    assert activity_factor(1e9) == pytest.approx(1.0, abs=1e-12)
    grid = np.geomspace(1e-3, 1e3, 40)
    vals = [activity_factor(float(r)) for r in grid]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    assert all(0.0 <= v <= 1.0 for v in vals)


def test_activity_factor_quadrature_oracle():
    # 20 random offered ratios against direct integration of the clipped
    # per-cell activity over the area law
    rng = np.random.default_rng(7)
    for rho in rng.uniform(0.05, 5.0, 20):
        def integrand(a):
            return min(a * LAMBDA_B * rho, 1.0) * cell_area_pdf(a, LAMBDA_B)

        upper = cell_area_quantile(1 - 1e-12, LAMBDA_B)
        oracle, _ = quad(integrand, 0, upper, limit=400,
                         points=[1.0 / (LAMBDA_B * rho)] if rho > 1e-6 else None)
        assert activity_factor(float(rho)) == pytest.approx(oracle, abs=1e-6)


def test_fixed_point_zero_load(ssa_config, csa_config):
    for cfg in (
        make_config(SsaPolicy(p_m=0.4), lambda_m_per_min_m2=0.0),
        make_config(CsaPolicy(), lambda_m_per_min_m2=0.0),
    ):
        sol = solve_fixed_point(cfg)
        for z in (sol.zeta_sc, sol.zeta_se, sol.zeta_c):
            assert z is None or z == 0.0
        # coverage curve is evaluated at the zero-activity point
        if cfg.policy.name == "SSA":
            assert sol.ceu_coverage[0] == pytest.approx(1.0, abs=1e-9)


def test_fixed_point_monotone_in_load():
    sweep = [0.5e-4, 1e-4, 2e-4, 4e-4]
    prev = {"sc": -1.0, "se": -1.0, "c": -1.0}
    for lam in sweep:
        ssa = solve_fixed_point(make_config(SsaPolicy(p_m=0.4), lambda_m_per_min_m2=lam))
        csa = solve_fixed_point(make_config(CsaPolicy(), lambda_m_per_min_m2=lam))
        assert ssa.zeta_sc >= prev["sc"] and ssa.zeta_se >= prev["se"]
        assert csa.zeta_c >= prev["c"]
        assert ssa.residual < 1e-6 and csa.residual < 1e-6
        assert ssa.iterations <= 60 and csa.iterations <= 60
        prev = {"sc": ssa.zeta_sc, "se": ssa.zeta_se, "c": csa.zeta_c}


def test_fixed_point_agrees_with_picard(ssa_config, csa_config):
    for cfg in (ssa_config, csa_config):
        bis = solve_fixed_point(cfg)
        pic = solve_fixed_point(cfg, tol=1e-8, max_iter=2000, method="picard")
        if cfg.policy.name == "SSA":
            assert bis.zeta_sc == pytest.approx(pic.zeta_sc, abs=1e-5)
            assert bis.zeta_se == pytest.approx(pic.zeta_se, abs=1e-5)
        else:
            assert bis.zeta_c == pytest.approx(pic.zeta_c, abs=1e-5)


def test_osa_scales_band(csa_config):
    # OSA with p_o=0.5 halves the macro band: heavier offered ratio, higher activity
    base = solve_fixed_point(make_config(OsaPolicy(p_o=0.0), lambda_f_per_m2=0.0))
    halved = solve_fixed_point(make_config(OsaPolicy(p_o=0.5), lambda_f_per_m2=0.0))
    assert halved.zeta_c > base.zeta_c


def test_solution_exposes_class_views(ssa_config, csa_config):
    ssa = solve_fixed_point(ssa_config)
    assert ssa.zeta_ccu == ssa.zeta_sc and ssa.zeta_ceu == ssa.zeta_se
    assert ssa.zeta_overall == pytest.approx(
        0.4 * ssa.zeta_sc + 0.6 * ssa.zeta_se, rel=1e-12
    )
    csa = solve_fixed_point(csa_config)
    assert csa.zeta_ccu == csa.zeta_ceu == csa.zeta_c == csa.zeta_overall
