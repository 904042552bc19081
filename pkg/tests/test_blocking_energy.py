import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gammaln, logsumexp

from conftest import make_config
from hetload.blocking_energy import (
    LossSystem,
    MultiClassLossSystem,
    _area_average,
    blocking_2d,
    energy_efficiency,
    erlang_b,
    fair_pm_search,
    kaufman_roberts,
    mc2d_state_probs,
    network_blocking,
)
from hetload.config import CsaPolicy, SsaPolicy
from hetload.errors import (
    BracketSearchError,
    GridResolutionError,
    StateSpaceError,
    ZeroLoadError,
)
from hetload.load import solve_fixed_point
from hetload.montecarlo import run_loss_cell

LAMBDA_B = 5e-6


def erlang_b_direct(servers: int, rho: float) -> float:
    # independent oracle: direct formula in the log domain
    k = np.arange(servers + 1)
    logterms = k * math.log(rho) - gammaln(k + 1)
    return float(math.exp(logterms[-1] - logsumexp(logterms)))


def test_erlang_trivial_points():
    assert erlang_b(LossSystem(5, 0.0)) == 0.0
    assert erlang_b(LossSystem(1, 1.0)) == pytest.approx(0.5, rel=1e-15)


def test_erlang_recursion_vs_direct():
    for servers, rho in [(50, 40.0), (200, 150.0), (10, 2.0), (100, 130.0)]:
        got = erlang_b(LossSystem(servers, rho))
        assert got == pytest.approx(erlang_b_direct(servers, rho), rel=1e-12)


@given(
    servers=st.integers(min_value=1, max_value=120),
    rho=st.floats(min_value=1e-3, max_value=300.0),
)
@settings(max_examples=150, deadline=None)
def test_erlang_recursion_vs_direct_property(servers, rho):
    assert erlang_b(LossSystem(servers, rho)) == pytest.approx(
        erlang_b_direct(servers, rho), rel=1e-10
    )


def test_loss_system_validation():
    with pytest.raises(ValueError):
        LossSystem(0, 1.0)
    with pytest.raises(ValueError):
        LossSystem(3, -1.0)


def test_mc2d_zero_load_mass_at_origin():
    system = MultiClassLossSystem(capacity=10, demands=(1.0, 2.0), loads=(0.0, 0.0))
    probs = mc2d_state_probs(system)
    assert probs[(0, 0)] == pytest.approx(1.0, abs=1e-15)


def test_mc2d_probs_sum_to_one():
    rng = np.random.default_rng(3)
    for _ in range(10):
        system = MultiClassLossSystem(
            capacity=float(rng.integers(10, 60)),
            demands=(float(rng.uniform(0.3, 2.0)), float(rng.uniform(0.5, 3.0))),
            loads=(float(rng.uniform(0.1, 30.0)), float(rng.uniform(0.1, 30.0))),
        )
        total = sum(mc2d_state_probs(system).values())
        assert total == pytest.approx(1.0, abs=1e-12)


def test_mc2d_blocking_matches_kaufman_roberts_integers():
    system = MultiClassLossSystem(capacity=50, demands=(1.0, 2.0), loads=(5.0, 3.0))
    b_enum = blocking_2d(system)
    b_kr = kaufman_roberts(system, grid=1)
    assert b_enum[0] == pytest.approx(b_kr[0], abs=1e-12)
    assert b_enum[1] == pytest.approx(b_kr[1], abs=1e-12)


def test_kr_single_class_reduces_to_erlang():
    for servers, rho in [(20, 12.0), (50, 55.0)]:
        system = MultiClassLossSystem(
            capacity=float(servers), demands=(1.0, 1.0), loads=(rho, 0.0)
        )
        b = kaufman_roberts(system, grid=1)
        assert b[0] == pytest.approx(erlang_b(LossSystem(servers, rho)), rel=1e-12)


def test_kr_quantization_agrees_with_enumeration():
    system = MultiClassLossSystem(
        capacity=50.0, demands=(0.283, 0.466), loads=(20.0, 15.0)
    )
    b_enum = blocking_2d(system)
    b_kr = kaufman_roberts(system, grid=100)
    assert abs(b_enum[0] - b_kr[0]) < 1e-3
    assert abs(b_enum[1] - b_kr[1]) < 1e-3
    # refinement shrinks the gap
    b_kr_fine = kaufman_roberts(system, grid=1000)
    assert abs(b_enum[0] - b_kr_fine[0]) <= abs(b_enum[0] - b_kr[0]) + 1e-9


def test_kr_grid_too_coarse():
    system = MultiClassLossSystem(capacity=50.0, demands=(0.001, 1.0), loads=(1.0, 1.0))
    with pytest.raises(GridResolutionError):
        kaufman_roberts(system, grid=100)


def test_state_space_cap():
    system = MultiClassLossSystem(
        capacity=50.0, demands=(0.001, 0.001), loads=(1.0, 1.0)
    )
    with pytest.raises(StateSpaceError):
        blocking_2d(system, max_states=1_000_000)


def test_blocking_zero_load_limit():
    system = MultiClassLossSystem(capacity=30, demands=(1.2, 2.4), loads=(1e-9, 1e-9))
    b = blocking_2d(system)
    assert b[0] < 1e-8 and b[1] < 1e-8


def test_edge_class_blocks_more_when_demand_larger():
    rng = np.random.default_rng(12)
    for _ in range(10):
        n_c = float(rng.uniform(0.3, 1.5))
        n_e = n_c * float(rng.uniform(1.0, 3.0))
        system = MultiClassLossSystem(
            capacity=40.0,
            demands=(n_c, n_e),
            loads=(float(rng.uniform(1.0, 25.0)), float(rng.uniform(1.0, 25.0))),
        )
        b_c, b_e = blocking_2d(system)
        assert b_e >= b_c - 1e-12


def test_blocking_2d_vs_discrete_event_simulation():
    # exact same two-class fixed-demand system, simulated
    demands = (1.2, 2.4)
    loads = (12.0, 9.0)
    system = MultiClassLossSystem(capacity=50.0, demands=demands, loads=loads)
    analytic = blocking_2d(system)
    reps, minutes = 24, 120.0
    blocked = np.zeros((reps, 2))
    arrivals = np.zeros((reps, 2))
    for rep in range(reps):
        rng = np.random.default_rng(np.random.SeedSequence(900 + rep))
        stats = run_loss_cell(
            rng, 50.0, loads, [lambda r: demands[0], lambda r: demands[1]],
            mu=1.0, sim_minutes=minutes,
        )
        blocked[rep] = stats.blocked
        arrivals[rep] = stats.arrivals
    ratios = blocked / arrivals
    for cls in (0, 1):
        mean = ratios[:, cls].mean()
        stderr = ratios[:, cls].std(ddof=1) / math.sqrt(reps)
        assert abs(mean - analytic[cls]) <= 3 * stderr


def test_area_average_consistency():
    # constant blocking passes through; linear blocking integrates to its mean
    assert _area_average(lambda a: 0.37, LAMBDA_B) == pytest.approx(0.37, abs=1e-5)
    k = LAMBDA_B / 2.0
    assert _area_average(lambda a: k * a, LAMBDA_B) == pytest.approx(0.5, abs=1e-4)


def test_network_blocking_zero_load():
    cfg = make_config(CsaPolicy(), lambda_m_per_min_m2=0.0)
    sol = solve_fixed_point(cfg)
    rep = network_blocking(cfg, sol)
    assert rep.b_ccu == rep.b_ceu == rep.b_network == 0.0


def test_network_blocking_class_mix_identity():
    cfg = make_config(CsaPolicy(), lambda_m_per_min_m2=3e-4)
    sol = solve_fixed_point(cfg)
    rep = network_blocking(cfg, sol)
    r2 = cfg.region_ratio**2
    assert rep.b_network == pytest.approx(
        r2 * rep.b_ccu + (1 - r2) * rep.b_ceu, rel=1e-12
    )


def test_csa_edge_blocks_more_than_center():
    cfg = make_config(CsaPolicy(), lambda_m_per_min_m2=2e-4)
    sol = solve_fixed_point(cfg)
    rep = network_blocking(cfg, sol)
    assert rep.b_ceu > rep.b_ccu


def test_csa_kr_path_close_to_exact():
    cfg = make_config(CsaPolicy(), lambda_m_per_min_m2=4e-4)
    sol = solve_fixed_point(cfg)
    exact = network_blocking(cfg, sol, method="exact")
    fast = network_blocking(cfg, sol, method="kr")
    assert fast.b_ccu == pytest.approx(exact.b_ccu, abs=2e-3)
    assert fast.b_ceu == pytest.approx(exact.b_ceu, abs=2e-3)


def test_ssa_pm_blocking_trend():
    reports = {}
    for p_m in (0.3, 0.4, 0.5):
        cfg = make_config(SsaPolicy(p_m=p_m))
        reports[p_m] = network_blocking(cfg, solve_fixed_point(cfg))
    assert reports[0.3].b_ccu > reports[0.4].b_ccu > reports[0.5].b_ccu
    assert reports[0.3].b_ceu < reports[0.4].b_ceu < reports[0.5].b_ceu


def test_fair_pm_search_postcondition():
    cfg = make_config(SsaPolicy(p_m=0.4))
    p_m = fair_pm_search(cfg, target_tol=1e-3, bracket=(0.25, 0.6))
    cfg_fair = cfg.with_policy(SsaPolicy(p_m=p_m))
    rep = network_blocking(cfg_fair, solve_fixed_point(cfg_fair))
    assert abs(rep.b_ccu - rep.b_ceu) < 1e-3


def test_fair_pm_shifts_with_femto_density():
    lo = make_config(SsaPolicy(p_m=0.4), lambda_f_per_m2=10 * LAMBDA_B,
                     lambda_m_per_min_m2=3e-4)
    hi = make_config(SsaPolicy(p_m=0.4), lambda_f_per_m2=150 * LAMBDA_B,
                     lambda_m_per_min_m2=3e-4)
    pm_lo = fair_pm_search(lo, target_tol=1e-4, bracket=(0.2, 0.7))
    pm_hi = fair_pm_search(hi, target_tol=1e-4, bracket=(0.2, 0.7))
    # denser femto tier loads the shared center band harder, so equal blocking
    # needs a larger center share
    assert pm_hi > pm_lo


def test_fair_pm_unattainable_bracket():
    cfg = make_config(SsaPolicy(p_m=0.4))
    with pytest.raises(BracketSearchError):
        fair_pm_search(cfg, target_tol=1e-9, bracket=(0.6, 0.9))


def test_energy_zero_blocking_form():
    cfg = make_config(SsaPolicy(p_m=0.4), lambda_m_per_min_m2=0.5e-4)
    sol = solve_fixed_point(cfg)
    rep = network_blocking(cfg, sol)
    energy = energy_efficiency(cfg, sol, rep)
    # blocking is ~0 at this load, so eta = lam_M R_th / (mu N P_B zeta)
    expected = (
        cfg.lambda_m_per_min_m2 * cfg.rate_bps
        / (cfg.mu_per_min * cfg.n_channels * cfg.p_b_watt * sol.zeta_overall)
    )
    assert energy.eta == pytest.approx(expected, rel=1e-3)


def test_energy_undefined_at_zero_load():
    cfg = make_config(CsaPolicy(), lambda_m_per_min_m2=0.0)
    sol = solve_fixed_point(cfg)
    rep = network_blocking(cfg, sol)
    with pytest.raises(ZeroLoadError):
        energy_efficiency(cfg, sol, rep)


def test_energy_ssa_beats_csa_at_moderate_load():
    # pre-saturation regime: shared allocation spends less activity
    for rate in (180e3, 360e3):
        lam = 0.5e-4 if rate == 180e3 else 0.25e-4
        ssa_cfg = make_config(SsaPolicy(p_m=0.3), lambda_m_per_min_m2=lam, rate_bps=rate)
        csa_cfg = make_config(CsaPolicy(), lambda_m_per_min_m2=lam, rate_bps=rate)
        ssa_sol = solve_fixed_point(ssa_cfg)
        csa_sol = solve_fixed_point(csa_cfg)
        eta_s = energy_efficiency(ssa_cfg, ssa_sol, network_blocking(ssa_cfg, ssa_sol))
        eta_c = energy_efficiency(csa_cfg, csa_sol, network_blocking(csa_cfg, csa_sol))
        assert eta_s.eta > eta_c.eta
