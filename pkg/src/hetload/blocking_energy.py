"""Blocking probabilities and area energy efficiency.

Shared allocation decouples the center and edge bands, so each band is a
single-class Erlang loss system with an integer server count floor(band /
mean demand). Co-channel allocation pools both classes on one channel set;
its per-cell state is the two-class loss system with real-valued channel
demands, evaluated exactly by state enumeration (log domain) and, as a fast
path, by the Kaufman-Roberts recursion on a quantized bandwidth grid.

Network-level figures integrate the per-cell values against the Gamma(3.5)
cell-area law, truncated at the 1 - 1e-6 quantile and refined adaptively.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
import numpy as np
from scipy.integrate import quad
from scipy.special import gammaln

from .config import ScenarioConfig, SsaPolicy, macro_channels
from .errors import (
    BracketSearchError,
    GridResolutionError,
    QuadratureError,
    StateSpaceError,
    ZeroLoadError,
)
from .load import LoadSolution, cell_area_pdf, cell_area_quantile, solve_fixed_point


@dataclass(frozen=True)
class LossSystem:
    """Single-class Erlang loss system: M/M/c/c."""

    servers: int
    offered_load: float  # erlangs

    def __post_init__(self):
        if self.servers < 1:
            raise ValueError("need at least one server")
        if self.offered_load < 0:
            raise ValueError("offered load must be nonnegative")


def erlang_b(system: LossSystem) -> float:
    """Erlang-B blocking by the stable ascending recursion."""
    rho = system.offered_load
    if rho == 0.0:
        return 0.0
    b = 1.0
    for k in range(1, system.servers + 1):
        b = rho * b / (k + rho * b)
    return b


@dataclass(frozen=True)
class MultiClassLossSystem:
    """Two-class loss system sharing `capacity` channels; class i calls hold
    demands[i] channels (real-valued) and offer loads[i] erlangs."""

    capacity: float
    demands: tuple[float, float]
    loads: tuple[float, float]

    def __post_init__(self):
        if self.capacity <= 0:
            raise ValueError("capacity must be positive")
        if any(d <= 0 for d in self.demands):
            raise ValueError("channel demands must be positive")
        if any(l < 0 for l in self.loads):
            raise ValueError("offered loads must be nonnegative")
        if max(self.demands) > self.capacity:
            raise ValueError("capacity must exceed the largest demand")


def _state_grid(system: MultiClassLossSystem, max_states: int):
    n_c, n_e = system.demands
    s_c_max = int(math.floor(system.capacity / n_c + 1e-12))
    s_e_max = int(math.floor(system.capacity / n_e + 1e-12))
    if (s_c_max + 1) * (s_e_max + 1) > max_states:
        raise StateSpaceError(
            f"state grid {(s_c_max + 1)}x{(s_e_max + 1)} exceeds cap {max_states}"
        )
    s_c = np.arange(s_c_max + 1)
    s_e = np.arange(s_e_max + 1)
    used = s_c[:, None] * n_c + s_e[None, :] * n_e
    feasible = used <= system.capacity + 1e-9
    return s_c, s_e, used, feasible


def _log_weights(system: MultiClassLossSystem, s_c, s_e):
    rho_c, rho_e = system.loads
    with np.errstate(divide="ignore", invalid="ignore"):
        log_c = s_c * (np.log(rho_c) if rho_c > 0 else -np.inf) - gammaln(s_c + 1)
        log_e = s_e * (np.log(rho_e) if rho_e > 0 else -np.inf) - gammaln(s_e + 1)
    log_c = np.where(s_c == 0, 0.0, log_c)  # 0 * -inf at the empty state
    log_e = np.where(s_e == 0, 0.0, log_e)
    return log_c[:, None] + log_e[None, :]


def mc2d_state_probs(
    system: MultiClassLossSystem, max_states: int = 1_000_000
) -> dict[tuple[int, int], float]:
    """Stationary state probabilities of the two-class loss system.

    Product-form weights (rho_c)^{s_c} (rho_e)^{s_e} / (s_c! s_e!) over the
    feasible set, normalized; computed in the log domain.
    """
    s_c, s_e, used, feasible = _state_grid(system, max_states)
    logw = _log_weights(system, s_c, s_e)
    logw = np.where(feasible, logw, -np.inf)
    top = logw.max()
    w = np.exp(logw - top)
    w /= w.sum()
    idx_c, idx_e = np.nonzero(feasible)
    return {(int(i), int(j)): float(w[i, j]) for i, j in zip(idx_c, idx_e)}


def blocking_2d(
    system: MultiClassLossSystem, max_states: int = 1_000_000
) -> tuple[float, float]:
    """Per-class blocking of the two-class system by exact enumeration.

    A class-i arrival is admitted from states with used + demands[i] <=
    capacity; blocking is one minus the admitted-state mass.
    """
    s_c, s_e, used, feasible = _state_grid(system, max_states)
    logw = _log_weights(system, s_c, s_e)
    logw = np.where(feasible, logw, -np.inf)
    top = logw.max()
    w = np.where(feasible, np.exp(logw - top), 0.0)
    total = w.sum()
    admit_c = w[used <= system.capacity - system.demands[0] + 1e-9].sum()
    admit_e = w[used <= system.capacity - system.demands[1] + 1e-9].sum()
    b_c = max(0.0, 1.0 - admit_c / total)
    b_e = max(0.0, 1.0 - admit_e / total)
    return b_c, b_e


def kaufman_roberts(
    system: MultiClassLossSystem, grid: int = 100
) -> tuple[float, float]:
    """Per-class blocking by the Kaufman-Roberts recursion.

    Real demands are quantized to 1/grid channel; exact when demands land on
    the grid (in particular for integer demands with grid=1).
    """
    if grid < 1:
        raise ValueError("grid must be a positive integer")
    caps = int(round(system.capacity * grid))
    units = [int(round(d * grid)) for d in system.demands]
    if any(u < 1 for u in units):
        raise GridResolutionError(
            f"demands {system.demands} vanish on a 1/{grid}-channel grid"
        )
    for d, u in zip(system.demands, units):
        if abs(u - d * grid) > 1e-6 * grid and grid == 1:
            raise GridResolutionError(
                f"demand {d} is not integral; use a finer quantization grid"
            )
    g = np.zeros(caps + 1)
    g[0] = 1.0
    loads = system.loads
    for c in range(1, caps + 1):
        acc = 0.0
        for load, u in zip(loads, units):
            if u <= c:
                acc += load * u * g[c - u]
        g[c] = acc / c
        if g[c] > 1e250:  # rescale to dodge overflow; only ratios matter
            g[: c + 1] /= 1e250
    total = g.sum()
    out = []
    for u in units:
        out.append(float(g[caps - u + 1 :].sum() / total))
    return out[0], out[1]


@dataclass(frozen=True)
class BlockingReport:
    """Area-averaged per-class and network blocking probabilities."""

    policy: str
    b_ccu: float
    b_ceu: float
    b_network: float

    def __post_init__(self):
        for name in ("b_ccu", "b_ceu", "b_network"):
            v = getattr(self, name)
            if not -1e-12 <= v <= 1 + 1e-12:
                raise ValueError(f"{name} out of [0, 1]: {v}")


@dataclass(frozen=True)
class EnergyReport:
    """Area energy efficiency in bps/(Joule m^2) and the overall activity."""

    policy: str
    eta: float
    zeta_overall: float

    def __post_init__(self):
        if self.eta < 0:
            raise ValueError("energy efficiency must be nonnegative")


def _area_average(block_fn, lambda_b: float, tail_quantile: float = 1e-6) -> float:
    """Integrate a per-area blocking function against the cell-area law."""
    a_max = cell_area_quantile(1.0 - tail_quantile, lambda_b)
    val, err = quad(
        lambda a: block_fn(a) * cell_area_pdf(a, lambda_b),
        0.0,
        a_max,
        epsabs=1e-10,
        epsrel=1e-8,
        limit=400,
    )
    if not math.isfinite(val):
        raise QuadratureError("area-averaged blocking integral diverged")
    return min(max(val, 0.0), 1.0)


def _ssa_server_counts(config: ScenarioConfig, solution: LoadSolution) -> tuple[int, int]:
    policy: SsaPolicy = config.policy
    n_c = int(math.floor(config.n_channels * policy.p_m / solution.nbar_c))
    n_e = int(math.floor(config.n_channels * (1.0 - policy.p_m) / solution.nbar_e))
    return n_c, n_e


def network_blocking(
    config: ScenarioConfig,
    solution: LoadSolution,
    method: str = "exact",
    kr_grid: int = 100,
) -> BlockingReport:
    """Blocking of each user class averaged over the cell-area distribution.

    SSA: Erlang-B per band with floored server counts. CSA/OSA: the
    two-class system per cell area, via enumeration ("exact") or
    Kaufman-Roberts ("kr"). The network figure weights the classes by their
    arrival shares R^2 and 1 - R^2.
    """
    r2 = config.region_ratio**2
    lam_c = config.lambda_m_per_min_m2 * r2
    lam_e = config.lambda_m_per_min_m2 * (1.0 - r2)
    mu = config.mu_per_min
    if config.lambda_m_per_min_m2 == 0.0:
        return BlockingReport(config.policy.name, 0.0, 0.0, 0.0)

    if isinstance(config.policy, SsaPolicy):
        n_c, n_e = _ssa_server_counts(config, solution)

        def make(band_servers: int, rate: float):
            if band_servers < 1:
                return lambda a: 1.0  # demand exceeds the whole band
            return lambda a: erlang_b(LossSystem(band_servers, a * rate / mu))

        b_ccu = _area_average(make(n_c, lam_c), config.lambda_b_per_m2)
        b_ceu = _area_average(make(n_e, lam_e), config.lambda_b_per_m2)
    else:
        n_macro = macro_channels(config.policy, config.n_channels)
        demands = (solution.nbar_c, solution.nbar_e)
        if max(demands) > n_macro:
            raise StateSpaceError("mean channel demand exceeds the macro band")
        if method == "exact":
            evaluate = blocking_2d
        elif method == "kr":
            evaluate = lambda s: kaufman_roberts(s, kr_grid)
        else:
            raise ValueError(f"unknown blocking method {method!r}")

        cache: dict[float, tuple[float, float]] = {}

        def per_area(a: float, index: int) -> float:
            pair = cache.get(a)
            if pair is None:
                system = MultiClassLossSystem(
                    capacity=n_macro,
                    demands=demands,
                    loads=(a * lam_c / mu, a * lam_e / mu),
                )
                pair = cache[a] = evaluate(system)
            return pair[index]

        b_ccu = _area_average(lambda a: per_area(a, 0), config.lambda_b_per_m2)
        b_ceu = _area_average(lambda a: per_area(a, 1), config.lambda_b_per_m2)

    b_net = r2 * b_ccu + (1.0 - r2) * b_ceu
    return BlockingReport(config.policy.name, b_ccu, b_ceu, b_net)


def fair_pm_search(
    config: ScenarioConfig,
    target_tol: float = 1e-3,
    bracket: tuple[float, float] = (0.05, 0.95),
    max_iter: int = 100,
) -> float:
    """Band split p_m equalizing CCU and CEU blocking under SSA.

    Bisection on h(p_m) = b_ccu - b_ceu, which decreases in p_m (a larger
    center band relieves CCUs and squeezes CEUs). Raises BracketSearchError
    when h has no sign change over the bracket.
    """
    if not isinstance(config.policy, SsaPolicy):
        raise ValueError("fairness search applies to the shared-allocation policy")
    lo, hi = bracket
    if not 0.0 < lo < hi < 1.0:
        raise ValueError("bracket must satisfy 0 < lo < hi < 1")

    def h(p_m: float) -> float:
        cfg = config.with_policy(SsaPolicy(p_m=p_m))
        sol = solve_fixed_point(cfg)
        rep = network_blocking(cfg, sol)
        return rep.b_ccu - rep.b_ceu

    h_lo, h_hi = h(lo), h(hi)
    if abs(h_lo) < target_tol:
        return lo
    if abs(h_hi) < target_tol:
        return hi
    if h_lo * h_hi > 0:
        raise BracketSearchError(
            f"blocking difference does not change sign on [{lo}, {hi}] "
            f"(h({lo})={h_lo:.3e}, h({hi})={h_hi:.3e}); fairness unattainable"
        )
    mid = 0.5 * (lo + hi)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        h_mid = h(mid)
        if abs(h_mid) < target_tol:
            return mid
        if h_mid * h_lo > 0:
            lo, h_lo = mid, h_mid
        else:
            hi = mid
        if hi - lo < 1e-12:
            break
    raise BracketSearchError(
        f"no p_m in the bracket meets |b_ccu - b_ceu| < {target_tol}"
    )


def energy_efficiency(
    config: ScenarioConfig, solution: LoadSolution, blocking: BlockingReport
) -> EnergyReport:
    """Area energy efficiency: admitted rate per unit area and unit energy.

    eta = lambda_M R_th (1 - B) / (mu N P_B zeta) with B the network blocking
    and zeta the overall activity (band-weighted under SSA). Undefined at
    zero activity.
    """
    zeta = solution.zeta_overall
    if zeta == 0.0:
        raise ZeroLoadError("energy efficiency undefined at zero activity")
    r2 = config.region_ratio**2
    carried = r2 * (1.0 - blocking.b_ccu) + (1.0 - r2) * (1.0 - blocking.b_ceu)
    n_macro = macro_channels(config.policy, config.n_channels)
    eta = (
        config.lambda_m_per_min_m2
        * config.rate_bps
        * carried
        / (config.mu_per_min * n_macro * config.p_b_watt * zeta)
    )
    return EnergyReport(policy=config.policy.name, eta=eta, zeta_overall=zeta)
