"""Monte-Carlo validation engines.

Two independent axes:

* spatial: SIR sampling over fresh point-pattern realizations with Rayleigh
  fading and Bernoulli channel activity per base station. No derived formula
  enters the sampler; each replication drops a test user at the center of a
  window sized for >= 500 expected macro stations, finds its serving and
  dominant stations, classifies it, and accumulates per-class outage.
  Conditioning on the dominant interferer is never special-cased: per-station
  coin flips induce the active/silent mixture by themselves.

* temporal: a discrete-event loss simulation of per-cell call arrivals with
  exponential holding times. Per-call channel demand is drawn from the MCS
  selection distribution implied by the analytic coverage at the operating
  point; admission follows the policy's band structure. Validates activity
  factors and blocking.

Replications are independent work units: each batch (or cell) derives its
generator from the root seed by SeedSequence spawning and the merge step only
adds tallies, so results are identical for any worker count.
"""

from __future__ import annotations

import heapq
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .config import ScenarioConfig, SsaPolicy, effective_fap_density, macro_channels
from .errors import InsufficientSamplesError
from .geometry import sample_ppp, simulation_window
from .load import _GAMMA_SHAPE, LoadSolution, mcs_probabilities


@dataclass(frozen=True)
class SimEstimate:
    """Monte-Carlo estimate with its standard error."""

    mean: float
    stderr: float
    trials: int
    seed: int

    def within(self, value: float, n_sigma: float = 3.0) -> bool:
        return abs(self.mean - value) <= n_sigma * self.stderr


@dataclass(frozen=True)
class SirSample:
    user_class: str  # "ccu" | "ceu"
    sir: float
    serving_distance: float


@dataclass(frozen=True)
class OutageEstimates:
    """Per-class outage estimates over a threshold grid."""

    thresholds: tuple[float, ...]
    ccu: tuple[SimEstimate, ...]
    ceu: tuple[SimEstimate, ...]
    ccu_fraction: SimEstimate
    trials: int


def _binomial_estimate(hits: int, count: int, seed: int) -> SimEstimate:
    if count == 0:
        return SimEstimate(math.nan, math.nan, 0, seed)
    p = hits / count
    return SimEstimate(p, math.sqrt(max(p * (1.0 - p), 0.0) / count), count, seed)


def _rng(seed: int, key: tuple[int, ...] = ()) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=key))


def _outage_batch(args) -> tuple[np.ndarray, np.ndarray, list]:
    """One batch of SIR replications.

    Returns (class_counts[2], hits[2, n_thresholds], records); index 0 is
    CCU, 1 is CEU. `hits` counts outage events (SIR at or below threshold).
    """
    (
        seed,
        key,
        batch,
        lambda_b,
        alpha,
        region_ratio,
        zeta_pair,
        fap_density_pair,
        p_f_rel,
        thresholds,
        window_radius,
        keep_records,
    ) = args
    rng = _rng(seed, key)
    half_alpha = alpha / 2.0
    r2 = region_ratio**2
    area = math.pi * window_radius**2
    records: list = []

    counts = rng.poisson(lambda_b * area, batch)
    if np.any(counts < 2):
        raise InsufficientSamplesError(
            "a replication drew fewer than two macro stations; enlarge the window"
        )
    total = int(counts.sum())
    rep = np.repeat(np.arange(batch), counts)
    starts = np.zeros(batch, dtype=np.int64)
    starts[1:] = np.cumsum(counts)[:-1]

    d2 = rng.random(total) * window_radius**2  # squared distances to the origin user
    rm2 = np.minimum.reduceat(d2, starts)
    serving = d2 == rm2[rep]
    rd2 = np.minimum.reduceat(np.where(serving, np.inf, d2), starts)
    is_ccu = rm2 <= r2 * rd2

    fading = rng.exponential(1.0, total)
    activity = np.where(is_ccu, zeta_pair[0], zeta_pair[1])
    active = rng.random(total) < activity[rep]
    contrib = np.where(active & ~serving, fading * d2**-half_alpha, 0.0)
    interference = np.add.reduceat(contrib, starts)

    fap_density = np.where(is_ccu, fap_density_pair[0], fap_density_pair[1])
    if np.any(fap_density > 0):
        fap_counts = rng.poisson(fap_density * area)
        fap_total = int(fap_counts.sum())
        if fap_total:
            fap_rep = np.repeat(np.arange(batch), fap_counts)
            fap_d2 = rng.random(fap_total) * window_radius**2
            fap_h = rng.exponential(1.0, fap_total)
            interference = interference + p_f_rel * np.bincount(
                fap_rep, weights=fap_h * fap_d2**-half_alpha, minlength=batch
            )

    h0 = rng.exponential(1.0, batch)
    signal = h0 * rm2**-half_alpha
    with np.errstate(divide="ignore"):
        sir = np.where(interference > 0, signal / interference, np.inf)

    class_counts = np.array([int(is_ccu.sum()), int(batch - is_ccu.sum())])
    hits = np.zeros((2, len(thresholds)), dtype=np.int64)
    for j, beta in enumerate(thresholds):
        out = sir <= beta
        hits[0, j] = int(np.sum(out & is_ccu))
        hits[1, j] = int(np.sum(out & ~is_ccu))
    if keep_records:
        rm = np.sqrt(rm2)
        for i in range(batch):
            records.append(
                SirSample(
                    user_class="ccu" if is_ccu[i] else "ceu",
                    sir=float(sir[i]),
                    serving_distance=float(rm[i]),
                )
            )
    return class_counts, hits, records


def simulate_outage(
    config: ScenarioConfig,
    zeta,
    thresholds: Sequence[float] | None = None,
    trials: int = 100_000,
    seed: int | None = None,
    *,
    expected_mbs: float = 500.0,
    batch_size: int = 20_000,
    workers: int = 1,
    record_sink=None,
    min_class_samples: int = 1,
) -> OutageEstimates:
    """Estimate per-class outage probabilities by spatial simulation.

    `zeta` is the activity factor thinning the macro interferers, either a
    scalar or a (ccu, ceu) pair (the bands differ under shared allocation).
    `record_sink`, if given, receives one JSON line per replication with the
    user class, SIR and serving distance (single-worker runs only).
    """
    if trials < 1:
        raise ValueError("need at least one replication")
    if record_sink is not None and workers != 1:
        raise ValueError("per-replication records require workers=1")
    seed = config.seed if seed is None else seed
    zeta_pair = tuple(zeta) if isinstance(zeta, (tuple, list)) else (float(zeta), float(zeta))
    if not all(0.0 <= z <= 1.0 for z in zeta_pair):
        raise ValueError("activity factors must lie in [0, 1]")
    th = tuple(float(b) for b in (thresholds if thresholds is not None else (config.beta,)))
    window = simulation_window(config.lambda_b_per_m2, expected_mbs)
    fap_pair = (
        effective_fap_density(config.policy, config.lambda_f_per_m2, config.n_channels, "ccu"),
        effective_fap_density(config.policy, config.lambda_f_per_m2, config.n_channels, "ceu"),
    )

    batches = []
    remaining = trials
    idx = 0
    while remaining > 0:
        batch = min(batch_size, remaining)
        batches.append(
            (
                seed,
                (idx,),
                batch,
                config.lambda_b_per_m2,
                config.alpha,
                config.region_ratio,
                zeta_pair,
                fap_pair,
                config.p_f_rel,
                th,
                window.radius,
                record_sink is not None,
            )
        )
        idx += 1
        remaining -= batch

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_outage_batch, batches))
    else:
        results = [_outage_batch(b) for b in batches]

    class_counts = np.zeros(2, dtype=np.int64)
    hits = np.zeros((2, len(th)), dtype=np.int64)
    for counts, h, records in results:
        class_counts += counts
        hits += h
        if record_sink is not None:
            for sample in records:
                record_sink.write(
                    json.dumps(
                        {
                            "user_class": sample.user_class,
                            "sir": sample.sir,
                            "serving_distance_m": sample.serving_distance,
                        }
                    )
                    + "\n"
                )

    for label, n in zip(("ccu", "ceu"), class_counts):
        if n < min_class_samples:
            raise InsufficientSamplesError(
                f"only {n} {label} samples out of {trials}; adjust R or trials"
            )
    ccu_list = tuple(
        _binomial_estimate(int(hits[0, j]), int(class_counts[0]), seed) for j in range(len(th))
    )
    ceu_list = tuple(
        _binomial_estimate(int(hits[1, j]), int(class_counts[1]), seed) for j in range(len(th))
    )
    fraction = _binomial_estimate(int(class_counts[0]), trials, seed)
    return OutageEstimates(
        thresholds=th, ccu=ccu_list, ceu=ceu_list, ccu_fraction=fraction, trials=trials
    )


def sample_user_distances(
    lambda_b: float,
    users: int,
    seed: int,
    *,
    expected_mbs: float = 500.0,
    users_per_pattern: int = 1000,
):
    """Nearest/second-nearest MBS distances for users dropped uniformly in the
    guard zone (half the window radius) of fresh patterns.

    Returns (r_m, r_d) arrays of length `users`; feeds classification and
    serving-distance goodness-of-fit checks.
    """
    from .geometry import nearest_two_distances

    window = simulation_window(lambda_b, expected_mbs)
    guard = window.radius / 2.0
    out_m = np.empty(users)
    out_d = np.empty(users)
    done = 0
    pattern_idx = 0
    while done < users:
        rng = _rng(seed, (pattern_idx,))
        pattern = sample_ppp(lambda_b, window, rng)
        if len(pattern) < 2:
            pattern_idx += 1
            continue
        n = min(users_per_pattern, users - done)
        r = guard * np.sqrt(rng.random(n))
        theta = 2.0 * math.pi * rng.random(n)
        pts = np.column_stack((r * np.cos(theta), r * np.sin(theta)))
        r_m, r_d = nearest_two_distances(pattern, pts)
        out_m[done : done + n] = r_m
        out_d[done : done + n] = r_d
        done += n
        pattern_idx += 1
    return out_m, out_d


def classification_fraction(
    lambda_b: float, region_ratio: float, users: int, seed: int
) -> SimEstimate:
    """Monte-Carlo CCU fraction among users dropped into sampled patterns."""
    r_m, r_d = sample_user_distances(lambda_b, users, seed)
    hits = int(np.sum(r_m <= region_ratio * r_d))
    return _binomial_estimate(hits, users, seed)


# --- temporal discrete-event simulation -----------------------------------


@dataclass(frozen=True)
class CellStats:
    """Raw outcome of one simulated loss cell."""

    occupancy_integral: float  # channel-minutes after warm-up
    measured_minutes: float
    arrivals: tuple[int, ...]
    blocked: tuple[int, ...]


def run_loss_cell(
    rng: np.random.Generator,
    capacity: float,
    class_rates: Sequence[float],
    demand_samplers: Sequence[Callable[[np.random.Generator], float]],
    mu: float,
    sim_minutes: float,
    warmup_fraction: float = 0.1,
) -> CellStats:
    """Simulate one loss cell: Poisson arrivals per class, exponential holding
    with rate mu, admission iff the sampled demand fits the free capacity.

    Statistics (occupancy integral, arrival and blocking counts) cover only
    the span after the warm-up fraction of simulated time.
    """
    rates = np.asarray(class_rates, dtype=float)
    if np.any(rates < 0) or mu <= 0 or sim_minutes <= 0:
        raise ValueError("rates must be nonnegative, mu and duration positive")
    total_rate = float(rates.sum())
    warmup = warmup_fraction * sim_minutes
    n_classes = len(rates)
    arrivals = [0] * n_classes
    blocked = [0] * n_classes
    occupied = 0.0
    occ_integral = 0.0
    departures: list[tuple[float, float]] = []  # (time, demand)
    t = 0.0
    next_arrival = (
        rng.exponential(1.0 / total_rate) if total_rate > 0 else math.inf
    )
    class_cdf = np.cumsum(rates) / total_rate if total_rate > 0 else None

    def advance(to_time: float):
        nonlocal occ_integral, t
        if to_time > warmup:
            occ_integral += occupied * (to_time - max(t, warmup))
        t = to_time

    while True:
        next_departure = departures[0][0] if departures else math.inf
        if next_arrival >= sim_minutes and next_departure >= sim_minutes:
            advance(sim_minutes)
            break
        if next_arrival <= next_departure:
            advance(next_arrival)
            cls = int(np.searchsorted(class_cdf, rng.random(), side="right"))
            cls = min(cls, n_classes - 1)
            demand = demand_samplers[cls](rng)
            if t >= warmup:
                arrivals[cls] += 1
            if occupied + demand <= capacity + 1e-9:
                occupied += demand
                heapq.heappush(departures, (t + rng.exponential(1.0 / mu), demand))
            elif t >= warmup:
                blocked[cls] += 1
            next_arrival = t + rng.exponential(1.0 / total_rate)
        else:
            _, demand = heapq.heappop(departures)
            advance(next_departure)
            occupied -= demand
    return CellStats(
        occupancy_integral=occ_integral,
        measured_minutes=sim_minutes - warmup,
        arrivals=tuple(arrivals),
        blocked=tuple(blocked),
    )


def voronoi_cell_areas(lambda_b: float, seed: int, *, expected_mbs: float = 500.0):
    """Empirical cell areas from the Voronoi tessellation of one sampled
    pattern. Only interior cells (seed within half the window radius, bounded
    region, vertices inside the window) are returned, so boundary cells never
    distort the sample."""
    from scipy.spatial import Voronoi

    window = simulation_window(lambda_b, expected_mbs)
    pattern = sample_ppp(lambda_b, window, seed)
    if len(pattern) < 4:
        raise InsufficientSamplesError("too few stations for a Voronoi tessellation")
    vor = Voronoi(pattern.points)
    guard2 = (window.radius / 2.0) ** 2
    areas = []
    for seed_idx, region_idx in enumerate(vor.point_region):
        px, py = pattern.points[seed_idx]
        if px * px + py * py > guard2:
            continue
        region = vor.regions[region_idx]
        if not region or -1 in region:
            continue
        verts = vor.vertices[region]
        if np.any(np.sum(verts**2, axis=1) > window.radius**2):
            continue
        x, y = verts[:, 0], verts[:, 1]
        area = 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))
        areas.append(area)
    if not areas:
        raise InsufficientSamplesError("no interior Voronoi cells found")
    return np.asarray(areas)


@dataclass(frozen=True)
class TemporalEstimates:
    """Activity and blocking estimates from the discrete-event simulation."""

    policy: str
    zeta_center: SimEstimate | None
    zeta_edge: SimEstimate | None
    zeta_shared: SimEstimate | None
    b_ccu: SimEstimate
    b_ceu: SimEstimate
    sim_minutes: float
    n_cells: int


def _mean_estimate(values: np.ndarray, seed: int) -> SimEstimate:
    vals = values[~np.isnan(values)]
    if vals.size == 0:
        return SimEstimate(0.0, 0.0, 0, seed)
    if vals.size == 1:
        return SimEstimate(float(vals[0]), math.nan, 1, seed)
    return SimEstimate(
        float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(vals.size)), int(vals.size), seed
    )


def _demand_sampler(demands: np.ndarray, masses: np.ndarray, mode: str, nbar: float):
    if mode == "mcs":
        cdf = np.cumsum(masses)
        cdf[-1] = 1.0

        def sampler(rng: np.random.Generator) -> float:
            return float(demands[np.searchsorted(cdf, rng.random(), side="right")])

        return sampler
    if mode == "mean":
        return lambda rng: nbar
    raise ValueError(f"unknown demand mode {mode!r}")


def _temporal_chunk(args) -> list[tuple[int, float, float, float, float]]:
    """Simulate a chunk of cells; one work unit of the temporal engine.

    Per-cell generators derive from (seed, cell index), so the partition into
    chunks never changes the results. Returns rows (index, occ_center,
    occ_edge_or_nan, blk_ccu, blk_ceu); under pooled policies the shared
    occupancy travels in the center slot.
    """
    (
        seed,
        indices,
        areas,
        ssa,
        bands,
        lam_c,
        lam_e,
        mu,
        sim_minutes,
        warmup_fraction,
        demands,
        masses_c,
        masses_e,
        demand_mode,
        nbar_c,
        nbar_e,
    ) = args
    demands = np.asarray(demands)
    sampler_c = _demand_sampler(demands, np.asarray(masses_c), demand_mode, nbar_c)
    sampler_e = _demand_sampler(demands, np.asarray(masses_e), demand_mode, nbar_e)
    rows = []
    for i, a in zip(indices, areas):
        rng = _rng(seed, (1, int(i)))
        blk_ccu = blk_ceu = math.nan
        if ssa:
            band_c, band_e = bands
            stats_c = run_loss_cell(
                rng, band_c, [a * lam_c], [sampler_c], mu, sim_minutes, warmup_fraction
            )
            stats_e = run_loss_cell(
                rng, band_e, [a * lam_e], [sampler_e], mu, sim_minutes, warmup_fraction
            )
            occ_first = stats_c.occupancy_integral / (stats_c.measured_minutes * band_c)
            occ_second = stats_e.occupancy_integral / (stats_e.measured_minutes * band_e)
            if stats_c.arrivals[0]:
                blk_ccu = stats_c.blocked[0] / stats_c.arrivals[0]
            if stats_e.arrivals[0]:
                blk_ceu = stats_e.blocked[0] / stats_e.arrivals[0]
        else:
            (band,) = bands
            stats = run_loss_cell(
                rng, band, [a * lam_c, a * lam_e], [sampler_c, sampler_e],
                mu, sim_minutes, warmup_fraction,
            )
            occ_first = stats.occupancy_integral / (stats.measured_minutes * band)
            occ_second = math.nan
            if stats.arrivals[0]:
                blk_ccu = stats.blocked[0] / stats.arrivals[0]
            if stats.arrivals[1]:
                blk_ceu = stats.blocked[1] / stats.arrivals[1]
        rows.append((int(i), occ_first, occ_second, blk_ccu, blk_ceu))
    return rows


def simulate_temporal(
    config: ScenarioConfig,
    solution: LoadSolution,
    sim_minutes: float = 200.0,
    seed: int | None = None,
    *,
    n_cells: int = 200,
    warmup_fraction: float = 0.1,
    area_source="gamma",
    demand_mode: str = "mcs",
    workers: int = 1,
) -> TemporalEstimates:
    """Drive per-cell call processes through the policy's loss systems.

    Cell areas come from the Gamma(3.5) surrogate law by default; pass
    area_source="voronoi" for empirical tessellation areas, or a number for a
    fixed area. Arrivals split into center/edge classes with probabilities
    R^2 and 1 - R^2. Estimates are averages over cells with across-cell
    standard errors, matching the area-law expectations they validate. Cells
    are independent work units; any worker count gives identical results.
    """
    seed = config.seed if seed is None else seed
    rng_areas = _rng(seed, (0xA0EA,))
    if isinstance(area_source, (int, float)):
        areas = np.full(n_cells, float(area_source))
    elif area_source == "gamma":
        areas = rng_areas.gamma(
            _GAMMA_SHAPE, 1.0 / (_GAMMA_SHAPE * config.lambda_b_per_m2), n_cells
        )
    elif area_source == "voronoi":
        pool = voronoi_cell_areas(config.lambda_b_per_m2, seed)
        areas = pool[rng_areas.integers(0, len(pool), n_cells)]
    else:
        raise ValueError(f"unknown area source {area_source!r}")

    r2 = config.region_ratio**2
    lam_c = config.lambda_m_per_min_m2 * r2
    lam_e = config.lambda_m_per_min_m2 * (1.0 - r2)
    masses_c = mcs_probabilities(solution.ccu_coverage)
    masses_e = mcs_probabilities(solution.ceu_coverage)

    ssa = isinstance(config.policy, SsaPolicy)
    if ssa:
        bands = (
            config.n_channels * config.policy.p_m,
            config.n_channels * (1.0 - config.policy.p_m),
        )
    else:
        bands = (macro_channels(config.policy, config.n_channels),)

    n_chunks = min(n_cells, max(workers * 4, 1))
    chunks = [
        (
            seed,
            idx.tolist(),
            areas[idx].tolist(),
            ssa,
            bands,
            lam_c,
            lam_e,
            config.mu_per_min,
            sim_minutes,
            warmup_fraction,
            tuple(config.mcs.channel_demands()),
            tuple(masses_c),
            tuple(masses_e),
            demand_mode,
            solution.nbar_c,
            solution.nbar_e,
        )
        for idx in np.array_split(np.arange(n_cells), n_chunks)
        if idx.size
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunk_rows = list(pool.map(_temporal_chunk, chunks))
    else:
        chunk_rows = [_temporal_chunk(c) for c in chunks]

    occ_c = np.empty(n_cells)
    occ_e = np.empty(n_cells)
    occ_shared = np.empty(n_cells)
    blk_c = np.full(n_cells, np.nan)
    blk_e = np.full(n_cells, np.nan)
    for rows in chunk_rows:
        for i, occ_first, occ_second, b_c, b_e in rows:
            if ssa:
                occ_c[i] = occ_first
                occ_e[i] = occ_second
            else:
                occ_shared[i] = occ_first
            blk_c[i] = b_c
            blk_e[i] = b_e

    if ssa:
        return TemporalEstimates(
            policy=config.policy.name,
            zeta_center=_mean_estimate(occ_c, seed),
            zeta_edge=_mean_estimate(occ_e, seed),
            zeta_shared=None,
            b_ccu=_mean_estimate(blk_c, seed),
            b_ceu=_mean_estimate(blk_e, seed),
            sim_minutes=sim_minutes,
            n_cells=n_cells,
        )
    return TemporalEstimates(
        policy=config.policy.name,
        zeta_center=None,
        zeta_edge=None,
        zeta_shared=_mean_estimate(occ_shared, seed),
        b_ccu=_mean_estimate(blk_c, seed),
        b_ceu=_mean_estimate(blk_e, seed),
        sim_minutes=sim_minutes,
        n_cells=n_cells,
    )
