"""Load-aware coverage, blocking and energy analysis for two-tier random
cellular networks, with an independent Monte-Carlo validation engine."""

from .blocking_energy import (
    BlockingReport,
    EnergyReport,
    LossSystem,
    MultiClassLossSystem,
    blocking_2d,
    energy_efficiency,
    erlang_b,
    fair_pm_search,
    kaufman_roberts,
    mc2d_state_probs,
    network_blocking,
)
from .config import (
    CsaPolicy,
    McsTable,
    OsaPolicy,
    ScenarioConfig,
    SsaPolicy,
    effective_fap_density,
    load_scenario,
    macro_channels,
    scenario_from_dict,
)
from .coverage import (
    CoverageCurve,
    CoverageInputs,
    cov_ccu,
    cov_ceu_integral,
    cov_ceu_series,
    cov_ceu_series_detail,
    coverage_curve,
)
from .errors import (
    BracketSearchError,
    ConfigError,
    FixedPointError,
    GridResolutionError,
    HetloadError,
    InsufficientSamplesError,
    NumericalError,
    QuadratureError,
    SeriesConvergenceError,
    StateSpaceError,
    ZeroLoadError,
)
from .geometry import (
    Disk,
    DistancePair,
    PointPattern,
    UserClass,
    classify_user,
    pdf_serving_distance_ccu,
    pdf_serving_distance_ceu,
    prob_ccu,
    prob_ceu,
    sample_ppp,
    simulation_window,
)
from .interference import (
    PathLossModel,
    TierPowers,
    femto_coefficient,
    kernel_g,
    kernel_h,
    lt_femto,
    lt_mbs_ccu,
    lt_mbs_ceu_dominant_off,
    lt_mbs_ceu_dominant_on,
)
from .load import (
    LoadSolution,
    activity_factor,
    cell_area_pdf,
    mcs_probabilities,
    mean_channels,
    solve_fixed_point,
)
from .montecarlo import (
    OutageEstimates,
    SimEstimate,
    SirSample,
    TemporalEstimates,
    classification_fraction,
    run_loss_cell,
    sample_user_distances,
    simulate_outage,
    simulate_temporal,
    voronoi_cell_areas,
)
from .runner import ScenarioReport, SweepSpec, run_scenario, run_sweep

__version__ = "0.1.0"
