"""Shared defaults for the experiment scripts."""

from hetload import ScenarioConfig

LAMBDA_B = 5e-6

DEFAULTS = dict(
    lambda_b_per_m2=LAMBDA_B,
    lambda_f_per_m2=50 * LAMBDA_B,
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


def default_config(policy, **overrides) -> ScenarioConfig:
    params = dict(DEFAULTS)
    params.update(overrides)
    return ScenarioConfig(policy=policy, **params)
