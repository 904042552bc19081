"""Scenario configuration: spectrum policies, MCS table, parameter loading.

All keys in the JSON scenario format carry explicit units in their names
(per-minute rates vs per-square-meter densities are easy to mix up). Any
numeric key may instead be given with a ``_db`` suffix; it is converted to
linear scale at parse time and the suffix stripped.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Union

import numpy as np

from .errors import ConfigError

# Default MCS ladder: 15 SIR thresholds evenly spaced from -6.5 dB to 19.6 dB.
# This is a conventional LTE-style CQI spacing, not tied to any single device
# profile, and is fully overridable via "mcs_thresholds_db" in the scenario.
DEFAULT_MCS_THRESHOLDS_DB = tuple(np.linspace(-6.5, 19.6, 15).tolist())


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


@dataclass(frozen=True)
class SsaPolicy:
    """Shared allocation: fraction p_m of channels for the cell-center band
    (shared with femto access points), the rest reserved for cell-edge users."""

    p_m: float

    name = "SSA"

    def __post_init__(self):
        if not 0.0 < self.p_m < 1.0:
            raise ConfigError("policy.p_m", f"must lie in (0, 1), got {self.p_m}")


@dataclass(frozen=True)
class CsaPolicy:
    """Co-channel allocation: every user and femto AP may access any channel."""

    name = "CSA"


@dataclass(frozen=True)
class OsaPolicy:
    """Orthogonal allocation: fraction p_o of channels reserved for the femto
    tier; the macro tier runs co-channel on the remaining channels."""

    p_o: float

    name = "OSA"

    def __post_init__(self):
        if not 0.0 <= self.p_o < 1.0:
            raise ConfigError("policy.p_o", f"must lie in [0, 1), got {self.p_o}")


SpectrumPolicy = Union[SsaPolicy, CsaPolicy, OsaPolicy]


def effective_fap_density(
    policy: SpectrumPolicy, lambda_f: float, n_channels: int, user_class: str
) -> float:
    """Per-channel density of co-channel femto APs seen by a user class.

    Each FAP occupies one uniformly chosen channel of its allowed band, so
    confining FAPs to a fraction of the spectrum raises their per-channel
    density. Cell-edge users under SSA and everyone under OSA see none.
    """
    if user_class not in ("ccu", "ceu"):
        raise ValueError(f"unknown user class {user_class!r}")
    if isinstance(policy, SsaPolicy):
        if user_class == "ceu":
            return 0.0
        return lambda_f / (n_channels * policy.p_m)
    if isinstance(policy, CsaPolicy):
        return lambda_f / n_channels
    return 0.0  # OSA: macro band is femto-free


def macro_channels(policy: SpectrumPolicy, n_channels: int) -> float:
    """Number of channels available to the macro tier under the policy."""
    if isinstance(policy, OsaPolicy):
        return n_channels * (1.0 - policy.p_o)
    return float(n_channels)


@dataclass(frozen=True)
class McsTable:
    """Ordered SIR thresholds of the modulation/coding ladder together with
    the channel bandwidth and the service rate requirement.

    Threshold i supports rate B*log2(1+Gamma_i) per channel, so a service
    needs rate_bps / (bandwidth_hz * log2(1+Gamma_i)) channels at that MCS.
    An implicit Gamma_{T+1} = +inf closes the last bin.
    """

    thresholds: tuple[float, ...]
    bandwidth_hz: float
    rate_bps: float

    def __post_init__(self):
        if len(self.thresholds) < 1:
            raise ConfigError("mcs_thresholds", "need at least one threshold")
        if any(t <= 0 for t in self.thresholds):
            raise ConfigError("mcs_thresholds", "thresholds must be positive (linear SIR)")
        if any(b <= a for a, b in zip(self.thresholds, self.thresholds[1:])):
            raise ConfigError("mcs_thresholds", "thresholds must be strictly increasing")
        if self.bandwidth_hz <= 0:
            raise ConfigError("channel_bandwidth_hz", "must be positive")
        if self.rate_bps <= 0:
            raise ConfigError("rate_requirement_bps", "must be positive")

    def channel_demands(self) -> np.ndarray:
        """Channels needed per service at each MCS level."""
        g = np.asarray(self.thresholds)
        return self.rate_bps / (self.bandwidth_hz * np.log2(1.0 + g))


@dataclass(frozen=True)
class ScenarioConfig:
    """All physical, traffic and spectrum parameters of one network scenario."""

    lambda_b_per_m2: float
    lambda_f_per_m2: float
    lambda_m_per_min_m2: float
    mu_per_min: float
    alpha: float
    p_b_watt: float
    p_f_watt: float
    n_channels: int
    bandwidth_hz: float
    rate_bps: float
    region_ratio: float
    policy: SpectrumPolicy
    beta: float = 1.0
    mcs_thresholds: tuple[float, ...] = tuple(
        db_to_linear(t) for t in DEFAULT_MCS_THRESHOLDS_DB
    )
    series_tol: float = 1e-8
    series_max_terms: int = 1000
    solver_tol: float = 1e-8
    solver_max_iter: int = 60
    seed: int = 0

    def __post_init__(self):
        positive = [
            ("lambda_b_per_m2", self.lambda_b_per_m2),
            ("mu_per_min", self.mu_per_min),
            ("p_b_watt", self.p_b_watt),
            ("p_f_watt", self.p_f_watt),
            ("bandwidth_hz", self.bandwidth_hz),
            ("rate_bps", self.rate_bps),
            ("beta", self.beta),
            ("solver_tol", self.solver_tol),
            ("series_tol", self.series_tol),
        ]
        for name, val in positive:
            if not val > 0:
                raise ConfigError(name, f"must be positive, got {val}")
        for name, val in [
            ("lambda_f_per_m2", self.lambda_f_per_m2),
            ("lambda_m_per_min_m2", self.lambda_m_per_min_m2),
        ]:
            if val < 0:
                raise ConfigError(name, f"must be nonnegative, got {val}")
        if not self.alpha > 2:
            raise ConfigError("alpha", f"path-loss exponent must exceed 2, got {self.alpha}")
        if not isinstance(self.n_channels, int) or self.n_channels < 1:
            raise ConfigError("n_channels", f"must be a positive integer, got {self.n_channels}")
        if not 0.0 < self.region_ratio <= 1.0:
            raise ConfigError("region_ratio", f"must lie in (0, 1], got {self.region_ratio}")
        if isinstance(self.policy, SsaPolicy) and self.region_ratio == 1.0:
            raise ConfigError(
                "region_ratio", "R=1 leaves the cell-edge band without users under SSA"
            )
        if self.solver_max_iter < 1 or self.series_max_terms < 1:
            raise ConfigError("solver_max_iter", "iteration caps must be at least 1")
        # Delegates threshold validation to McsTable.
        self.mcs

    @property
    def delta(self) -> float:
        return 2.0 / self.alpha

    @property
    def p_f_rel(self) -> float:
        return self.p_f_watt / self.p_b_watt

    @property
    def mcs(self) -> McsTable:
        return McsTable(self.mcs_thresholds, self.bandwidth_hz, self.rate_bps)

    def with_policy(self, policy: SpectrumPolicy) -> "ScenarioConfig":
        return replace(self, policy=policy)


_POLICY_KINDS = {"ssa", "csa", "osa"}


def _parse_policy(raw) -> SpectrumPolicy:
    if not isinstance(raw, dict) or "kind" not in raw:
        raise ConfigError("policy", "expected an object with a 'kind' field")
    kind = str(raw["kind"]).lower()
    if kind not in _POLICY_KINDS:
        raise ConfigError("policy.kind", f"unknown policy {raw['kind']!r}")
    if kind == "ssa":
        if "p_m" not in raw:
            raise ConfigError("policy.p_m", "SSA requires the band split p_m")
        return SsaPolicy(p_m=float(raw["p_m"]))
    if kind == "osa":
        return OsaPolicy(p_o=float(raw.get("p_o", 0.0)))
    return CsaPolicy()


def _linearize_db_keys(raw: dict) -> dict:
    out = {}
    for key, value in raw.items():
        if key.endswith("_db"):
            base = key[: -len("_db")]
            if isinstance(value, (list, tuple)):
                out[base] = [db_to_linear(float(v)) for v in value]
            else:
                out[base] = db_to_linear(float(value))
        else:
            out[key] = value
    return out


_FIELD_ALIASES = {
    # JSON key -> dataclass field
    "p_b_watt_per_channel": "p_b_watt",
    "p_f_watt_per_channel": "p_f_watt",
    "channel_bandwidth_hz": "bandwidth_hz",
    "rate_requirement_bps": "rate_bps",
    "mcs_thresholds": "mcs_thresholds",
}

_CONFIG_FIELDS = {
    "lambda_b_per_m2",
    "lambda_f_per_m2",
    "lambda_m_per_min_m2",
    "mu_per_min",
    "alpha",
    "p_b_watt",
    "p_f_watt",
    "n_channels",
    "bandwidth_hz",
    "rate_bps",
    "region_ratio",
    "beta",
    "mcs_thresholds",
    "series_tol",
    "series_max_terms",
    "solver_tol",
    "solver_max_iter",
    "seed",
}


def scenario_from_dict(raw: dict) -> ScenarioConfig:
    """Build a validated ScenarioConfig from a parsed JSON document."""
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "scenario document must be a JSON object")
    data = _linearize_db_keys(dict(raw))
    policy = _parse_policy(data.pop("policy", None))
    kwargs = {}
    for key, value in data.items():
        name = _FIELD_ALIASES.get(key, key)
        if name not in _CONFIG_FIELDS:
            raise ConfigError(key, "unknown scenario field")
        if name == "mcs_thresholds":
            value = tuple(float(v) for v in value)
        elif name in ("n_channels", "seed", "series_max_terms", "solver_max_iter"):
            value = int(value)
        else:
            value = float(value)
        kwargs[name] = value
    missing = {
        "lambda_b_per_m2",
        "lambda_f_per_m2",
        "lambda_m_per_min_m2",
        "mu_per_min",
        "alpha",
        "p_b_watt",
        "p_f_watt",
        "n_channels",
        "bandwidth_hz",
        "rate_bps",
        "region_ratio",
    } - set(kwargs)
    if missing:
        raise ConfigError(sorted(missing)[0], "required field missing")
    return ScenarioConfig(policy=policy, **kwargs)


def load_scenario(path) -> ScenarioConfig:
    """Load and validate a scenario JSON file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError("<file>", f"invalid JSON: {exc}") from exc
    return scenario_from_dict(raw)


def scenario_to_dict(config: ScenarioConfig) -> dict:
    """Inverse of scenario_from_dict, for report echoes."""
    policy = {"kind": config.policy.name.lower()}
    if isinstance(config.policy, SsaPolicy):
        policy["p_m"] = config.policy.p_m
    elif isinstance(config.policy, OsaPolicy):
        policy["p_o"] = config.policy.p_o
    return {
        "lambda_b_per_m2": config.lambda_b_per_m2,
        "lambda_f_per_m2": config.lambda_f_per_m2,
        "lambda_m_per_min_m2": config.lambda_m_per_min_m2,
        "mu_per_min": config.mu_per_min,
        "alpha": config.alpha,
        "p_b_watt_per_channel": config.p_b_watt,
        "p_f_watt_per_channel": config.p_f_watt,
        "n_channels": config.n_channels,
        "channel_bandwidth_hz": config.bandwidth_hz,
        "rate_requirement_bps": config.rate_bps,
        "region_ratio": config.region_ratio,
        "beta": config.beta,
        "policy": policy,
        "mcs_thresholds": list(config.mcs_thresholds),
        "series_tol": config.series_tol,
        "series_max_terms": config.series_max_terms,
        "solver_tol": config.solver_tol,
        "solver_max_iter": config.solver_max_iter,
        "seed": config.seed,
    }
