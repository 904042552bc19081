"""Spatial primitives: Poisson point patterns in a disk, user classification
by the nearest/second-nearest distance ratio, and the serving-distance
densities conditioned on that classification.

A user is a cell-center user (CCU) when the ratio of its nearest to its
second-nearest macro base station distance is at most the region threshold R,
a cell-edge user (CEU) otherwise. Over a homogeneous PPP the CCU probability
is exactly R^2.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree


class UserClass(enum.Enum):
    CCU = "ccu"
    CEU = "ceu"


@dataclass(frozen=True)
class Disk:
    center: tuple[float, float]
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("disk radius must be positive")

    @property
    def area(self) -> float:
        return math.pi * self.radius**2


@dataclass(frozen=True)
class PointPattern:
    """Realization of a planar point process inside a disk window."""

    points: np.ndarray  # shape (n, 2), meters
    window: Disk
    density: float  # points per m^2 used to generate the pattern

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError("points must be an (n, 2) array")
        object.__setattr__(self, "points", pts)
        cx, cy = self.window.center
        d2 = (pts[:, 0] - cx) ** 2 + (pts[:, 1] - cy) ** 2
        if pts.shape[0] and d2.max() > self.window.radius**2 * (1 + 1e-12):
            raise ValueError("all points must lie inside the window")

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class DistancePair:
    """Distances from a user to its nearest and second-nearest MBS."""

    r_m: float
    r_d: float

    def __post_init__(self):
        if not 0 < self.r_m <= self.r_d:
            raise ValueError(f"need 0 < r_m <= r_d, got ({self.r_m}, {self.r_d})")


def _rng_for(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(np.random.SeedSequence(seed))


def sample_ppp(density: float, window: Disk, seed) -> PointPattern:
    """Sample a homogeneous PPP of the given intensity in a disk window.

    The point count is Poisson(density * area) and points are i.i.d. uniform
    over the disk. `seed` may be an integer or a numpy Generator; the same
    integer seed always yields the same pattern.
    """
    if density < 0:
        raise ValueError("density must be nonnegative")
    rng = _rng_for(seed)
    n = rng.poisson(density * window.area)
    r = window.radius * np.sqrt(rng.random(n))
    theta = 2.0 * math.pi * rng.random(n)
    cx, cy = window.center
    pts = np.column_stack((cx + r * np.cos(theta), cy + r * np.sin(theta)))
    return PointPattern(points=pts, window=window, density=density)


def classify_user(pair: DistancePair, region_ratio: float) -> UserClass:
    """CCU when r_m / r_d <= R, CEU otherwise. Scale invariant."""
    _check_ratio(region_ratio)
    return UserClass.CCU if pair.r_m <= region_ratio * pair.r_d else UserClass.CEU


def prob_ccu(region_ratio: float) -> float:
    """Probability that a uniformly placed user is a CCU: exactly R^2."""
    _check_ratio(region_ratio)
    return region_ratio**2


def prob_ceu(region_ratio: float) -> float:
    """Complement of prob_ccu."""
    return 1.0 - prob_ccu(region_ratio)


def pdf_serving_distance_ccu(r_c, lambda_b: float, region_ratio: float):
    """Density of the serving distance of a CCU.

    Rayleigh-type with scale shrunk by R: 2 pi lambda_B (r/R^2) exp(-pi
    lambda_B r^2 / R^2). R=1 recovers the unconditioned nearest-neighbor law.
    Accepts scalar or array r_c.
    """
    _check_ratio(region_ratio)
    if lambda_b <= 0:
        raise ValueError("lambda_b must be positive")
    r = np.asarray(r_c, dtype=float)
    if np.any(r < 0):
        raise ValueError("distances must be nonnegative")
    r2 = region_ratio**2
    out = 2.0 * math.pi * lambda_b * (r / r2) * np.exp(-math.pi * lambda_b * r**2 / r2)
    return out if out.ndim else float(out)


def pdf_serving_distance_ceu(r_e, lambda_b: float, region_ratio: float):
    """Density of the serving distance of a CEU.

    2 pi lambda_B r / (1 - R^2) * [exp(-pi lambda_B r^2) - exp(-pi lambda_B
    r^2 / R^2)]. Rejects R = 1, where the CEU event has zero probability.
    """
    _check_ratio(region_ratio)
    if region_ratio == 1.0:
        raise ValueError("R=1 leaves the cell-edge class with zero probability")
    if lambda_b <= 0:
        raise ValueError("lambda_b must be positive")
    r = np.asarray(r_e, dtype=float)
    if np.any(r < 0):
        raise ValueError("distances must be nonnegative")
    r2 = region_ratio**2
    x = math.pi * lambda_b * r**2
    out = 2.0 * math.pi * lambda_b * r / (1.0 - r2) * (np.exp(-x) - np.exp(-x / r2))
    return out if out.ndim else float(out)


def cdf_serving_distance_ccu(r_c, lambda_b: float, region_ratio: float):
    """CDF matching pdf_serving_distance_ccu (used by goodness-of-fit tests)."""
    _check_ratio(region_ratio)
    r = np.asarray(r_c, dtype=float)
    return 1.0 - np.exp(-math.pi * lambda_b * r**2 / region_ratio**2)


def cdf_serving_distance_ceu(r_e, lambda_b: float, region_ratio: float):
    """CDF matching pdf_serving_distance_ceu."""
    _check_ratio(region_ratio)
    if region_ratio == 1.0:
        raise ValueError("R=1 leaves the cell-edge class with zero probability")
    r = np.asarray(r_e, dtype=float)
    r2 = region_ratio**2
    x = math.pi * lambda_b * r**2
    return 1.0 - (np.exp(-x) - r2 * np.exp(-x / r2)) / (1.0 - r2)


def nearest_two_distances(pattern: PointPattern, users: np.ndarray):
    """Distances from each user location to the nearest and second-nearest
    points of the pattern. Requires at least two points."""
    if len(pattern) < 2:
        raise ValueError("pattern needs at least two points")
    tree = cKDTree(pattern.points)
    dist, _ = tree.query(np.asarray(users, dtype=float), k=2)
    return dist[:, 0], dist[:, 1]


def simulation_window(lambda_b: float, min_expected_points: float = 500.0) -> Disk:
    """Disk sized so the expected MBS count reaches `min_expected_points`.

    Statistics should be collected only well inside the window (the samplers
    in `montecarlo` evaluate users at the center or within half the radius)
    so that truncated far-field interference stays negligible.
    """
    if lambda_b <= 0:
        raise ValueError("lambda_b must be positive")
    radius = math.sqrt(min_expected_points / (math.pi * lambda_b))
    return Disk(center=(0.0, 0.0), radius=radius)


def _check_ratio(region_ratio: float) -> None:
    if not 0.0 < region_ratio <= 1.0:
        raise ValueError(f"region ratio must lie in (0, 1], got {region_ratio}")
