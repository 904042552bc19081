import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from hetload.geometry import (
    Disk,
    DistancePair,
    UserClass,
    cdf_serving_distance_ccu,
    cdf_serving_distance_ceu,
    classify_user,
    pdf_serving_distance_ccu,
    pdf_serving_distance_ceu,
    prob_ccu,
    prob_ceu,
    sample_ppp,
    simulation_window,
)

LAMBDA_B = 5e-6


def test_zero_density_yields_empty_pattern():
    pattern = sample_ppp(0.0, Disk((0, 0), 1000.0), seed=1)
    assert len(pattern) == 0


def test_same_seed_same_pattern():
    window = Disk((0, 0), 5000.0)
    a = sample_ppp(LAMBDA_B, window, seed=42)
    b = sample_ppp(LAMBDA_B, window, seed=42)
    assert np.array_equal(a.points, b.points)
    c = sample_ppp(LAMBDA_B, window, seed=43)
    assert not np.array_equal(a.points, c.points)


def test_ppp_mean_count():
    # Poisson mean = density * area; 10000 replications within 3 standard errors
    window = Disk((0, 0), 10_000.0)
    expected = LAMBDA_B * window.area
    reps = 10_000
    counts = np.array([len(sample_ppp(LAMBDA_B, window, seed=s)) for s in range(reps)])
    stderr = math.sqrt(expected / reps)  # Poisson variance = mean
    assert abs(counts.mean() - expected) <= 3 * stderr


def test_points_inside_window():
    window = Disk((100.0, -50.0), 2000.0)
    pattern = sample_ppp(1e-4, window, seed=7)
    d2 = (pattern.points[:, 0] - 100.0) ** 2 + (pattern.points[:, 1] + 50.0) ** 2
    assert np.all(d2 <= window.radius**2 * (1 + 1e-12))


def test_classify_examples():
    assert classify_user(DistancePair(100.0, 300.0), 0.707) is UserClass.CCU
    assert classify_user(DistancePair(290.0, 300.0), 0.707) is UserClass.CEU
    # equal distances always land on the edge side for R < 1
    assert classify_user(DistancePair(250.0, 250.0), 0.99) is UserClass.CEU


@given(
    r_m=st.floats(min_value=1e-3, max_value=1e4),
    ratio=st.floats(min_value=1.0, max_value=100.0),
    scale=st.floats(min_value=1e-3, max_value=1e3),
    region=st.floats(min_value=0.01, max_value=1.0),
)
@settings(max_examples=200, deadline=None)
def test_classification_scale_invariant(r_m, ratio, scale, region):
    pair = DistancePair(r_m, r_m * ratio)
    scaled = DistancePair(r_m * scale, r_m * ratio * scale)
    assert classify_user(pair, region) == classify_user(scaled, region)


def test_prob_ccu_values():
    assert prob_ccu(1.0) == 1.0
    assert prob_ccu(0.707) == pytest.approx(0.499849, abs=1e-6)
    assert prob_ccu(0.5) == 0.25


@given(region=st.floats(min_value=1e-6, max_value=1.0))
@settings(max_examples=200, deadline=None)
def test_prob_complement(region):
    assert prob_ccu(region) + prob_ceu(region) == 1.0


@pytest.mark.parametrize("region", [0.3, 0.707, 1.0])
def test_ccu_pdf_normalizes(region):
    val, _ = quad(lambda r: pdf_serving_distance_ccu(r, LAMBDA_B, region), 0, np.inf)
    assert abs(val - 1.0) <= 1e-9
    assert pdf_serving_distance_ccu(0.0, LAMBDA_B, region) == 0.0


@pytest.mark.parametrize("region", [0.3, 0.707, 0.95])
def test_ceu_pdf_normalizes(region):
    val, _ = quad(lambda r: pdf_serving_distance_ceu(r, LAMBDA_B, region), 0, np.inf)
    assert abs(val - 1.0) <= 1e-9
    assert pdf_serving_distance_ceu(0.0, LAMBDA_B, region) == 0.0


def test_ccu_pdf_r1_is_nearest_neighbor_law():
    r = np.linspace(1.0, 2000.0, 50)
    got = pdf_serving_distance_ccu(r, LAMBDA_B, 1.0)
    expected = 2 * math.pi * LAMBDA_B * r * np.exp(-math.pi * LAMBDA_B * r**2)
    assert np.allclose(got, expected, rtol=1e-12)


def test_ceu_pdf_rejects_unit_ratio():
    with pytest.raises(ValueError):
        pdf_serving_distance_ceu(100.0, LAMBDA_B, 1.0)
    with pytest.raises(ValueError):
        cdf_serving_distance_ceu(100.0, LAMBDA_B, 1.0)


def test_pdfs_nonnegative():
    r = np.linspace(0, 5000, 200)
    assert np.all(pdf_serving_distance_ccu(r, LAMBDA_B, 0.707) >= 0)
    assert np.all(pdf_serving_distance_ceu(r, LAMBDA_B, 0.707) >= 0)


def test_cdf_matches_pdf_by_quadrature():
    for region, pdf, cdf in [
        (0.707, pdf_serving_distance_ccu, cdf_serving_distance_ccu),
        (0.707, pdf_serving_distance_ceu, cdf_serving_distance_ceu),
    ]:
        for r_stop in (200.0, 500.0, 1200.0):
            val, _ = quad(lambda r: pdf(r, LAMBDA_B, region), 0, r_stop)
            assert val == pytest.approx(cdf(r_stop, LAMBDA_B, region), abs=1e-9)


def test_window_sizing():
    window = simulation_window(LAMBDA_B, 500.0)
    assert LAMBDA_B * window.area == pytest.approx(500.0, rel=1e-12)


def test_distance_pair_invariant():
    with pytest.raises(ValueError):
        DistancePair(10.0, 5.0)
    with pytest.raises(ValueError):
        DistancePair(0.0, 5.0)


def test_classification_fraction_small_scale():
    # smaller-scale version of the acceptance check: binomial 3-sigma bound
    from hetload.montecarlo import classification_fraction

    est = classification_fraction(LAMBDA_B, 0.5, users=20_000, seed=11)
    assert abs(est.mean - 0.25) <= 3 * est.stderr + 1e-3
