"""Angle math, tolerance tests, and truncated-Gaussian sampling."""

import math

import numpy as np
import pytest
from scipy import stats

from opinionnet.opinions import (
    AgentKind,
    AgentParams,
    OpinionState,
    sample_truncated_gaussian,
    truncation_acceptance,
    weighted_circular_update,
    within_tolerance,
)

DEG = math.radians(1.0)


# -- within_tolerance --------------------------------------------------------


def test_within_tolerance_zero_distance():
    assert within_tolerance(90 * DEG, 90 * DEG, 0.0)


def test_within_tolerance_outside():
    assert not within_tolerance(10 * DEG, 50 * DEG, 15 * DEG)


def test_within_tolerance_boundary_inclusive():
    # |80 - 100| = 20 <= 20: the bound is inclusive. Exactly representable
    # binary values keep the equality out of degree-conversion rounding.
    assert within_tolerance(1.0, 1.25, 0.25)
    assert not within_tolerance(1.0, 1.25, 0.25 - 1e-12)
    gap = abs(100 * DEG - 80 * DEG)
    assert within_tolerance(80 * DEG, 100 * DEG, gap)


def test_within_tolerance_symmetric_and_monotone():
    rng = np.random.default_rng(11)
    for _ in range(300):
        a, b = rng.uniform(0, math.pi, 2)
        tol = rng.uniform(0, math.pi)
        assert within_tolerance(a, b, tol) == within_tolerance(b, a, tol)
        if within_tolerance(a, b, tol):
            assert within_tolerance(a, b, tol * 1.5 + 1e-12)


# -- weighted_circular_update ------------------------------------------------


def direct_update_eval(pairs):
    """Independent scalar evaluation of the belief-update formula."""
    num = sum(w * math.sin(a) for w, a in pairs)
    den = sum(w * math.cos(a) for w, a in pairs)
    return math.atan2(num, den)


def test_single_influence_identity():
    assert weighted_circular_update([(1.0, 37 * DEG)]) == pytest.approx(37 * DEG, abs=1e-12)


def test_equal_weights_give_bisector():
    out = weighted_circular_update([(0.5, 30 * DEG), (0.5, 90 * DEG)])
    assert out == pytest.approx(60 * DEG, abs=1e-12)


def test_uniform_weight_scaling_invariance():
    out = weighted_circular_update([(0.2, 30 * DEG), (0.2, 90 * DEG)])
    assert out == pytest.approx(60 * DEG, abs=1e-12)
    rng = np.random.default_rng(5)
    for _ in range(100):
        k = rng.integers(1, 6)
        weights = rng.uniform(0.01, 2.0, k)
        angles = rng.uniform(0, math.pi, k)
        scale = rng.uniform(0.1, 10.0)
        a = weighted_circular_update(list(zip(weights, angles)))
        b = weighted_circular_update(list(zip(weights * scale, angles)))
        assert b == pytest.approx(a, abs=1e-12)


def test_update_matches_direct_evaluation():
    rng = np.random.default_rng(17)
    for _ in range(1000):
        k = int(rng.integers(1, 8))
        weights = rng.uniform(0.0, 1.0, k)
        weights[rng.integers(0, k)] += 0.1  # keep at least one positive
        angles = rng.uniform(0, math.pi, k)
        pairs = list(zip(weights, angles))
        assert weighted_circular_update(pairs) == pytest.approx(
            direct_update_eval(pairs), abs=1e-12
        )


def test_update_stays_within_input_range():
    rng = np.random.default_rng(23)
    for _ in range(500):
        k = int(rng.integers(1, 10))
        weights = rng.uniform(0.01, 1.0, k)
        angles = rng.uniform(0, math.pi, k)
        out = weighted_circular_update(list(zip(weights, angles)))
        assert angles.min() - 1e-12 <= out <= angles.max() + 1e-12


def test_update_rejects_empty_and_zero_weights():
    with pytest.raises(ValueError):
        weighted_circular_update([])
    with pytest.raises(ValueError):
        weighted_circular_update([(0.0, 1.0), (0.0, 2.0)])
    with pytest.raises(ValueError):
        weighted_circular_update([(-0.5, 1.0), (1.0, 2.0)])


# -- truncated Gaussian sampling ----------------------------------------------


def test_samples_respect_truncation_bounds():
    rng = np.random.default_rng(3)
    samples = sample_truncated_gaussian(90 * DEG, 10 * DEG, 1000, rng)
    assert samples.min() >= 0.0
    assert samples.max() <= math.pi


def test_sample_mean_matches_symmetric_truncation():
    # truncation to [0, pi] is symmetric around mu = pi/2, so the mean is mu
    rng = np.random.default_rng(4)
    samples = sample_truncated_gaussian(90 * DEG, 10 * DEG, 10_000, rng)
    assert abs(samples.mean() - 90 * DEG) < 1 * DEG


def test_sample_std_matches_truncnorm_oracle():
    # truncation to [0, pi] shaves the 25-degree spread down to ~24.94 degrees
    mu, sigma = 90 * DEG, 25 * DEG
    a, b = (0 - mu) / sigma, (math.pi - mu) / sigma
    oracle_std = stats.truncnorm.std(a, b, loc=mu, scale=sigma)
    assert 20 * DEG < oracle_std < 25 * DEG
    rng = np.random.default_rng(1)
    samples = sample_truncated_gaussian(mu, sigma, 10_000, rng)
    assert samples.std() == pytest.approx(oracle_std, abs=0.5 * DEG)
    assert 20 * DEG < samples.std() < 25 * DEG


def test_sampling_is_deterministic_per_seed():
    a = sample_truncated_gaussian(1.0, 0.3, 50, np.random.default_rng(42))
    b = sample_truncated_gaussian(1.0, 0.3, 50, np.random.default_rng(42))
    assert np.array_equal(a, b)


def test_pathological_config_rejected():
    # a spread this wide leaves under 1% of the mass inside [0, pi]
    mu, sigma = 0.01, 200.0
    assert truncation_acceptance(mu, sigma) < 0.01
    with pytest.raises(ValueError, match="acceptance"):
        sample_truncated_gaussian(mu, sigma, 10, np.random.default_rng(0))


def test_sampler_input_validation():
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        sample_truncated_gaussian(0.0, 0.1, 5, rng)
    with pytest.raises(ValueError):
        sample_truncated_gaussian(1.0, -0.1, 5, rng)
    with pytest.raises(ValueError):
        sample_truncated_gaussian(1.0, 0.1, 0, rng)


# -- parameter containers ------------------------------------------------------


def test_agent_params_validation():
    AgentParams(tolerance=0.1, kind=AgentKind.RIGID, self_weight=0.5)
    with pytest.raises(ValueError):
        AgentParams(tolerance=-0.1, kind=AgentKind.RIGID)
    with pytest.raises(ValueError):
        AgentParams(tolerance=0.1, kind=AgentKind.FLEXIBLE, self_weight=1.0)


def test_opinion_state_validation():
    OpinionState(theta=np.array([0.0, math.pi]), t=0)
    with pytest.raises(ValueError):
        OpinionState(theta=np.array([-0.1, 1.0]))
    with pytest.raises(ValueError):
        OpinionState(theta=np.array([1.0, math.pi + 0.1]))
    with pytest.raises(ValueError):
        OpinionState(theta=np.array([1.0]), t=-1)
