import math

import numpy as np
import pytest

from xrdfilter.errors import NegativeIntensity, PerfectFilter, UsageError, ZeroSignal
from xrdfilter.models import AngularGrid, IntensityProfile, NoiseSpec
from xrdfilter.services.noise import (
    measured_nsr,
    nsr,
    nsr_curve,
    performance_measure,
    poissonize,
    run_seed,
)


def _profile(values):
    values = np.asarray(values, dtype=float)
    return IntensityProfile(grid=AngularGrid(theta0=0.2, dtheta=0.001, n=values.size), values=values)


@pytest.fixture
def shaped_profile():
    theta = np.arange(500)
    return _profile(1000.0 * (1.5 + np.sin(theta / 40.0)))


def test_zero_intensity_gives_zero_counts():
    noisy = poissonize(_profile(np.zeros(20)), NoiseSpec(F=3.0, seed=1))
    np.testing.assert_array_equal(noisy.values, 0.0)
    np.testing.assert_array_equal(noisy.sigma, 1.0)


def test_fixed_seed_is_reproducible(shaped_profile):
    first = poissonize(shaped_profile, NoiseSpec(F=1.0, seed=42))
    second = poissonize(shaped_profile, NoiseSpec(F=1.0, seed=42))
    other = poissonize(shaped_profile, NoiseSpec(F=1.0, seed=43))
    np.testing.assert_array_equal(first.values, second.values)
    assert not np.array_equal(first.values, other.values)
    assert np.all(first.values == np.round(first.values))


def test_samples_are_keyed_by_index(shaped_profile):
    full = poissonize(shaped_profile, NoiseSpec(seed=5)).values
    head = poissonize(_profile(shaped_profile.values[:50]), NoiseSpec(seed=5)).values
    np.testing.assert_array_equal(full[:50], head)


def test_sigma_column(shaped_profile):
    noisy = poissonize(shaped_profile, NoiseSpec(seed=3))
    np.testing.assert_array_equal(noisy.sigma, np.sqrt(np.maximum(noisy.values, 1.0)))


def test_large_mean_band():
    noisy = poissonize(_profile(np.full(1000, 1e6)), NoiseSpec(seed=11))
    assert abs(noisy.values.mean() - 1e6) < 3e3


def test_mean_and_variance_at_fixed_level():
    noisy = poissonize(_profile(np.full(10_000, 100.0)), NoiseSpec(seed=2))
    assert noisy.values.mean() == pytest.approx(100.0, rel=0.05)
    assert noisy.values.var() == pytest.approx(100.0, rel=0.05)


@pytest.mark.slow
def test_gaussian_limit_skewness():
    level = 1e4
    noisy = poissonize(_profile(np.full(100_000, level)), NoiseSpec(seed=9)).values
    standardized = (noisy - level) / math.sqrt(level)
    skew = np.mean(standardized**3) / np.mean(standardized**2) ** 1.5
    assert abs(skew) < 0.05


def test_negative_intensity_rejected():
    with pytest.raises(NegativeIntensity):
        poissonize(_profile([1.0, -1.0, 2.0]), NoiseSpec())


def test_constant_profile_nsr():
    assert nsr(_profile(np.full(64, 100.0))) == pytest.approx(0.1, rel=1e-14)


def test_nsr_scaling_law(shaped_profile):
    base = nsr(shaped_profile)
    for F in (0.5, 2.0, 9.0):
        assert nsr(shaped_profile.scaled(F)) == pytest.approx(base / math.sqrt(F), rel=1e-13)


def test_realization_mode_tracks_deterministic(shaped_profile):
    for F, seed in ((0.5, 1), (1.0, 2), (2.0, 3)):
        scaled = shaped_profile.scaled(F)
        assert nsr(scaled, "realization", seed) == pytest.approx(nsr(scaled), rel=0.02)


def test_nsr_curve(shaped_profile):
    curve = nsr_curve(shaped_profile, [1.0, 4.0])
    assert curve[0][0] == 1.0
    assert curve[1][1] == pytest.approx(curve[0][1] / 2.0)
    with pytest.raises(UsageError):
        nsr_curve(shaped_profile, [1.0, 0.0])
    with pytest.raises(UsageError):
        nsr(shaped_profile, "bootstrap")


def test_zero_signal():
    with pytest.raises(ZeroSignal):
        nsr(_profile(np.zeros(10)))


def test_measured_nsr_uses_sigma():
    grid = AngularGrid(theta0=0.2, dtheta=0.001, n=4)
    profile = IntensityProfile(grid=grid, values=[100.0] * 4, sigma=[5.0] * 4)
    assert measured_nsr(profile) == pytest.approx(0.05)
    assert measured_nsr(profile.with_values([100.0] * 4)) == pytest.approx(0.1)


def test_performance_measure(shaped_profile):
    truth = shaped_profile
    noisy = poissonize(truth, NoiseSpec(seed=4))
    assert performance_measure(noisy, noisy, truth) == 1.0
    with pytest.raises(PerfectFilter):
        performance_measure(noisy, truth, truth)
    halfway = truth.with_values(0.5 * (noisy.values + truth.values))
    assert performance_measure(noisy, halfway, truth) == pytest.approx(2.0)
    scaled = performance_measure(noisy.scaled(3.0), halfway.scaled(3.0), truth.scaled(3.0))
    assert scaled == pytest.approx(2.0, rel=1e-14)


def test_run_seeds_are_stable_and_distinct():
    seeds = [run_seed(17, r) for r in range(100)]
    assert seeds == [run_seed(17, r) for r in range(100)]
    assert len(set(seeds)) == 100
    assert all(0 <= s < 2**64 for s in seeds)
