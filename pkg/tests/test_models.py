import math

import numpy as np
import pytest
from pydantic import ValidationError

from xrdfilter.errors import ConfigError
from xrdfilter.models import (
    AngularGrid,
    BenchCell,
    BenchConfig,
    DampedSinusoid,
    DistanceHistogram,
    IntensityProfile,
    PartialSVD,
    SampleSpec,
)
from xrdfilter.models.sample import default_grid, mixture_structures, size_preset


def test_grid_angles_and_span():
    grid = AngularGrid(theta0=0.5, dtheta=0.25, n=5)
    np.testing.assert_array_equal(grid.angles, [0.5, 0.75, 1.0, 1.25, 1.5])
    assert grid.theta_last == 1.5
    assert grid.span == 1.25
    assert grid.nyquist == 2.0


def test_grid_rejects_nonpositive_step():
    with pytest.raises(ValidationError):
        AngularGrid(theta0=0.0, dtheta=0.0, n=4)


def test_profile_values_are_read_only():
    profile = IntensityProfile(grid=AngularGrid(theta0=0.0, dtheta=1.0, n=3), values=[1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        profile.values[0] = 5.0


def test_profile_length_and_sigma_checks():
    grid = AngularGrid(theta0=0.0, dtheta=1.0, n=3)
    with pytest.raises(ValidationError):
        IntensityProfile(grid=grid, values=[1.0, 2.0])
    with pytest.raises(ValidationError):
        IntensityProfile(grid=grid, values=[1.0, 2.0, 3.0], sigma=[1.0, -1.0, 1.0])


def test_scaled_profile_scales_sigma():
    grid = AngularGrid(theta0=0.0, dtheta=1.0, n=2)
    scaled = IntensityProfile(grid=grid, values=[1.0, 4.0], sigma=[1.0, 2.0]).scaled(4.0)
    np.testing.assert_array_equal(scaled.values, [4.0, 16.0])
    np.testing.assert_array_equal(scaled.sigma, [4.0, 8.0])


def test_signed_sinusoid_folds_negative_amplitude():
    component = DampedSinusoid.signed(-2.0, 0.0, 0.1, 0.0)
    assert component.amplitude == 2.0
    assert component.phase == pytest.approx(math.pi)
    assert component.coefficient == pytest.approx(-2.0)


def test_from_complex_phase_range():
    component = DampedSinusoid.from_complex(complex(-1.0, -0.0), 0.0, 1.0)
    assert component.phase == math.pi


def test_pole_of_component():
    component = DampedSinusoid(amplitude=1.0, phase=0.0, damping=0.5, frequency=3.0)
    expected = complex(np.exp((-0.5 + 2j * math.pi * 3.0) * 0.01))
    assert component.pole(0.01) == pytest.approx(expected)


def test_partial_svd_requires_descending_values():
    U = np.eye(3, 2)
    with pytest.raises(ValidationError):
        PartialSVD(U=U, S=[1.0, 2.0], V=U)


def test_histogram_multiplicity_sum_checked():
    DistanceHistogram(distances=[1.0], multiplicities=[2], n_atoms=2)
    with pytest.raises(ValidationError):
        DistanceHistogram(distances=[1.0], multiplicities=[4], n_atoms=2)


def test_sample_fractions_must_sum_to_one():
    structures = mixture_structures()
    SampleSpec(structures=tuple(structures), grid=default_grid())
    skewed = [structures[0].model_copy(update={"fraction": 0.5})] + structures[1:]
    with pytest.raises(ValidationError):
        SampleSpec(structures=tuple(skewed), grid=default_grid())


def test_sample_grid_must_stay_below_right_angle():
    with pytest.raises(ValidationError):
        SampleSpec(structures=tuple(mixture_structures()), grid=AngularGrid(theta0=1.5, dtheta=0.01, n=20))


def test_size_presets():
    spec = size_preset("3nm")
    assert spec.structures[0].size.xi == 5.0
    assert {s.strain.n0 for s in spec.structures} == {4.0, 6.0}
    with pytest.raises(ConfigError):
        size_preset("7nm")


def test_bench_config_rejects_bad_targets():
    with pytest.raises(ValidationError):
        BenchConfig(nsr_targets=(0.0,))
    with pytest.raises(ValidationError):
        BenchConfig(runs=1)


def test_bench_cell_failure_rule():
    ok = BenchCell(size="3 nm", nsr=0.1, K=9, F=1.0, mean=2.0, std=0.1, runs=100, excluded=1)
    bad = BenchCell(size="3 nm", nsr=0.1, K=9, F=1.0, mean=2.0, std=0.1, runs=98, excluded=2)
    assert not ok.failed
    assert bad.failed
    assert ok.stderr == pytest.approx(0.01)
