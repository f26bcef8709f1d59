from __future__ import annotations

import math
from typing import Callable, List, Sequence, Tuple

import numpy as np
import pytest

from xrdfilter.models import (
    AngularGrid,
    DampedSinusoid,
    IntensityProfile,
    ModelEstimate,
    SampleSpec,
    SizeDistribution,
    StrainParams,
    StructureSpec,
    StructureType,
)
from xrdfilter.services.signal_model import reconstruct_real


def conjugate_pair(amplitude: float, phase: float, damping: float, frequency: float) -> List[DampedSinusoid]:
    return [
        DampedSinusoid.signed(amplitude, phase, damping, frequency),
        DampedSinusoid.signed(amplitude, -phase, damping, -frequency),
    ]


def real_pole(amplitude: float, damping: float) -> DampedSinusoid:
    return DampedSinusoid.signed(amplitude, 0.0, damping, 0.0)


def profile_from(components: Sequence[DampedSinusoid], grid: AngularGrid) -> IntensityProfile:
    model = ModelEstimate(components=tuple(components), conjugate_closed=True)
    return reconstruct_real(model, grid)


def random_closed_model(rng: np.random.Generator, order: int, grid: AngularGrid) -> List[DampedSinusoid]:
    """Conjugate-closed model of odd ``order``: one real pole plus well separated pairs."""
    pairs = (order - 1) // 2
    fmax = 0.4 * grid.nyquist
    separation = 3.0 / grid.span
    while True:
        frequencies = np.sort(rng.uniform(separation, fmax, size=pairs))
        if pairs < 2 or np.min(np.diff(frequencies)) > separation:
            break
    components = [real_pole(rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 2.0), rng.uniform(0.1, 1.0))]
    for f in frequencies:
        components += conjugate_pair(
            rng.uniform(0.5, 2.0), rng.uniform(-math.pi, math.pi), rng.uniform(0.1, 2.0), float(f)
        )
    return components


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240517)


@pytest.fixture
def small_grid() -> AngularGrid:
    return AngularGrid(theta0=0.2, dtheta=0.005, n=200)


@pytest.fixture
def two_pair_components() -> List[DampedSinusoid]:
    return conjugate_pair(1.0, 0.4, 0.3, 10.0) + conjugate_pair(0.5, -1.1, 0.5, 20.0)


@pytest.fixture
def positive_profile(small_grid, two_pair_components) -> IntensityProfile:
    """Constant background plus two damped pairs, strictly positive."""
    return profile_from([real_pole(10.0, 0.0)] + two_pair_components, small_grid)


@pytest.fixture
def make_profile() -> Callable[[Sequence[DampedSinusoid], AngularGrid], IntensityProfile]:
    return profile_from


@pytest.fixture
def small_sample_spec() -> SampleSpec:
    size = SizeDistribution(xi=1.5, s=0.3)
    return SampleSpec(
        label="tiny",
        structures=(
            StructureSpec(
                type=StructureType.CUBOCTAHEDRAL, fraction=0.5, max_shell=2, size=size,
                strain=StrainParams(n0=4.0, w=0.5),
            ),
            StructureSpec(
                type=StructureType.ICOSAHEDRAL, fraction=0.5, max_shell=2, size=size,
                strain=StrainParams(n0=4.0, w=0.5),
            ),
        ),
        grid=AngularGrid(theta0=0.2, dtheta=0.01, n=64),
    )


def sort_components(components: Sequence[DampedSinusoid]) -> List[DampedSinusoid]:
    return sorted(components, key=lambda c: (round(c.frequency, 6), c.damping))


def assert_same_components(
    estimated: Sequence[DampedSinusoid], expected: Sequence[DampedSinusoid], rtol: float = 1e-6
) -> None:
    assert len(estimated) == len(expected)
    for got, want in zip(sort_components(estimated), sort_components(expected)):
        assert got.frequency == pytest.approx(want.frequency, rel=rtol, abs=rtol)
        assert got.damping == pytest.approx(want.damping, rel=rtol, abs=rtol)
        assert got.amplitude == pytest.approx(want.amplitude, rel=rtol)
        assert abs(math.remainder(got.phase - want.phase, 2 * math.pi)) <= rtol * max(1.0, abs(want.phase))


def pair_list(model: ModelEstimate) -> List[Tuple[float, float]]:
    return [(c.damping, c.frequency) for c in model.components]
