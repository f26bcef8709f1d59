"""Poisson counting noise, noise-to-signal ratios and the filter performance measure."""

from __future__ import annotations

from typing import List, Literal, Sequence, Tuple

import numpy as np

from ..errors import InvalidShape, NegativeIntensity, PerfectFilter, UsageError, ZeroSignal
from ..models.bench import NoiseSpec
from ..models.profile import IntensityProfile
from ..utils.logging import get_logger

logger = get_logger(__name__)

NsrMode = Literal["deterministic", "realization"]


def _sample_generator(seed: int, index: int) -> np.random.Generator:
    """Counter-based stream keyed by (seed, sample index)."""
    return np.random.Generator(np.random.Philox(key=(int(seed) << 64) | int(index)))


def poissonize(profile: IntensityProfile, spec: NoiseSpec) -> IntensityProfile:
    """Independent Poisson(F * I_n) draws, one keyed stream per sample.

    numpy samples small means (< 10) by inversion and larger ones by PTRS
    transformed rejection. sigma is sqrt(max(count, 1)).
    """
    values = profile.values
    if np.any(values < 0):
        raise NegativeIntensity(f"intensity must be nonnegative, minimum is {float(values.min()):.6g}")
    means = spec.F * values
    counts = np.array(
        [_sample_generator(spec.seed, n).poisson(mean) if mean > 0 else 0 for n, mean in enumerate(means)],
        dtype=float,
    )
    return IntensityProfile(grid=profile.grid, values=counts, sigma=np.sqrt(np.maximum(counts, 1.0)))


def run_seed(master_seed: int, run: int) -> int:
    """64-bit seed for Monte Carlo run ``run``."""
    return int(np.random.SeedSequence([int(master_seed), int(run)]).generate_state(1, np.uint64)[0])


def _ratio(values: np.ndarray) -> float:
    if np.any(values < 0):
        raise NegativeIntensity("NSR needs nonnegative intensities")
    norm = float(np.linalg.norm(values))
    if norm == 0.0:
        raise ZeroSignal("NSR is undefined for an all-zero profile")
    return float(np.linalg.norm(np.sqrt(values))) / norm


def nsr(profile: IntensityProfile, mode: NsrMode = "deterministic", seed: int = 0) -> float:
    """||sqrt(I)|| / ||I|| as a fraction.

    ``deterministic`` evaluates the ratio on the given mean profile;
    ``realization`` evaluates it on one Poisson draw of that profile.
    """
    if mode == "deterministic":
        return _ratio(profile.values)
    if mode == "realization":
        _ratio(profile.values)
        return _ratio(poissonize(profile, NoiseSpec(F=1.0, seed=seed)).values)
    raise UsageError(f"unknown NSR mode {mode!r}")


def measured_nsr(profile: IntensityProfile) -> float:
    """NSR of a measured profile using its own sigma column when present."""
    if profile.sigma is None:
        return _ratio(profile.values)
    norm = float(np.linalg.norm(profile.values))
    if norm == 0.0:
        raise ZeroSignal("NSR is undefined for an all-zero profile")
    return float(np.linalg.norm(profile.sigma)) / norm


def nsr_curve(
    profile: IntensityProfile, factors: Sequence[float], mode: NsrMode = "deterministic", seed: int = 0
) -> List[Tuple[float, float]]:
    """(F, NSR(F * I)) for each scaling factor."""
    curve = []
    for F in factors:
        if F <= 0:
            raise UsageError(f"scaling factors must be positive, got {F!r}")
        curve.append((float(F), nsr(profile.scaled(F), mode, seed)))
    return curve


def performance_measure(noisy: IntensityProfile, filtered: IntensityProfile, truth: IntensityProfile) -> float:
    """||I_exp - I_th|| / ||I_fil - I_th||; above 1 the filter moved toward the truth."""
    if not (noisy.grid == filtered.grid == truth.grid):
        raise InvalidShape("performance measure needs three profiles on one grid")
    denominator = float(np.linalg.norm(filtered.values - truth.values))
    if denominator == 0.0:
        raise PerfectFilter("filtered profile equals the truth exactly")
    return float(np.linalg.norm(noisy.values - truth.values)) / denominator
