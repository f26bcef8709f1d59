"""Debye-function powder intensities for size/strain distributed cluster ensembles."""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from ..errors import BadCoefficients, DegenerateDenominator
from ..models.profile import IntensityProfile
from ..models.sample import DistanceHistogram, SampleSpec, ScatteringModel, SizeDistribution, StrainParams
from ..utils.logging import get_logger
from .clusters import cached_histogram

logger = get_logger(__name__)

# Upper bound on q x distance products evaluated at once
EVAL_BLOCK = 1 << 21


def lognormal_weight(n: int, dist: SizeDistribution) -> float:
    """exp(-s/2) / sqrt(2 pi xi s) * exp(-(ln n - ln xi)^2 / (2 s^2)), as printed (not normalized)."""
    if n < 1:
        raise ValueError("shell index must be >= 1")
    xi, s = dist.xi, dist.s
    prefactor = math.exp(-s / 2.0) / math.sqrt(2.0 * math.pi * xi * s)
    return prefactor * math.exp(-((math.log(n) - math.log(xi)) ** 2) / (2.0 * s * s))


def strain_factor(n: int, p: StrainParams) -> float:
    """Omega + (Xi - Omega) [pi + 2 atan((n0 - n)/w)] / [pi + 2 atan((n0 - 1)/w)]."""
    denominator = math.pi + 2.0 * math.atan((p.n0 - 1.0) / p.w)
    if abs(denominator) <= 1e-14:
        raise DegenerateDenominator(f"strain denominator vanishes for n0={p.n0}, w={p.w}")
    numerator = math.pi + 2.0 * math.atan((p.n0 - n) / p.w)
    return p.omega + (p.xi_cap - p.omega) * numerator / denominator


def _check_coefficients(model: ScatteringModel) -> None:
    if len(model.form_a) != len(model.form_b):
        raise BadCoefficients("form factor amplitude and width lists differ in length")
    if any(b < 0 for b in model.form_b):
        raise BadCoefficients("form factor widths must be nonnegative")
    if model.form_a and all(a == 0.0 for a in model.form_a) and model.form_c == 0.0:
        raise BadCoefficients("form factor amplitudes are all zero")


def scattering_prefactor(q_prime, model: Optional[ScatteringModel] = None):
    """A(q') = I0 [T(q') f(q')]^2; scalar in, scalar out."""
    model = model or ScatteringModel()
    _check_coefficients(model)
    q_prime = np.asarray(q_prime, dtype=float)
    if np.any(q_prime < 0):
        raise ValueError("q' must be nonnegative")
    transmission = np.exp(-model.debye_waller_b * q_prime**2 / 4.0)
    if model.has_form_factor:
        half_sq = (q_prime / 2.0) ** 2
        form = np.full_like(q_prime, model.form_c)
        for a, b in zip(model.form_a, model.form_b):
            form = form + a * np.exp(-b * half_sq)
    else:
        form = np.ones_like(q_prime)
    prefactor = model.i0 * (transmission * form) ** 2
    return float(prefactor) if prefactor.ndim == 0 else prefactor


def debye_intensity(hist: DistanceHistogram, a: float, q, A=1.0):
    """A {N + sum_k m_k sinc(2 q u_k a)} with numpy's normalized sinc, so sinc(0) = 1."""
    if a <= 0:
        raise ValueError("strain factor must be positive")
    q = np.asarray(q, dtype=float)
    scalar = q.ndim == 0
    q = q.reshape(-1)
    if np.any(q < 0):
        raise ValueError("q must be nonnegative")
    u = hist.distances * a
    m = hist.multiplicities.astype(float)
    pair_sum = np.zeros(q.shape[0])
    if u.size:
        rows = max(1, EVAL_BLOCK // u.size)
        for start in range(0, q.shape[0], rows):
            qs = q[start : start + rows]
            pair_sum[start : start + rows] = np.sinc(2.0 * np.outer(qs, u)) @ m
    intensity = np.asarray(A, dtype=float) * (hist.n_atoms + pair_sum)
    return float(intensity[0]) if scalar else intensity


def scattering_vector(spec: SampleSpec) -> np.ndarray:
    """Dimensionless q = 2 a_fcc sin(theta) / lambda on the sample grid."""
    return 2.0 * spec.lattice_constant * np.sin(spec.grid.angles) / spec.wavelength


def shell_weights(spec: SampleSpec, index: int) -> np.ndarray:
    structure = spec.structures[index]
    weights = np.array([lognormal_weight(n, structure.size) for n in range(1, structure.max_shell + 1)])
    if spec.normalize:
        weights = weights / weights.sum()
    return weights


def total_intensity(spec: SampleSpec) -> IntensityProfile:
    """Mixture intensity sum_X x_X sum_n f_X(n) I_{X,n}(q) on the sample grid."""
    q = scattering_vector(spec)
    prefactor = scattering_prefactor(q / spec.lattice_constant, spec.scattering)
    total = np.zeros(spec.grid.n)
    for index, structure in enumerate(spec.structures):
        if structure.fraction == 0.0:
            continue
        weights = shell_weights(spec, index)
        for n, weight in enumerate(weights, start=1):
            hist = cached_histogram(structure.type, n, spec.distance_quantum)
            a = strain_factor(n, structure.strain)
            total += structure.fraction * weight * debye_intensity(hist, a, q, prefactor)
        logger.debug("Added %s shells 1..%d", structure.type.value, structure.max_shell)
    return IntensityProfile(grid=spec.grid, values=total)
