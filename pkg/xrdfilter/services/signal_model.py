"""Damped-sinusoid signal model: evaluation, realness checks and conjugate pairing."""

from __future__ import annotations

import math
from typing import List, Optional, Sequence

import numpy as np

from ..errors import ImaginaryResidualExceeded
from ..models.estimate import DampedSinusoid, ModelEstimate
from ..models.profile import AngularGrid, IntensityProfile
from ..utils.logging import get_logger

logger = get_logger(__name__)

# Relative floor added to the real-part scale in the realness check
IMAG_FLOOR = 1e-300


def pairing_tolerance(frequencies: Sequence[float], grid: AngularGrid) -> float:
    """tau_pair = 1e-6 * max(max |f|, 1 / (N * dtheta))."""
    fmax = max((abs(f) for f in frequencies), default=0.0)
    return 1e-6 * max(fmax, 1.0 / grid.span)


def evaluate_model(model: ModelEstimate, grid: AngularGrid) -> np.ndarray:
    """Complex samples of sum_k a_k e^{i phi_k} e^{(-d_k + 2 pi i f_k) theta_n} on absolute angles."""
    theta = grid.angles
    out = np.zeros(grid.n, dtype=complex)
    for component in model.components:
        if component.amplitude == 0.0:
            continue
        out += component.coefficient * np.exp(component.exponent * theta)
    return out


def reconstruct_real(model: ModelEstimate, grid: AngularGrid, tol: float = 1e-8) -> IntensityProfile:
    """Real part of the model, refusing estimates whose imaginary residual is not negligible."""
    samples = evaluate_model(model, grid)
    real_scale = float(np.max(np.abs(samples.real))) if grid.n else 0.0
    imag_peak = float(np.max(np.abs(samples.imag))) if grid.n else 0.0
    if imag_peak > tol * (real_scale + IMAG_FLOOR):
        raise ImaginaryResidualExceeded(
            f"imaginary residual {imag_peak:.3e} exceeds {tol:.1e} x real scale {real_scale:.3e}"
        )
    return IntensityProfile(grid=grid, values=samples.real)


def _snap_alternating(c: DampedSinusoid, grid: AngularGrid) -> DampedSinusoid:
    """Pole at -|z|: samples are (-1)^n times a real sequence once the start-angle phase is folded in."""
    offset = math.remainder(math.pi * grid.theta0 / grid.dtheta, 2.0 * math.pi)
    target = 0.0 if math.cos(c.phase + offset) >= 0 else math.pi
    return DampedSinusoid.signed(c.amplitude, target - offset, c.damping, grid.nyquist)


def close_conjugates(
    components: Sequence[DampedSinusoid],
    grid: AngularGrid,
    rel_tol: float = 1e-6,
) -> ModelEstimate:
    """Return a model whose components are snapped onto exact conjugate pairs.

    Components with |f| <= tau_pair are real poles and those within tau_pair
    of the Nyquist frequency are negative real poles; both are their own
    conjugates and only have their phase snapped. The rest are matched
    greedily between positive and negative frequencies; each match must agree
    in |f| and d within tau_pair, and c must agree with conj(c') within
    ``rel_tol`` times the largest amplitude of the model. If any component is
    left unmatched the components are returned unchanged with
    ``conjugate_closed=False``.
    """
    components = list(components)
    if not components:
        return ModelEstimate(components=(), conjugate_closed=True)
    tau = pairing_tolerance([c.frequency for c in components], grid)
    amax = max(c.amplitude for c in components)

    snapped: List[Optional[DampedSinusoid]] = [None] * len(components)
    nyquist = grid.nyquist
    alternating = {i for i, c in enumerate(components) if abs(abs(c.frequency) - nyquist) <= tau}
    positives = [i for i, c in enumerate(components) if c.frequency > tau and i not in alternating]
    negatives = [i for i, c in enumerate(components) if c.frequency < -tau and i not in alternating]
    for i, c in enumerate(components):
        if abs(c.frequency) <= tau:
            # real pole: zero frequency, amplitude sign carried by phase 0 or pi
            phase = 0.0 if math.cos(c.phase) >= 0 else math.pi
            snapped[i] = DampedSinusoid(amplitude=c.amplitude, phase=phase, damping=c.damping, frequency=0.0)
        elif i in alternating:
            snapped[i] = _snap_alternating(c, grid)

    if len(positives) != len(negatives):
        return ModelEstimate(components=tuple(components), conjugate_closed=False)

    unmatched = set(negatives)
    for i in sorted(positives, key=lambda j: components[j].frequency):
        p = components[i]
        best = min(
            unmatched,
            key=lambda j: abs(p.frequency + components[j].frequency) + abs(p.damping - components[j].damping),
            default=None,
        )
        if best is None:
            return ModelEstimate(components=tuple(components), conjugate_closed=False)
        q = components[best]
        # coefficient error of the least-squares fit scales with the largest amplitude
        mismatch = abs(p.coefficient - q.coefficient.conjugate())
        if abs(p.frequency + q.frequency) > tau or abs(p.damping - q.damping) > tau or mismatch > rel_tol * amax:
            return ModelEstimate(components=tuple(components), conjugate_closed=False)
        unmatched.discard(best)
        frequency = 0.5 * (p.frequency - q.frequency)
        damping = 0.5 * (p.damping + q.damping)
        mean = DampedSinusoid.from_complex(0.5 * (p.coefficient + q.coefficient.conjugate()), damping, frequency)
        snapped[i] = mean
        snapped[best] = DampedSinusoid.signed(mean.amplitude, -mean.phase, damping, -frequency)

    return ModelEstimate(components=tuple(snapped), conjugate_closed=True)


def is_conjugate_closed(model: ModelEstimate, grid: AngularGrid, rel_tol: float = 1e-6) -> bool:
    return close_conjugates(model.components, grid, rel_tol).conjugate_closed
