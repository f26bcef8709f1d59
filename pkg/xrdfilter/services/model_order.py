"""Model-order selection from the (frequency, singular value) scan."""

from __future__ import annotations

import math
from typing import Optional, Tuple

import numpy as np
import scipy.fft

from .. import settings
from ..errors import InvalidK, NoTransition
from ..models.estimate import OrderDecision, OrderScan, ScanPair
from ..models.profile import IntensityProfile
from ..utils.logging import get_logger
from .estimator import energy_ranking, estimate_model

logger = get_logger(__name__)


def order_scan(
    profile: IntensityProfile,
    k_max: Optional[int] = None,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
    seed: int = 0,
) -> OrderScan:
    """Estimate k_max components and pair each with a singular value.

    The i-th largest singular value goes with the i-th most energetic
    component. Pairs are returned sorted by ascending |f|.
    """
    k_max = settings.DEFAULT_KMAX if k_max is None else int(k_max)
    if k_max < 2:
        raise InvalidK(f"order scan needs k_max >= 2, got {k_max}")
    report = estimate_model(profile, k_max, tol=tol, max_iter=max_iter, seed=seed)
    ranking = energy_ranking(report.model, profile.grid)
    pairs = [
        ScanPair(
            frequency=abs(report.model.components[index].frequency),
            singular_value=report.singular_values[rank],
            component=index,
        )
        for rank, index in enumerate(ranking)
    ]
    pairs.sort(key=lambda p: (p.frequency, -p.singular_value))
    return OrderScan(pairs=tuple(pairs), k_max=k_max)


def _log_gaps(scan: OrderScan) -> Tuple[np.ndarray, np.ndarray]:
    """log10 drops between consecutive scan points with distinct |f|.

    Returns the gaps and, for each, the index of the point after the drop.
    """
    series = scan.series()
    gaps, after = [], []
    for i in range(len(series) - 1):
        (f0, s0), (f1, s1) = series[i], series[i + 1]
        if f1 == f0:
            continue
        # a zero singular value sits infinitely far below any positive one
        hi = math.log10(s0) if s0 > 0 else -math.inf
        lo = math.log10(s1) if s1 > 0 else -math.inf
        gaps.append(hi - lo if math.isfinite(hi) or math.isfinite(lo) else 0.0)
        after.append(i + 1)
    return np.asarray(gaps, dtype=float), np.asarray(after, dtype=int)


def count_below(scan: OrderScan, f_cutoff: float) -> int:
    return sum(1 for p in scan.pairs if p.frequency < f_cutoff)


def select_order(
    scan: OrderScan,
    g_min: Optional[float] = None,
    f_cutoff: Optional[float] = None,
) -> OrderDecision:
    """Pick K at the largest singular-value drop along ascending |f|.

    A manual ``f_cutoff`` bypasses the gap search; K is then the number of
    components with |f| strictly below it.
    """
    if f_cutoff is not None:
        K = count_below(scan, f_cutoff)
        if K < 1:
            raise InvalidK(f"no component below the manual cutoff {f_cutoff} rad^-1")
        return OrderDecision(K=K, f_cutoff=float(f_cutoff), score=math.nan, manual=True)

    g_min = settings.DEFAULT_GAP_DECADES if g_min is None else float(g_min)
    gaps, after = _log_gaps(scan)
    if gaps.size == 0:
        raise NoTransition("scan has no two distinct frequencies to compare")
    best = int(np.argmax(gaps))
    score = float(gaps[best])
    if score < g_min:
        raise NoTransition(f"largest singular-value drop {score:.3f} decades is below {g_min}")
    lower = scan.pairs[after[best] - 1].frequency
    upper = scan.pairs[after[best]].frequency
    cutoff = 0.5 * (lower + upper)
    K = count_below(scan, cutoff)
    logger.info("Selected K=%d at f_cutoff=%.4g rad^-1 (drop %.2f decades)", K, cutoff, score)
    return OrderDecision(K=K, f_cutoff=cutoff, score=score, manual=False)


def auto_order(profile: IntensityProfile, k_max: Optional[int] = None, g_min: Optional[float] = None, seed: int = 0):
    """order_scan followed by select_order; returns (decision, scan)."""
    scan = order_scan(profile, k_max, seed=seed)
    return select_order(scan, g_min=g_min), scan


def dft_spectrum(profile: IntensityProfile) -> Tuple[np.ndarray, np.ndarray]:
    """One-sided amplitude spectrum |DFT| / N on the frequency axis in rad^-1."""
    grid = profile.grid
    frequencies = scipy.fft.rfftfreq(grid.n, d=grid.dtheta)
    amplitudes = np.abs(scipy.fft.rfft(profile.values)) / grid.n
    return frequencies, amplitudes
