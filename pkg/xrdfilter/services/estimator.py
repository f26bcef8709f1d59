"""HLSVD-PRO estimation and filtering.

Pipeline: Hankel operator -> Lanczos partial SVD -> rank-K truncation ->
shift-invariance least squares for E -> eigenvalues z_k of E -> (d_k, f_k)
-> amplitude/phase least squares on absolute angles -> real reconstruction.
"""

from __future__ import annotations

import math
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from ..errors import InvalidK, InvalidShape, NoConvergence, RankDeficient, ZeroPole
from ..models.estimate import (
    DampedSinusoid,
    EstimationDiagnostics,
    EstimationReport,
    ModelEstimate,
    PartialSVD,
)
from ..models.profile import AngularGrid, IntensityProfile
from ..utils.logging import get_logger
from .hankel import build_hankel
from .lanczos import EPS, K_CAP, lanczos_svd
from .signal_model import close_conjugates, pairing_tolerance, reconstruct_real

logger = get_logger(__name__)

CONDITION_LIMIT = 1e12


class AmplitudeFit(NamedTuple):
    coefficients: np.ndarray
    condition: float
    ill_conditioned: bool
    coincident: bool
    nonfinite: Tuple[int, ...]

    @property
    def pairs(self) -> List[Tuple[float, float]]:
        return [(float(abs(c)), float(np.angle(c))) for c in self.coefficients]


def _qr_lstsq(A: np.ndarray, B: np.ndarray) -> Tuple[np.ndarray, float]:
    """Least squares by column-pivoted Householder QR on column-normalized A.

    Returns the solution for the original (unscaled) columns and the
    condition estimate |R_00| / |R_kk| of the scaled problem.
    """
    norms = np.linalg.norm(A, axis=0)
    norms[norms == 0] = 1.0
    Q, R, piv = scipy.linalg.qr(A / norms, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    condition = math.inf if diag[-1] == 0 else float(diag[0] / diag[-1])
    if not math.isfinite(condition) or condition > CONDITION_LIMIT:
        return np.full((A.shape[1],) + B.shape[1:], np.nan, dtype=complex), condition
    Y = scipy.linalg.solve_triangular(R, Q.conj().T @ B)
    X = np.empty_like(Y)
    X[piv] = Y
    return X / (norms if X.ndim == 1 else norms[:, None]), condition


def truncate(svd: PartialSVD, K: int) -> PartialSVD:
    """Keep the first K triplets."""
    if not 0 <= K <= svd.k:
        raise InvalidK(f"cannot truncate {svd.k} triplets to rank {K}")
    residuals = None if svd.residuals is None else svd.residuals[:K]
    return PartialSVD(
        U=svd.U[:, :K], S=svd.S[:K], V=svd.V[:, :K], iterations=svd.iterations, residuals=residuals
    )


def _shift_matrix(V_K: np.ndarray) -> Tuple[np.ndarray, float]:
    V_K = np.asarray(V_K, dtype=complex)
    if not np.any(V_K.imag):
        # real singular vectors give a real E, whose eigenvalues pair exactly
        V_K = V_K.real
    M, K = V_K.shape
    if K == 0:
        return np.zeros((0, 0), dtype=complex), 1.0
    if M - 1 < K:
        raise InvalidShape(f"shift invariance needs M - 1 >= K, got M={M}, K={K}")
    top, bottom = V_K[:-1], V_K[1:]
    E_h, condition = _qr_lstsq(top, bottom)
    if condition > CONDITION_LIMIT:
        raise RankDeficient(f"top block of V_K is rank deficient (condition {condition:.2e})")
    return E_h.conj().T, condition


def shift_invariance_solve(V_K: np.ndarray) -> np.ndarray:
    """E from V_top E^H ~= V_bottom (top drops the last row, bottom the first)."""
    return _shift_matrix(V_K)[0]


def eigenvalues(E: np.ndarray) -> np.ndarray:
    """All eigenvalues of E (Hessenberg reduction and shifted QR in LAPACK)."""
    E = np.asarray(E, dtype=complex)
    if E.shape[0] > K_CAP:
        raise InvalidK(f"eigenvalue stage limited to K <= {K_CAP}, got {E.shape[0]}")
    if E.size == 0:
        return np.zeros(0, dtype=complex)
    # a real matrix keeps its eigenvalues in exact conjugate pairs
    if np.all(E.imag == 0):
        E = E.real
    try:
        return scipy.linalg.eigvals(E, check_finite=True).astype(complex)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NoConvergence(f"eigenvalue iteration failed: {exc}") from exc


def poles_to_params(z: complex, dtheta: float) -> Tuple[float, float]:
    """z = exp((-d + 2 pi i f) dtheta) -> (d, f) with arg(z) in (-pi, pi]."""
    if dtheta <= 0:
        raise InvalidShape("dtheta must be positive")
    if z == 0:
        raise ZeroPole("pole at the origin has no damping/frequency")
    angle = math.atan2(z.imag, z.real)
    if angle == -math.pi:
        angle = math.pi
    return -math.log(abs(z)) / dtheta, angle / (2.0 * math.pi * dtheta)


def _coincident(poles: Sequence[Tuple[float, float]], grid: AngularGrid) -> bool:
    tau = pairing_tolerance([f for _, f in poles], grid)
    for i in range(len(poles)):
        for j in range(i + 1, len(poles)):
            if abs(poles[i][1] - poles[j][1]) <= tau and abs(poles[i][0] - poles[j][0]) <= tau:
                return True
    return False


def amplitude_phase_ls(signal, grid: AngularGrid, poles: Sequence[Tuple[float, float]]) -> AmplitudeFit:
    """Complex amplitudes c_k of the damped-sinusoid basis on absolute angles.

    Each column is evaluated relative to the angle where it is largest
    (first sample for decaying terms, last for growing ones) so that the
    design matrix stays finite; the reference is folded back into c_k.
    """
    signal = np.asarray(signal, dtype=complex).reshape(-1)
    K = len(poles)
    if signal.shape[0] != grid.n:
        raise InvalidShape(f"signal length {signal.shape[0]} != grid.n {grid.n}")
    if K > grid.n:
        raise InvalidK(f"K={K} exceeds N={grid.n}")
    if K == 0:
        return AmplitudeFit(np.zeros(0, dtype=complex), 1.0, False, False, ())
    theta = grid.angles
    exponents = np.array([complex(-d, 2.0 * math.pi * f) for d, f in poles])
    reference = np.where(exponents.real > 0, grid.theta_last, grid.theta0)
    design = np.exp(np.outer(theta, np.ones(K)) * exponents - exponents * reference)

    coincident = _coincident(poles, grid)
    if coincident:
        logger.warning("Near-coincident poles in amplitude fit; solution may be unstable")
    scaled, condition = _qr_lstsq(design, signal)
    ill = condition > CONDITION_LIMIT
    if ill:
        logger.warning("Amplitude least squares ill-conditioned (condition %.2e)", condition)
        scaled = scipy.linalg.lstsq(design, signal)[0]
    with np.errstate(over="ignore", invalid="ignore"):
        coefficients = scaled * np.exp(-exponents * reference)
    nonfinite = tuple(int(i) for i in np.flatnonzero(~np.isfinite(coefficients)))
    if nonfinite:
        logger.warning("Dropping non-finite amplitudes for components %s", nonfinite)
        coefficients[list(nonfinite)] = 0.0
    return AmplitudeFit(coefficients, condition, ill, coincident, nonfinite)


def component_energy(component: DampedSinusoid, grid: AngularGrid) -> float:
    """a_k times the norm of the damped envelope over the grid."""
    if component.amplitude == 0.0:
        return 0.0
    with np.errstate(over="ignore"):
        envelope = np.exp(-component.damping * grid.angles)
    return float(component.amplitude * np.linalg.norm(envelope))


def energy_ranking(model: ModelEstimate, grid: AngularGrid) -> List[int]:
    """Component indices by descending energy; ties keep estimation order."""
    energies = [component_energy(c, grid) for c in model.components]
    return sorted(range(len(energies)), key=lambda i: (-energies[i], i))


def _singular_value_pairing(model: ModelEstimate, grid: AngularGrid) -> Tuple[int, ...]:
    pairing = [0] * model.order
    for rank, index in enumerate(energy_ranking(model, grid)):
        pairing[index] = rank
    return tuple(pairing)


def _build_components(
    coefficients: np.ndarray, poles: Sequence[Tuple[float, float]]
) -> List[DampedSinusoid]:
    return [DampedSinusoid.from_complex(complex(c), d, f) for c, (d, f) in zip(coefficients, poles)]


def _close(components: List[DampedSinusoid], grid: AngularGrid, condition: float) -> ModelEstimate:
    rel_tol = max(1e-6, min(1e-2, 1e2 * EPS * condition))
    model = close_conjugates(components, grid, rel_tol=rel_tol)
    if not model.conjugate_closed:
        logger.warning("Estimated components are not closed under conjugation")
    return model


def estimate_model(
    profile: IntensityProfile,
    K: int,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
    seed: int = 0,
) -> EstimationReport:
    """Fit K damped sinusoids to the profile; no reconstruction."""
    grid = profile.grid
    if K < 1:
        raise InvalidK(f"model order must be >= 1, got {K}")
    if grid.n < 2 * K + 2:
        raise InvalidK(f"K={K} needs at least {2 * K + 2} samples, profile has {grid.n}")
    if K > K_CAP:
        raise InvalidK(f"model order limited to {K_CAP}, got {K}")

    op = build_hankel(profile.values)
    svd = lanczos_svd(op, K, tol=tol, max_iter=max_iter, seed=seed)
    signal_space = truncate(svd, K)
    E, shift_condition = _shift_matrix(signal_space.V)
    z = eigenvalues(E)
    poles = [poles_to_params(complex(zk), grid.dtheta) for zk in z]
    fit = amplitude_phase_ls(profile.values, grid, poles)
    model = _close(_build_components(fit.coefficients, poles), grid, fit.condition)

    growing = tuple(i for i, c in enumerate(model.components) if c.damping < 0)
    if growing:
        logger.warning("Kept %d growing component(s) (d < 0): %s", len(growing), growing)
    diagnostics = EstimationDiagnostics(
        shift_condition=shift_condition,
        amplitude_condition=fit.condition,
        ill_conditioned=fit.ill_conditioned,
        growing=growing,
        coincident_poles=fit.coincident,
        nonfinite_amplitudes=fit.nonfinite,
        lanczos_iterations=svd.iterations,
    )
    return EstimationReport(
        model=model,
        singular_values=tuple(float(s) for s in svd.S),
        pairing=_singular_value_pairing(model, grid),
        diagnostics=diagnostics,
    )


def _finish(profile: IntensityProfile, report: EstimationReport) -> Tuple[IntensityProfile, EstimationReport]:
    filtered = reconstruct_real(report.model, profile.grid)
    residual_norm = float(np.linalg.norm(profile.values - filtered.values))
    diagnostics = report.diagnostics.model_copy(update={"residual_norm": residual_norm})
    return filtered, report.model_copy(update={"diagnostics": diagnostics})


def hlsvd_filter(
    profile: IntensityProfile,
    K: int,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
    seed: int = 0,
) -> Tuple[IntensityProfile, EstimationReport]:
    """Filter a profile with a K-component model; returns (filtered, report)."""
    report = estimate_model(profile, K, tol=tol, max_iter=max_iter, seed=seed)
    filtered, report = _finish(profile, report)
    logger.debug("Filtered %d samples with K=%d, residual %.4g", profile.grid.n, K, report.diagnostics.residual_norm)
    return filtered, report


def filter_with_cutoff(
    profile: IntensityProfile,
    f_cutoff: float,
    k_max: int,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
    seed: int = 0,
) -> Tuple[IntensityProfile, EstimationReport]:
    """Estimate at k_max, keep components with |f| < f_cutoff, refit their amplitudes."""
    full = estimate_model(profile, k_max, tol=tol, max_iter=max_iter, seed=seed)
    kept = [c for c in full.model.components if abs(c.frequency) < f_cutoff]
    if not kept:
        raise InvalidK(f"no component below the cutoff {f_cutoff} rad^-1")
    poles = [(c.damping, c.frequency) for c in kept]
    fit = amplitude_phase_ls(profile.values, profile.grid, poles)
    model = _close(_build_components(fit.coefficients, poles), profile.grid, fit.condition)
    diagnostics = full.diagnostics.model_copy(
        update={
            "amplitude_condition": fit.condition,
            "ill_conditioned": fit.ill_conditioned,
            "coincident_poles": fit.coincident,
            "nonfinite_amplitudes": fit.nonfinite,
            "growing": tuple(i for i, c in enumerate(model.components) if c.damping < 0),
        }
    )
    report = EstimationReport(
        model=model,
        singular_values=full.singular_values,
        pairing=_singular_value_pairing(model, profile.grid),
        diagnostics=diagnostics,
    )
    return _finish(profile, report)


def residual(profile: IntensityProfile, filtered: IntensityProfile) -> IntensityProfile:
    """Measured minus filtered intensities."""
    return IntensityProfile(grid=profile.grid, values=profile.values - filtered.values)
