"""Lanczos bidiagonalization with partial reorthogonalization.

Golub-Kahan recurrences on the Hankel operator:

    alpha_j u_j     = H v_j - beta_{j-1} u_{j-1}
    beta_j  v_{j+1} = H^H u_j - alpha_j v_j

so that H V_j = U_j B_j with B_j upper bidiagonal. Orthogonality loss of
both bases is tracked with the omega recurrences; when an estimate exceeds
sqrt(eps) the new vector (and the next one) is reorthogonalized against
every stored vector. Convergence of triplet i is judged by the bound
|beta_j * P[j, i]| <= tol * s_1 from the SVD B_j = P S Q^H. Converged
triplets are extracted by a Rayleigh-Ritz step on the orthonormalized right
Krylov basis, which returns bases orthonormal to working precision.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np
import scipy.linalg
from scipy.linalg import LinAlgError

from .. import settings
from ..errors import InvalidK, NoConvergence, TooLarge
from ..models.estimate import PartialSVD
from ..utils.logging import get_logger
from .hankel import HankelOperator

logger = get_logger(__name__)

EPS = np.finfo(float).eps
REORTH_THRESHOLD = math.sqrt(EPS)
REORTH_LEVEL = EPS ** 0.75
OVERSAMPLE = 8
K_CAP = 64
DENSE_LIMIT = 512


def _random_unit(rng: np.random.Generator, n: int, real: bool = False) -> np.ndarray:
    x = rng.standard_normal(n)
    if not real:
        x = x + 1j * rng.standard_normal(n)
    return x / np.linalg.norm(x)


def _project_out(x: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Classical Gram-Schmidt, applied twice."""
    if basis.shape[1] == 0:
        return x
    for _ in range(2):
        x = x - basis @ (basis.conj().T @ x)
    return x


def _fresh_direction(rng: np.random.Generator, basis: np.ndarray, real: bool = False) -> np.ndarray:
    x = _project_out(_random_unit(rng, basis.shape[0], real), basis)
    return x / np.linalg.norm(x)


def _bidiagonal(alpha: np.ndarray, beta: np.ndarray) -> np.ndarray:
    size = alpha.shape[0]
    B = np.diag(alpha)
    if size > 1:
        B[np.arange(size - 1), np.arange(1, size)] = beta[: size - 1]
    return B


def _svd(A: np.ndarray, steps: int):
    """Thin SVD by gesdd, retried with gesvd; a second failure is NoConvergence."""
    try:
        return scipy.linalg.svd(A, full_matrices=False)
    except (LinAlgError, ValueError) as exc:
        logger.debug("gesdd failed on a %dx%d block (%s); retrying with gesvd", *A.shape, exc)
    try:
        return scipy.linalg.svd(A, full_matrices=False, lapack_driver="gesvd")
    except (LinAlgError, ValueError) as exc:
        raise NoConvergence(
            f"SVD of the {A.shape[0]}x{A.shape[1]} projected block failed: {exc}", iterations=steps
        ) from exc


def _extract(op: HankelOperator, basis: np.ndarray, k: int, iterations: int) -> PartialSVD:
    """Rayleigh-Ritz on span(basis): SVD of H Q for an orthonormal Q."""
    Q, _ = scipy.linalg.qr(basis, mode="economic")
    HQ = np.column_stack([op.matvec(Q[:, i]) for i in range(Q.shape[1])])
    U, s, Zh = _svd(HQ, iterations)
    V = Q @ Zh.conj().T
    U, s, V = U[:, :k], s[:k], V[:, :k]
    residuals = np.array([np.linalg.norm(op.rmatvec(U[:, i]) - s[i] * V[:, i]) for i in range(k)])
    return PartialSVD(U=U, S=s, V=V, iterations=iterations, residuals=residuals)


def lanczos_svd(
    op: HankelOperator,
    k: int,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
    seed: int = 0,
) -> PartialSVD:
    """Leading ``k`` singular triplets of ``op``.

    ``max_iter`` bounds the number of bidiagonalization steps; by default the
    iteration may grow up to the full Krylov dimension min(L, M), where the
    factorization is exact. Raises NoConvergence (carrying the partial
    result) when the bound is hit first.
    """
    L, M = op.shape
    rank_cap = min(L, M)
    if not 1 <= k <= rank_cap:
        raise InvalidK(f"requested k={k} outside [1, {rank_cap}]")
    tol = settings.DEFAULT_LANCZOS_TOL if tol is None else tol
    max_iter = max_iter if max_iter else settings.DEFAULT_LANCZOS_MAX_ITER
    limit = rank_cap if not max_iter else min(int(max_iter), rank_cap)

    rng = np.random.default_rng(seed)
    # a real signal keeps real Krylov bases, so its conjugate pole pairs come out exact
    real_data = op.is_real
    dtype = float if real_data else complex
    U = np.zeros((L, rank_cap), dtype=dtype)
    V = np.zeros((M, rank_cap + 1), dtype=dtype)
    alpha = np.zeros(rank_cap)
    beta = np.zeros(rank_cap)
    V[:, 0] = _random_unit(rng, M, real_data)

    # mu[i] ~ v_j . v_i, nu[i] ~ u_j . u_i for the current j
    mu = np.zeros(rank_cap + 1)
    mu[0] = 1.0
    nu = np.zeros(rank_cap)
    anorm = 0.0
    roundoff = 0.5 * EPS * math.sqrt(max(L, M))
    force_u = force_v = False
    reorth_count = 0
    converged = False
    steps = 0

    for j in range(limit):
        # left vector u_j
        w = op.matvec(V[:, j])
        if j > 0:
            w = w - beta[j - 1] * U[:, j - 1]
        a = float(np.linalg.norm(w))
        anorm = max(anorm, a)
        if j > 0:
            idx = np.arange(j)
            nu_prev = nu[:j].copy()
            est = alpha[idx] * mu[idx] + beta[idx] * mu[idx + 1] - beta[j - 1] * nu_prev
            est = est + np.sign(est) * roundoff * anorm
            nu[:j] = est / a if a > 0 else np.inf
            if force_u or np.max(np.abs(nu[:j])) > REORTH_THRESHOLD:
                w = _project_out(w, U[:, :j])
                a = float(np.linalg.norm(w))
                nu[:j] = REORTH_LEVEL
                force_u = not force_u
                reorth_count += 1
        if a <= REORTH_LEVEL * anorm or a == 0.0:
            alpha[j] = 0.0
            U[:, j] = _fresh_direction(rng, U[:, :j], real_data)
            nu[:j] = EPS
        else:
            alpha[j] = a
            U[:, j] = w / a
        nu[j] = 1.0

        # right vector v_{j+1}
        p = op.rmatvec(U[:, j]) - alpha[j] * V[:, j]
        b = float(np.linalg.norm(p))
        anorm = max(anorm, math.hypot(alpha[j], b))
        idx = np.arange(j + 1)
        nu_ext = np.concatenate(([0.0], nu[: j + 1]))
        beta_prev = np.concatenate(([0.0], beta[:j]))
        est = alpha[idx] * nu[idx] + beta_prev * nu_ext[idx] - alpha[j] * mu[idx]
        est = est + np.sign(est) * roundoff * anorm
        mu_next = est / b if b > 0 else np.full(j + 1, np.inf)
        if force_v or np.max(np.abs(mu_next)) > REORTH_THRESHOLD:
            p = _project_out(p, V[:, : j + 1])
            b = float(np.linalg.norm(p))
            mu_next[:] = REORTH_LEVEL
            force_v = not force_v
            reorth_count += 1
        mu[: j + 1] = mu_next
        mu[j + 1] = 1.0
        steps = j + 1
        if b <= REORTH_LEVEL * anorm or b == 0.0:
            beta[j] = 0.0
            if steps < rank_cap:
                V[:, j + 1] = _fresh_direction(rng, V[:, : j + 1], real_data)
                mu[: j + 1] = EPS
        else:
            beta[j] = b
            V[:, j + 1] = p / b

        if steps == rank_cap:
            converged = True
            break
        if steps >= min(k + OVERSAMPLE, rank_cap):
            P, s, _ = _svd(_bidiagonal(alpha[:steps], beta[:steps]), steps)
            bounds = np.abs(beta[j] * P[j, :k])
            if np.all(bounds <= tol * s[0]):
                converged = True
                break

    logger.debug(
        "Lanczos: %d steps for k=%d on %dx%d (%d reorthogonalizations)", steps, k, L, M, reorth_count
    )
    result = _extract(op, V[:, :steps], min(k, steps), steps)
    if not converged:
        raise NoConvergence(
            f"Lanczos bidiagonalization did not converge in {limit} steps", partial=result, iterations=steps
        )
    return result


def dense_svd_oracle(A: np.ndarray) -> PartialSVD:
    """Full SVD by LAPACK; the reference for the Lanczos path."""
    A = np.asarray(A)
    if A.ndim != 2:
        raise TooLarge("dense oracle expects a matrix")
    if min(A.shape) > DENSE_LIMIT:
        raise TooLarge(f"dense oracle limited to min dimension {DENSE_LIMIT}, got {min(A.shape)}")
    U, s, Vh = scipy.linalg.svd(A, full_matrices=False)
    return PartialSVD(U=U, S=s, V=Vh.conj().T)
