"""Dense Hermitian kernels: power iteration, HPD solves, trace of inverse.

Problem sizes stay small ((M+1)K below ~100 at paper scale), so everything is
dense; explicit inverses are reserved for test oracles.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
import scipy.linalg

from .errors import SingularGram

CONDITION_LIMIT = 1e12
_HERMITIAN_TOL = 1e-10


class PowerIterationResult(NamedTuple):
    value: float
    converged: bool
    iterations: int


def require_hermitian(a: np.ndarray, tol: float = _HERMITIAN_TOL) -> np.ndarray:
    """Validate Hermitian symmetry (relative Frobenius deviation < tol)."""
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    scale = np.linalg.norm(a)
    if scale > 0 and np.linalg.norm(a - a.conj().T) >= tol * scale:
        raise ValueError("matrix is not Hermitian within tolerance")
    return a


def largest_eigenvalue(
    a: np.ndarray,
    tol: float = 1e-8,
    max_iter: int = 1000,
) -> PowerIterationResult:
    """Dominant eigenvalue of a Hermitian PSD matrix by power iteration.

    Stops when the relative Rayleigh-quotient change drops below tol.  The
    start vector is deterministic (all-ones plus a small index-dependent
    perturbation) so repeated runs agree bit-for-bit.  When the iteration
    budget runs out the best estimate is returned with converged=False; since
    Rayleigh quotients are lower bounds, callers needing a guaranteed upper
    bound inflate the value by a safety margin.
    """
    a = require_hermitian(a)
    n = a.shape[0]
    v = (np.ones(n) + np.arange(n) * (1e-3 / max(n, 1))).astype(complex)
    v /= np.linalg.norm(v)
    lam = float(np.real(v.conj() @ (a @ v)))
    for it in range(1, max_iter + 1):
        w = a @ v
        norm_w = np.linalg.norm(w)
        if norm_w == 0.0:
            return PowerIterationResult(0.0, True, it)
        v = w / norm_w
        lam_new = float(np.real(v.conj() @ (a @ v)))
        if abs(lam_new - lam) <= tol * max(abs(lam_new), np.finfo(float).tiny):
            return PowerIterationResult(lam_new, True, it)
        lam = lam_new
    return PowerIterationResult(lam, False, max_iter)


def _cholesky(a: np.ndarray) -> np.ndarray:
    try:
        return scipy.linalg.cholesky(a, lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise SingularGram("matrix is not positive definite") from exc


def trace_of_inverse(a: np.ndarray) -> float:
    """Tr[A^{-1}] for Hermitian PD A via Cholesky (Tr = ||L^{-1}||_F^2).

    Raises SingularGram when A is not PD or its condition number exceeds
    CONDITION_LIMIT.
    """
    a = require_hermitian(a)
    cond = np.linalg.cond(a)
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise SingularGram(f"condition number {cond:.3e} exceeds {CONDITION_LIMIT:.0e}")
    low = _cholesky(a)
    inv_low = scipy.linalg.solve_triangular(low, np.eye(a.shape[0]), lower=True)
    return float(np.sum(np.abs(inv_low) ** 2))


def solve_hpd(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve A X = B for Hermitian PD A via Cholesky."""
    a = require_hermitian(a)
    low = _cholesky(a)
    y = scipy.linalg.solve_triangular(low, b, lower=True)
    return scipy.linalg.solve_triangular(low.conj().T, y, lower=False)
