"""Dense small-dimension matrix and vector helpers.

All covariances in the filters are symmetric positive (semi)definite and
tiny (n = 3 in the Lorenz experiment), so everything here is plain dense
numpy with explicit shape and finiteness checks.  Linear systems with an
SPD coefficient matrix go through a Cholesky factorization rather than an
explicit inverse.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import DimensionError, SingularMatrixError

# Jitter added to the diagonal on a failed Cholesky retry.  Sample
# covariances from small ensembles are rank-deficient, so a single retry
# with a tiny ridge is part of the contract.
CHOLESKY_JITTER = 1e-12

_SYMMETRY_TOL = 1e-10


def as_vector(v) -> np.ndarray:
    """Coerce to a finite 1-D float array of dimension >= 1."""
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise DimensionError(f"expected a 1-D vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DimensionError("vector contains non-finite components")
    return arr


def as_matrix(a) -> np.ndarray:
    """Coerce to a finite 2-D float array."""
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 2 or arr.size < 1:
        raise DimensionError(f"expected a 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DimensionError("matrix contains non-finite entries")
    return arr


def matmul(a, b) -> np.ndarray:
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def transpose(a) -> np.ndarray:
    return as_matrix(a).T.copy()


def trace(a) -> float:
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"trace requires a square matrix, got {a.shape}")
    return float(np.trace(a))


def symmetrize(a) -> np.ndarray:
    """Return (A + A^T) / 2."""
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"cannot symmetrize non-square {a.shape}")
    return 0.5 * (a + a.T)


def spd_factor(a) -> np.ndarray:
    """Lower Cholesky factor of a symmetric positive definite matrix.

    The input is symmetrized first; on a pivot failure the factorization
    is retried once with a +1e-12 diagonal jitter before giving up.
    """
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got {a.shape}")
    scale = max(1.0, float(np.max(np.abs(a))))
    if np.max(np.abs(a - a.T)) > _SYMMETRY_TOL * scale:
        raise DimensionError("matrix is not symmetric within tolerance")
    sym = 0.5 * (a + a.T)
    try:
        return np.linalg.cholesky(sym)
    except np.linalg.LinAlgError:
        pass
    try:
        return np.linalg.cholesky(sym + CHOLESKY_JITTER * np.eye(a.shape[0]))
    except np.linalg.LinAlgError:
        raise SingularMatrixError(
            "matrix is not positive definite (pivot failure after jitter)"
        ) from None


def solve_spd(a, b) -> np.ndarray:
    """Solve A X = B for symmetric positive definite A without forming A^-1.

    B may be a vector or a matrix; the result has B's shape.
    """
    b_arr = np.asarray(b, dtype=float)
    vector_rhs = b_arr.ndim == 1
    rhs = as_vector(b_arr) if vector_rhs else as_matrix(b_arr)
    lower = spd_factor(a)
    if rhs.shape[0] != lower.shape[0]:
        raise DimensionError(
            f"right-hand side has {rhs.shape[0]} rows, expected {lower.shape[0]}"
        )
    x = scipy.linalg.cho_solve((lower, True), rhs)
    return x


def woodbury_inverse(a_inv, u, c, v) -> np.ndarray:
    """(A + U C V)^-1 from A^-1 via the low-rank update identity.

    Computes A^-1 - A^-1 U (C^-1 + V A^-1 U)^-1 V A^-1.
    """
    a_inv = as_matrix(a_inv)
    u = as_matrix(u)
    c = as_matrix(c)
    v = as_matrix(v)
    n = a_inv.shape[0]
    k = c.shape[0]
    if a_inv.shape != (n, n) or c.shape != (k, k):
        raise DimensionError("A^-1 and C must be square")
    if u.shape != (n, k) or v.shape != (k, n):
        raise DimensionError(
            f"incompatible shapes: U {u.shape}, V {v.shape} for n={n}, k={k}"
        )
    try:
        c_inv = np.linalg.inv(c)
        inner = c_inv + v @ a_inv @ u
        correction = a_inv @ u @ np.linalg.solve(inner, v @ a_inv)
    except np.linalg.LinAlgError:
        raise SingularMatrixError("inner matrix C^-1 + V A^-1 U is singular") from None
    return a_inv - correction


def sample_mean(members) -> np.ndarray:
    """Componentwise arithmetic mean of a non-empty set of equal-dim vectors."""
    stacked = _stack_members(members, minimum=1)
    return stacked.mean(axis=0)


def sample_covariance(members, mean) -> np.ndarray:
    """Unbiased (1/(N-1)) outer-product covariance about the given mean.

    The result is symmetrized exactly so downstream SPD factorizations
    never see floating-point asymmetry.
    """
    stacked = _stack_members(members, minimum=2)
    mean = as_vector(mean)
    if mean.shape[0] != stacked.shape[1]:
        raise DimensionError("mean dimension does not match members")
    dev = stacked - mean
    cov = dev.T @ dev / (stacked.shape[0] - 1)
    return 0.5 * (cov + cov.T)


def _stack_members(members, minimum) -> np.ndarray:
    arr = np.asarray(members, dtype=float)
    if arr.ndim != 2:
        raise DimensionError("members must be a list of equal-dimension vectors")
    if arr.shape[0] < minimum:
        raise DimensionError(f"need at least {minimum} members, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise DimensionError("members contain non-finite components")
    return arr
