"""Deterministic, seedable Gaussian sampling.

Streams are built on numpy's counter-based Philox generator keyed by a
64-bit seed, so identical seeds reproduce identical sequences across runs.
Substreams are derived by integer hashing of (seed, label), which lets
ensemble members and sweep cells draw independent noise without any
sequential coupling.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, SingularMatrixError
from .linalg import as_matrix, as_vector

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64(x: int) -> int:
    """One round of the splitmix64 mixer (Steele et al.)."""
    x = (x + _GOLDEN) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


class RngStream:
    """Single-owner Gaussian noise stream with a 64-bit seed.

    Two streams built from the same seed produce identical draw sequences;
    use :func:`derive_stream` to obtain independent substreams for
    concurrent work.
    """

    __slots__ = ("seed", "_gen")

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK64
        self._gen = np.random.Generator(np.random.Philox(key=self.seed))

    def __repr__(self):
        return f"RngStream(seed={self.seed})"


def derive_stream(base: RngStream, label: int) -> RngStream:
    """Deterministic, statistically independent substream for (seed, label).

    Derivation uses only the base seed, never the consumption state, so
    the same (seed, label) pair always yields the same stream.
    """
    mixed = _splitmix64(base.seed ^ _splitmix64(int(label) & _MASK64))
    return RngStream(mixed)


def standard_normal(rng: RngStream, n: int) -> np.ndarray:
    """n independent N(0, 1) draws, consuming the stream."""
    if n < 1:
        raise DimensionError(f"need at least one draw, got n={n}")
    return rng._gen.standard_normal(int(n))


@dataclass(frozen=True)
class GaussianSpec:
    """Mean vector and symmetric PSD covariance of a Gaussian."""

    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        mean = as_vector(self.mean)
        cov = as_matrix(self.covariance)
        n = mean.shape[0]
        if cov.shape != (n, n):
            raise DimensionError(
                f"covariance shape {cov.shape} does not match mean dim {n}"
            )
        scale = max(1.0, float(np.max(np.abs(cov))))
        if np.max(np.abs(cov - cov.T)) > 1e-10 * scale:
            raise DimensionError("covariance is not symmetric")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", 0.5 * (cov + cov.T))

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


def psd_sqrt(cov) -> np.ndarray:
    """Symmetric square-root factor L with L L^T = cov for PSD cov.

    Uses an eigendecomposition with small negative eigenvalues clipped to
    zero, so draws from a rank-deficient covariance stay exactly in its
    column space.
    """
    cov = as_matrix(cov)
    sym = 0.5 * (cov + cov.T)
    eigvals, eigvecs = np.linalg.eigh(sym)
    scale = max(1.0, float(np.max(np.abs(eigvals))))
    if eigvals.min() < -1e-10 * scale:
        raise SingularMatrixError(
            f"covariance has negative eigenvalue {eigvals.min():.3e}"
        )
    return eigvecs * np.sqrt(np.clip(eigvals, 0.0, None))


def sample_gaussian(rng: RngStream, spec: GaussianSpec) -> np.ndarray:
    """One draw mean + L z with L a PSD square root and z standard normal."""
    factor = psd_sqrt(spec.covariance)
    z = standard_normal(rng, spec.dim)
    return spec.mean + factor @ z
