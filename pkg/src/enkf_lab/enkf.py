"""Ensemble Kalman Filter with perturbed observations.

Members are propagated through the (possibly nonlinear) transition
independently, sample statistics stand in for the exact moments, and the
analysis updates every member against a per-member perturbed copy of the
observation.  Per-member noise comes from substreams derived by member
position, so results do not depend on evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DivergenceError
from .kf_linear import ObservationModel, kalman_gain
from .linalg import as_matrix, as_vector, sample_covariance, sample_mean, symmetrize
from .randomness import RngStream, derive_stream, psd_sqrt, standard_normal


@dataclass(frozen=True)
class Ensemble:
    """N >= 2 state vectors stored as rows of an (N, n) array."""

    members: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.members, dtype=float)
        if arr.ndim != 2 or arr.shape[0] < 2:
            raise DimensionError(
                f"ensemble needs an (N>=2, n) member array, got shape {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise DimensionError("ensemble members contain non-finite components")
        object.__setattr__(self, "members", arr)

    @property
    def size(self) -> int:
        return self.members.shape[0]

    @property
    def dim(self) -> int:
        return self.members.shape[1]


@dataclass(frozen=True)
class EnsembleStats:
    """Sample mean and unbiased sample covariance of an ensemble."""

    mean: np.ndarray
    covariance: np.ndarray


def ensemble_stats(ensemble: Ensemble) -> EnsembleStats:
    mean = sample_mean(ensemble.members)
    cov = sample_covariance(ensemble.members, mean)
    return EnsembleStats(mean=mean, covariance=cov)


def init_ensemble(center, spread: float, n_members: int, rng: RngStream) -> Ensemble:
    """Members center + spread * z with z i.i.d. standard normal per member."""
    center = as_vector(center)
    if n_members < 2:
        raise DimensionError(f"need at least 2 members, got {n_members}")
    if spread < 0:
        raise DimensionError(f"spread must be nonnegative, got {spread}")
    members = np.empty((n_members, center.shape[0]))
    for k in range(n_members):
        z = standard_normal(derive_stream(rng, k), center.shape[0])
        members[k] = center + spread * z
    return Ensemble(members)


def enkf_predict(
    ensemble: Ensemble, transition, process_noise, rng: RngStream | None = None
) -> tuple[Ensemble, EnsembleStats]:
    """Propagate every member through the transition and add process noise.

    `transition` must be pure and accept (..., n) arrays (members propagate
    as one block).  With a zero process-noise covariance no draws are
    consumed and `rng` may be None.
    """
    propagated = np.asarray(transition(ensemble.members), dtype=float)
    if propagated.shape != ensemble.members.shape:
        raise DimensionError("transition changed the ensemble shape")
    bad = ~np.all(np.isfinite(propagated), axis=1)
    if np.any(bad):
        member = int(np.argmax(bad))
        raise DivergenceError(
            f"member {member} became non-finite during propagation", member=member
        )
    sigma = as_matrix(process_noise)
    if np.any(sigma != 0.0):
        if rng is None:
            raise DimensionError("process noise requires an rng stream")
        factor = psd_sqrt(sigma)
        for k in range(ensemble.size):
            z = standard_normal(derive_stream(rng, k), ensemble.dim)
            propagated[k] = propagated[k] + factor @ z
    predicted = Ensemble(propagated)
    return predicted, ensemble_stats(predicted)


def enkf_gain(stats: EnsembleStats, obs: ObservationModel, ridge: float = 0.0):
    """Kalman gain from the sample covariance; same algebra as the linear filter.

    `ridge` adds q*I to the sample covariance first, the standard
    regularization for small ensembles whose covariance is rank-deficient.
    """
    cov = as_matrix(stats.covariance)
    if ridge:
        cov = cov + ridge * np.eye(cov.shape[0])
    return kalman_gain(cov, obs)


@dataclass(frozen=True)
class EnkfUpdate:
    """Analyzed ensemble plus diagnostics of the update that produced it."""

    ensemble: Ensemble
    stats: EnsembleStats
    gain: np.ndarray
    mean_update: np.ndarray  # mhat + K (y - H mhat), the linear-filter diagnostic
    perturbations: np.ndarray  # realized per-member observation noise (N, m)


def enkf_analyze(
    predicted: Ensemble,
    y,
    obs: ObservationModel,
    rng: RngStream | None = None,
    ridge: float = 0.0,
    perturbations=None,
) -> EnkfUpdate:
    """Perturbed-observation analysis v = vhat + K(y + eta - H vhat) per member.

    Each member's eta is drawn from N(0, Gamma) on its own derived
    substream.  Passing `rng=None` (and no explicit perturbations) forces
    eta = 0, which is the deterministic oracle configuration; an explicit
    (N, m) perturbation array overrides drawing entirely.
    """
    y = as_vector(y)
    if y.shape[0] != obs.obs_dim:
        raise DimensionError("observation dimension mismatch")
    stats = ensemble_stats(predicted)
    gain = enkf_gain(stats, obs, ridge=ridge)
    if perturbations is not None:
        eta = np.asarray(perturbations, dtype=float)
        if eta.shape != (predicted.size, obs.obs_dim):
            raise DimensionError(
                f"perturbations must have shape {(predicted.size, obs.obs_dim)}"
            )
    elif rng is None:
        eta = np.zeros((predicted.size, obs.obs_dim))
    else:
        factor = psd_sqrt(obs.noise)
        eta = np.empty((predicted.size, obs.obs_dim))
        for k in range(predicted.size):
            z = standard_normal(derive_stream(rng, k), obs.obs_dim)
            eta[k] = factor @ z
    residual = y + eta - predicted.members @ obs.operator.T
    analyzed = Ensemble(predicted.members + residual @ gain.T)
    mean_update = stats.mean + gain @ (y - obs.operator @ stats.mean)
    return EnkfUpdate(
        ensemble=analyzed,
        stats=ensemble_stats(analyzed),
        gain=gain,
        mean_update=mean_update,
        perturbations=eta,
    )


def deterministic_analysis_covariance(
    stats: EnsembleStats, gain, obs: ObservationModel
) -> np.ndarray:
    """(I - K H) Chat (I - K H)^T, the zero-perturbation analysis covariance."""
    gain = as_matrix(gain)
    cov = as_matrix(stats.covariance)
    factor = np.eye(cov.shape[0]) - gain @ obs.operator
    return symmetrize(factor @ cov @ factor.T)


def inflate(ensemble: Ensemble, factor: float = 1.0) -> Ensemble:
    """Multiplicative covariance inflation hook: scale deviations about the mean.

    The twin experiment runs with factor 1.0 (a no-op); the hook exists so
    configurations stay forward-compatible.
    """
    if factor == 1.0:
        return ensemble
    mean = sample_mean(ensemble.members)
    return Ensemble(mean + factor * (ensemble.members - mean))
