"""Linear Kalman Filter: predict, gain, analysis, and the information-form
cross-check used as an independent oracle for the analysis step."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, SingularMatrixError
from .linalg import as_matrix, as_vector, solve_spd, symmetrize


@dataclass(frozen=True)
class GaussianState:
    """Mean and symmetric PSD covariance of a filtering distribution."""

    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        mean = as_vector(self.mean)
        cov = as_matrix(self.covariance)
        n = mean.shape[0]
        if cov.shape != (n, n):
            raise DimensionError(
                f"covariance shape {cov.shape} inconsistent with mean dim {n}"
            )
        scale = max(1.0, float(np.max(np.abs(cov))))
        if np.max(np.abs(cov - cov.T)) > 1e-10 * scale:
            raise DimensionError("covariance is not symmetric within 1e-10")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", 0.5 * (cov + cov.T))

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


@dataclass(frozen=True)
class LinearModel:
    """Linear state transition with additive Gaussian process noise."""

    transition: np.ndarray
    process_noise: np.ndarray

    def __post_init__(self):
        m = as_matrix(self.transition)
        q = as_matrix(self.process_noise)
        if m.shape[0] != m.shape[1]:
            raise DimensionError("transition matrix must be square")
        if q.shape != m.shape:
            raise DimensionError("process noise must match the state dimension")
        object.__setattr__(self, "transition", m)
        object.__setattr__(self, "process_noise", symmetrize(q))


@dataclass(frozen=True)
class ObservationModel:
    """Observation operator and SPD observation-noise covariance."""

    operator: np.ndarray
    noise: np.ndarray

    def __post_init__(self):
        h = as_matrix(self.operator)
        g = as_matrix(self.noise)
        if g.shape != (h.shape[0], h.shape[0]):
            raise DimensionError("noise covariance must be m x m for an m x n operator")
        object.__setattr__(self, "operator", h)
        object.__setattr__(self, "noise", symmetrize(g))

    @property
    def obs_dim(self) -> int:
        return self.operator.shape[0]

    @property
    def state_dim(self) -> int:
        return self.operator.shape[1]


def predict(state: GaussianState, model: LinearModel) -> GaussianState:
    """Forecast step: mean M m, covariance M C M^T + Q (symmetrized)."""
    m = model.transition
    if m.shape[1] != state.dim:
        raise DimensionError("model dimension does not match state")
    mean = m @ state.mean
    cov = symmetrize(m @ state.covariance @ m.T + model.process_noise)
    return GaussianState(mean, cov)


def kalman_gain(predicted_cov, obs: ObservationModel) -> np.ndarray:
    """Gain C H^T (H C H^T + Gamma)^-1 via an SPD solve on the innovation matrix."""
    cov = as_matrix(predicted_cov)
    h = obs.operator
    if cov.shape != (h.shape[1], h.shape[1]):
        raise DimensionError("predicted covariance does not match observation operator")
    innovation_cov = symmetrize(h @ cov @ h.T + obs.noise)
    # Solve S K^T = H C for the transposed system; S is SPD since Gamma > 0.
    return solve_spd(innovation_cov, h @ cov).T


@dataclass(frozen=True)
class KalmanUpdate:
    """Posterior state plus the gain and innovation used to reach it."""

    state: GaussianState
    gain: np.ndarray
    innovation: np.ndarray


def analyze(predicted: GaussianState, y, obs: ObservationModel) -> KalmanUpdate:
    """Analysis step: m + K(y - H m), covariance (I - K H) C symmetrized."""
    y = as_vector(y)
    if y.shape[0] != obs.obs_dim:
        raise DimensionError("observation dimension mismatch")
    gain = kalman_gain(predicted.covariance, obs)
    innovation = y - obs.operator @ predicted.mean
    mean = predicted.mean + gain @ innovation
    identity = np.eye(predicted.dim)
    cov = symmetrize((identity - gain @ obs.operator) @ predicted.covariance)
    return KalmanUpdate(GaussianState(mean, cov), gain, innovation)


def analyze_information_form(
    predicted: GaussianState, y, obs: ObservationModel
) -> GaussianState:
    """Analysis via the precision-space relations; independent oracle for analyze.

    Solves C^-1 = Chat^-1 + H^T Gamma^-1 H and
    C^-1 m = Chat^-1 mhat + H^T Gamma^-1 y directly, so it requires a
    full-rank prior covariance.
    """
    y = as_vector(y)
    h = obs.operator
    identity = np.eye(predicted.dim)
    # The jittered factorization would silently accept a rank-deficient
    # prior; the precision-space form genuinely needs full rank.
    eigvals = np.linalg.eigvalsh(predicted.covariance)
    if eigvals.min() <= 1e-12 * max(1.0, eigvals.max()):
        raise SingularMatrixError(
            "information form requires a full-rank prior covariance"
        )
    prior_precision = solve_spd(predicted.covariance, identity)
    noise_inv_h = solve_spd(obs.noise, h)
    posterior_precision = symmetrize(prior_precision + h.T @ noise_inv_h)
    cov = symmetrize(solve_spd(posterior_precision, identity))
    rhs = prior_precision @ predicted.mean + h.T @ solve_spd(obs.noise, y)
    mean = solve_spd(posterior_precision, rhs)
    return GaussianState(mean, cov)


def joseph_covariance(gain, predicted_cov, obs: ObservationModel) -> np.ndarray:
    """(I - K H) C (I - K H)^T + K Gamma K^T, valid for any gain."""
    gain = as_matrix(gain)
    cov = as_matrix(predicted_cov)
    factor = np.eye(cov.shape[0]) - gain @ obs.operator
    return symmetrize(factor @ cov @ factor.T + gain @ obs.noise @ gain.T)
