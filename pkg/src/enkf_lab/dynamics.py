"""Lorenz 63 dynamics, a fixed-step RK4 integrator, and scalar iterated maps.

The integrator is deliberately fixed-step (classical RK4 with uniform
substeps) instead of adaptive: output must be bit-reproducible for
golden-file tests, and at the default effective step of 0.01 the local
truncation error sits far below the assimilation noise floor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DivergenceError


@dataclass(frozen=True)
class Lorenz63Params:
    """Classical chaotic-regime defaults: sigma=10, r=28, b=8/3."""

    sigma: float = 10.0
    r: float = 28.0
    b: float = 8.0 / 3.0

    def __post_init__(self):
        for name in ("sigma", "r", "b"):
            if not np.isfinite(getattr(self, name)):
                raise DimensionError(f"parameter {name} must be finite")


@dataclass(frozen=True)
class Drift:
    """A pure time-derivative rule state -> dstate/dt of dimension `dim`.

    The callable must accept arrays of shape (..., dim) and apply
    elementwise over leading axes, which lets a whole ensemble propagate
    in one call.
    """

    dim: int
    func: object

    def __call__(self, state):
        return self.func(state)


def lorenz_drift(state, params: Lorenz63Params = Lorenz63Params()) -> np.ndarray:
    """Time derivative (sigma(y-x), rx - xz - y, xy - bz).

    Vectorized over leading axes: `state` has shape (..., 3).
    """
    state = np.asarray(state, dtype=float)
    if state.shape[-1] != 3:
        raise DimensionError(f"state must have trailing dimension 3, got {state.shape}")
    x = state[..., 0]
    y = state[..., 1]
    z = state[..., 2]
    return np.stack(
        [
            params.sigma * (y - x),
            params.r * x - x * z - y,
            x * y - params.b * z,
        ],
        axis=-1,
    )


def lorenz_drift_fn(params: Lorenz63Params = Lorenz63Params()) -> Drift:
    return Drift(dim=3, func=lambda s: lorenz_drift(s, params))


def integrate_rk4(drift, state, dt: float, substeps: int = 1) -> np.ndarray:
    """Classical 4th-order Runge-Kutta over `substeps` uniform steps of dt/substeps.

    Raises DivergenceError carrying the substep index if any intermediate
    state goes non-finite.
    """
    if dt <= 0:
        raise DimensionError(f"dt must be positive, got {dt}")
    if substeps < 1:
        raise DimensionError(f"substeps must be >= 1, got {substeps}")
    h = dt / substeps
    w = np.asarray(state, dtype=float)
    for i in range(substeps):
        k1 = drift(w)
        k2 = drift(w + 0.5 * h * k1)
        k3 = drift(w + 0.5 * h * k2)
        k4 = drift(w + h * k3)
        w = w + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(w)):
            raise DivergenceError(
                f"state became non-finite at substep {i}", step=i
            )
    return w


def lorenz_transition(
    params: Lorenz63Params = Lorenz63Params(), dt: float = 0.1, substeps: int = 10
):
    """Discrete transition map: one assimilation interval of Lorenz 63 flow."""
    drift = lorenz_drift_fn(params)

    def transition(state):
        return integrate_rk4(drift, state, dt, substeps)

    return transition


@dataclass(frozen=True)
class AffineMapParams:
    """Scalar affine map v -> lambda*v + a."""

    lam: float
    a: float


def iterate_affine(params: AffineMapParams, v0: float, j: int) -> float:
    """Closed-form j-th iterate of v -> lambda*v + a from v0.

    lambda^j * v0 + a (1 - lambda^j) / (1 - lambda), with the lambda = 1
    case degenerating to v0 + j*a.
    """
    lam, a = params.lam, params.a
    if lam == 1.0:
        return v0 + j * a
    pow_lam = lam**j
    return pow_lam * v0 + a * (1.0 - pow_lam) / (1.0 - lam)
