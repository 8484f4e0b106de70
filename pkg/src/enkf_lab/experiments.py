"""Lorenz 63 twin experiments: truth generation, synthetic observations,
filter execution, per-step error metrics, and the ensemble-size sweep.

Observations are synthesized once per seed and shared by every ensemble
size in a sweep, so size comparisons see identical data.  All randomness
flows through substreams derived from the run seed, which makes every
metric series bit-reproducible for a given (config, N, seed).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import Lorenz63Params, integrate_rk4, lorenz_drift_fn, lorenz_transition
from .enkf import Ensemble, enkf_analyze, enkf_predict, init_ensemble
from .errors import DimensionError, DivergenceError
from .kf_linear import ObservationModel
from .linalg import as_vector, trace
from .randomness import GaussianSpec, RngStream, derive_stream, sample_gaussian

# Substream labels: observation noise is independent of the ensemble size,
# filter noise is keyed by N so each sweep cell owns a disjoint stream.
_LABEL_OBS = 1
_LABEL_FILTER = 2
_LABEL_INIT = 0


@dataclass(frozen=True)
class TwinExperimentConfig:
    """Defaults reproduce the reference Lorenz 63 assimilation setup."""

    truth_init: tuple = (-10.0, -10.0, 20.0)
    guess_init: tuple = (-11.0, -12.0, 10.0)
    dt: float = 0.1
    steps: int = 100
    obs_noise_var: float = 0.01
    init_spread: float = 0.1
    ensemble_sizes: tuple = (20, 50, 100)
    seeds: tuple = tuple(range(20))
    q_jitter: float = 0.001
    process_noise_var: float = 0.0
    substeps: int = 10
    trajectory_time: float = 10.0
    lorenz: Lorenz63Params = field(default_factory=Lorenz63Params)

    def __post_init__(self):
        if self.steps < 1:
            raise DimensionError(f"steps must be >= 1, got {self.steps}")
        if self.dt <= 0:
            raise DimensionError(f"dt must be positive, got {self.dt}")
        if self.obs_noise_var <= 0:
            raise DimensionError("obs_noise_var must be positive")
        if any(n < 2 for n in self.ensemble_sizes):
            raise DimensionError("every ensemble size must be >= 2")
        if not self.ensemble_sizes:
            raise DimensionError("need at least one ensemble size")
        if not self.seeds:
            raise DimensionError("need at least one seed")
        as_vector(self.truth_init)
        as_vector(self.guess_init)

    def observation_model(self) -> ObservationModel:
        n = len(self.truth_init)
        return ObservationModel(np.eye(n), self.obs_noise_var * np.eye(n))

    def transition(self):
        return lorenz_transition(self.lorenz, self.dt, self.substeps)


@dataclass(frozen=True)
class MetricSeries:
    """Per-step truth, filter means, errors, and covariance diagnostics.

    Arrays are indexed by assimilation step 1..steps (length steps).
    """

    truth: np.ndarray  # (steps, n)
    pred_mean: np.ndarray  # (steps, n)
    anal_mean: np.ndarray  # (steps, n)
    abs_pred_err: np.ndarray  # (steps, n)
    abs_anal_err: np.ndarray  # (steps, n)
    anal_cov_diag: np.ndarray  # (steps, n)
    pred_cov_trace: np.ndarray  # (steps,)
    anal_cov_trace: np.ndarray  # (steps,)
    running_mean_err: np.ndarray  # (steps,) prefix mean of ||truth - anal_mean||_2

    @property
    def steps(self) -> int:
        return self.truth.shape[0]

    @property
    def final_running_mean_err(self) -> float:
        return float(self.running_mean_err[-1])


def generate_truth(config: TwinExperimentConfig) -> np.ndarray:
    """steps+1 true states starting from truth_init, one RK4 interval apart."""
    drift = lorenz_drift_fn(config.lorenz)
    states = np.empty((config.steps + 1, 3))
    states[0] = as_vector(config.truth_init)
    for j in range(config.steps):
        states[j + 1] = integrate_rk4(drift, states[j], config.dt, config.substeps)
    return states


def synthesize_observations(
    truth: np.ndarray, config: TwinExperimentConfig, rng: RngStream
) -> np.ndarray:
    """One noisy observation y_j = truth_j + eta_j per assimilation step."""
    n = truth.shape[1]
    spec = GaussianSpec(np.zeros(n), config.obs_noise_var * np.eye(n))
    obs = np.empty((truth.shape[0] - 1, n))
    for j in range(obs.shape[0]):
        obs[j] = truth[j + 1] + sample_gaussian(derive_stream(rng, j), spec)
    return obs


def run_twin(config: TwinExperimentConfig, n_members: int, seed: int) -> MetricSeries:
    """One full twin experiment for a single (ensemble size, seed) pair."""
    truth = generate_truth(config)
    obs_rng = derive_stream(RngStream(seed), _LABEL_OBS)
    observations = synthesize_observations(truth, config, obs_rng)
    return _run_filter(config, n_members, seed, truth, observations)


def _run_filter(
    config: TwinExperimentConfig,
    n_members: int,
    seed: int,
    truth: np.ndarray,
    observations: np.ndarray,
) -> MetricSeries:
    n = truth.shape[1]
    obs_model = config.observation_model()
    transition = config.transition()
    process_noise = config.process_noise_var * np.eye(n)

    filter_rng = derive_stream(derive_stream(RngStream(seed), _LABEL_FILTER), n_members)
    ensemble = init_ensemble(
        config.guess_init,
        config.init_spread,
        n_members,
        derive_stream(filter_rng, _LABEL_INIT),
    )

    steps = config.steps
    series = {
        name: np.empty((steps, n))
        for name in ("truth", "pred_mean", "anal_mean", "abs_pred_err",
                     "abs_anal_err", "anal_cov_diag")
    }
    pred_trace = np.empty(steps)
    anal_trace = np.empty(steps)
    running = np.empty(steps)
    err_sum = 0.0

    for j in range(1, steps + 1):
        step_rng = derive_stream(filter_rng, j)
        try:
            ensemble, pred_stats = enkf_predict(
                ensemble, transition, process_noise, derive_stream(step_rng, 0)
            )
            update = enkf_analyze(
                ensemble,
                observations[j - 1],
                obs_model,
                rng=derive_stream(step_rng, 1),
                ridge=config.q_jitter,
            )
        except DivergenceError as exc:
            exc.step = j
            raise
        ensemble = update.ensemble

        true_state = truth[j]
        series["truth"][j - 1] = true_state
        series["pred_mean"][j - 1] = pred_stats.mean
        series["anal_mean"][j - 1] = update.stats.mean
        series["abs_pred_err"][j - 1] = np.abs(pred_stats.mean - true_state)
        series["abs_anal_err"][j - 1] = np.abs(update.stats.mean - true_state)
        series["anal_cov_diag"][j - 1] = np.diag(update.stats.covariance)
        # The reported prediction covariance is the regularized one the
        # gain actually uses (sample covariance + q * I).
        pred_trace[j - 1] = trace(pred_stats.covariance) + n * config.q_jitter
        anal_trace[j - 1] = trace(update.stats.covariance)
        err_sum += float(np.linalg.norm(true_state - update.stats.mean))
        running[j - 1] = err_sum / j

    return MetricSeries(
        truth=series["truth"],
        pred_mean=series["pred_mean"],
        anal_mean=series["anal_mean"],
        abs_pred_err=series["abs_pred_err"],
        abs_anal_err=series["abs_anal_err"],
        anal_cov_diag=series["anal_cov_diag"],
        pred_cov_trace=pred_trace,
        anal_cov_trace=anal_trace,
        running_mean_err=running,
    )


@dataclass(frozen=True)
class SweepCell:
    """Outcome of one (ensemble size, seed) run; `series` is None on failure."""

    n_members: int
    seed: int
    series: MetricSeries | None
    error: str | None = None

    @property
    def final_err(self) -> float | None:
        return None if self.series is None else self.series.final_running_mean_err


@dataclass(frozen=True)
class SweepResult:
    """All sweep cells plus per-size medians of the final running mean error."""

    cells: tuple
    median_final_err: dict  # N -> median over seeds
    median_curves: dict  # N -> (steps,) per-step median running mean error

    def cell(self, n_members: int, seed: int) -> SweepCell:
        for c in self.cells:
            if c.n_members == n_members and c.seed == seed:
                return c
        raise KeyError((n_members, seed))


def sweep_ensemble_sizes(config: TwinExperimentConfig) -> SweepResult:
    """run_twin over every (N, seed) pair, sharing observations per seed.

    A diverged cell is recorded with its error message and the sweep
    continues; medians skip failed cells.
    """
    truth = generate_truth(config)
    cells = []
    for seed in config.seeds:
        obs_rng = derive_stream(RngStream(seed), _LABEL_OBS)
        observations = synthesize_observations(truth, config, obs_rng)
        for n_members in config.ensemble_sizes:
            try:
                series = _run_filter(config, n_members, seed, truth, observations)
                cells.append(SweepCell(n_members, seed, series))
            except DivergenceError as exc:
                cells.append(SweepCell(n_members, seed, None, error=str(exc)))

    median_final = {}
    median_curves = {}
    for n_members in config.ensemble_sizes:
        finals = [c.final_err for c in cells
                  if c.n_members == n_members and c.series is not None]
        curves = [c.series.running_mean_err for c in cells
                  if c.n_members == n_members and c.series is not None]
        if finals:
            median_final[n_members] = float(np.median(finals))
            median_curves[n_members] = np.median(np.stack(curves), axis=0)
    return SweepResult(
        cells=tuple(cells),
        median_final_err=median_final,
        median_curves=median_curves,
    )
