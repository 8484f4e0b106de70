"""Acceptance suite: one test per shipping criterion.

Each test prints a single PASS/FAIL line through pytest's terminal
reporter (past output capture) so the criteria can be audited from the
run log.
"""

import time

import numpy as np
import pytest

from enkf_lab.cli import main
from enkf_lab.dynamics import integrate_rk4, lorenz_drift_fn
from enkf_lab.enkf import Ensemble, deterministic_analysis_covariance, enkf_analyze
from enkf_lab.experiments import TwinExperimentConfig, sweep_ensemble_sizes
from enkf_lab.kf_linear import (
    GaussianState,
    LinearModel,
    ObservationModel,
    analyze,
    analyze_information_form,
    joseph_covariance,
    kalman_gain,
    predict,
)
from enkf_lab.linalg import woodbury_inverse
from enkf_lab.randomness import RngStream, derive_stream, psd_sqrt, standard_normal


_REPORTER = None


@pytest.fixture(autouse=True)
def _capture_reporter(request):
    global _REPORTER
    _REPORTER = request.config.pluginmanager.get_plugin("terminalreporter")


def _report(number, passed, detail):
    status = "PASS" if passed else "FAIL"
    line = f"ACCEPTANCE {number:2d}: {status} - {detail}"
    if _REPORTER is not None:
        _REPORTER.write_line("\n" + line)
    else:
        print(line)
    assert passed, f"criterion {number}: {detail}"


def _random_spd(rng, n, scale=1.0):
    a = rng.standard_normal((n, n))
    return scale * (a @ a.T + n * np.eye(n))


@pytest.fixture(scope="module")
def timed_sweep():
    start = time.perf_counter()
    result = sweep_ensemble_sizes(TwinExperimentConfig())
    return result, time.perf_counter() - start


def test_criterion_01_woodbury_identity():
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(2, 9))
        k = int(rng.integers(1, 4))
        a = _random_spd(rng, n)
        u = rng.standard_normal((n, k))
        c = _random_spd(rng, k)
        v = rng.standard_normal((k, n))
        inv = woodbury_inverse(np.linalg.inv(a), u, c, v)
        worst = max(worst, np.linalg.norm(inv @ (a + u @ c @ v) - np.eye(n)))
    elapsed = time.perf_counter() - start
    _report(
        1,
        worst < 1e-9 and elapsed < 1.0,
        f"200 Woodbury instances, worst identity deviation {worst:.2e} "
        f"(< 1e-9), {elapsed:.2f}s (< 1s)",
    )


def test_criterion_02_scalar_fusion():
    update = analyze(
        GaussianState([1.0], [[1.0]]), [2.0], ObservationModel([[1.0]], [[1.0]])
    )
    err = max(
        abs(update.gain[0, 0] - 0.5),
        abs(update.state.mean[0] - 1.5),
        abs(update.state.covariance[0, 0] - 0.5),
    )
    _report(
        2,
        err <= 1e-12,
        f"scalar fusion K=0.5 m=1.5 C=0.5, worst deviation {err:.2e} (<= 1e-12)",
    )


def test_criterion_03_information_form_equivalence():
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 5))
        m = int(rng.integers(1, 5))
        predicted = GaussianState(rng.standard_normal(n), _random_spd(rng, n))
        obs = ObservationModel(rng.standard_normal((m, n)), _random_spd(rng, m))
        y = rng.standard_normal(m)
        direct = analyze(predicted, y, obs).state
        info = analyze_information_form(predicted, y, obs)
        mean_scale = max(1.0, np.linalg.norm(direct.mean))
        cov_scale = max(1.0, np.linalg.norm(direct.covariance))
        worst = max(
            worst,
            np.linalg.norm(info.mean - direct.mean) / mean_scale,
            np.linalg.norm(info.covariance - direct.covariance) / cov_scale,
        )
    _report(
        3,
        worst < 1e-9,
        f"100 information-form instances, worst relative deviation {worst:.2e} "
        "(< 1e-9)",
    )


def test_criterion_04_gain_optimality():
    rng = np.random.default_rng(4)
    obs = ObservationModel(np.eye(3), 0.01 * np.eye(3))
    min_margin = np.inf
    for _ in range(50):
        cov = _random_spd(rng, 3)
        gain = kalman_gain(cov, obs)
        base = np.trace(joseph_covariance(gain, cov, obs))
        for _ in range(20):
            delta = rng.standard_normal((3, 3))
            delta *= 1e-3 / np.linalg.norm(delta)
            perturbed = np.trace(joseph_covariance(gain + delta, cov, obs))
            min_margin = min(min_margin, perturbed - base)
    _report(
        4,
        min_margin > 0.0,
        f"50 gain instances x 20 perturbations, min trace margin "
        f"{min_margin:.2e} (> 0)",
    )


def test_criterion_05_enkf_converges_to_kf():
    n_members = 10_000
    m0 = np.array([0.5, -0.3])
    c0 = np.array([[0.5, 0.1], [0.1, 0.3]])
    transition_mat = np.array([[0.9, 0.2], [-0.1, 0.8]])
    obs = ObservationModel([[1.0, 0.5]], [[0.2]])
    y = np.array([0.7])

    reference = analyze(
        predict(GaussianState(m0, c0), LinearModel(transition_mat, np.zeros((2, 2)))),
        y,
        obs,
    ).state
    mean_se = np.sqrt(np.diag(reference.covariance) / n_members)

    start = time.perf_counter()
    hits = 0
    factor = psd_sqrt(c0)
    for seed in range(20):
        rng = RngStream(seed)
        z = standard_normal(derive_stream(rng, 0), n_members * 2)
        members = m0 + z.reshape(n_members, 2) @ factor.T
        predicted = Ensemble(members @ transition_mat.T)
        update = enkf_analyze(predicted, y, obs, rng=derive_stream(rng, 1))
        mean_ok = np.all(np.abs(update.stats.mean - reference.mean) <= 3.0 * mean_se)
        cov_err = np.linalg.norm(
            update.stats.covariance - reference.covariance
        ) / np.linalg.norm(reference.covariance)
        hits += bool(mean_ok and cov_err <= 0.10)
    elapsed = time.perf_counter() - start
    _report(
        5,
        hits >= 18 and elapsed < 10.0,
        f"EnKF vs linear filter, {hits}/20 seeds within tolerance (>= 18), "
        f"{elapsed:.2f}s (< 10s)",
    )


def test_criterion_06_zero_perturbation_covariance():
    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(2, 5))
        m = int(rng.integers(1, n + 1))
        big_n = int(rng.integers(5, 15))
        members = rng.standard_normal((big_n, n))
        obs = ObservationModel(rng.standard_normal((m, n)), _random_spd(rng, m))
        update = enkf_analyze(Ensemble(members), rng.standard_normal(m), obs, rng=None)
        from enkf_lab.enkf import ensemble_stats

        expected = deterministic_analysis_covariance(
            ensemble_stats(Ensemble(members)), update.gain, obs
        )
        worst = max(worst, np.max(np.abs(update.stats.covariance - expected)))
    _report(
        6,
        worst <= 1e-12,
        f"zero-perturbation covariance identity, worst deviation {worst:.2e} "
        "(<= 1e-12)",
    )


def test_criterion_07_rk4_order():
    drift = lambda v: -v  # noqa: E731 - scalar exponential test system
    v0 = np.array([1.0])
    exact = np.exp(-0.1)
    ratios = []
    for coarse, fine in ((4, 8), (8, 16)):
        err_c = abs(integrate_rk4(drift, v0, 0.1, coarse)[0] - exact)
        err_f = abs(integrate_rk4(drift, v0, 0.1, fine)[0] - exact)
        ratios.append(err_c / err_f)

    lorenz = lorenz_drift_fn()
    state = np.array([-10.0, -10.0, 20.0])
    reference = integrate_rk4(lorenz, state, 0.1, 4096)
    for coarse, fine in ((2, 4), (4, 8)):
        err_c = np.linalg.norm(integrate_rk4(lorenz, state, 0.1, coarse) - reference)
        err_f = np.linalg.norm(integrate_rk4(lorenz, state, 0.1, fine) - reference)
        ratios.append(err_c / err_f)
    ok = all(12.0 <= r <= 20.0 for r in ratios)
    _report(
        7,
        ok,
        "RK4 step-halving error ratios "
        + ", ".join(f"{r:.1f}" for r in ratios)
        + " all in [12, 20]",
    )


def test_criterion_08_twin_experiment_ensemble_size(timed_sweep):
    result, elapsed = timed_sweep
    med = result.median_final_err
    ok = med[100] < med[20] and elapsed < 60.0
    _report(
        8,
        ok,
        f"20-seed twin experiment, median final error N=100 {med[100]:.4f} < "
        f"N=20 {med[20]:.4f}, {elapsed:.1f}s (< 60s)",
    )


def test_criterion_09_trace_reduction_every_step(timed_sweep):
    result, _ = timed_sweep
    worst = -np.inf
    for cell in result.cells:
        assert cell.series is not None
        worst = max(
            worst,
            float((cell.series.anal_cov_trace - cell.series.pred_cov_trace).max()),
        )
    _report(
        9,
        worst <= 1e-9,
        f"analysis trace <= prediction trace at every step of all 60 runs, "
        f"worst excess {worst:.2e} (<= 1e-9)",
    )


def test_criterion_10_sweep_determinism(tmp_path):
    config = tmp_path / "config.txt"
    config.write_text("steps = 8\nensemble_sizes = 4,6,8\nseeds = 0,1\n")
    for name in ("a", "b"):
        code = main(
            ["sweep", "--config", str(config), "--seed", "9", "--out",
             str(tmp_path / name)]
        )
        assert code == 0
    same = all(
        (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
        for f in ("sweep.csv", "summary.csv", "sweep.svg")
    )
    _report(
        10,
        same,
        "two sweep invocations with identical config and seed produced "
        "byte-identical CSV and SVG outputs",
    )


def test_criterion_11_controlled_map_contraction():
    def error_sequence(lam, k, steps):
        truth, estimate = 2.0, 1.0  # e0 = 1
        errors = []
        for _ in range(steps):
            estimate = lam * estimate + 0.3 + k * (truth - estimate)
            truth = lam * truth + 0.3
            errors.append(abs(truth - estimate))
        return errors

    contracted = error_sequence(1.2, 0.5, 50)
    diverged = error_sequence(1.2, 0.0, 50)
    ok = contracted[-1] < 1e-6 and diverged[-1] > diverged[0]
    _report(
        11,
        ok,
        f"controlled map |e_50| = {contracted[-1]:.2e} (< 1e-6) with gain 0.5; "
        f"error grows to {diverged[-1]:.2e} with gain 0",
    )
