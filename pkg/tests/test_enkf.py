import numpy as np
import pytest

from enkf_lab.dynamics import integrate_rk4, lorenz_drift_fn, lorenz_transition
from enkf_lab.enkf import (
    Ensemble,
    deterministic_analysis_covariance,
    enkf_analyze,
    enkf_gain,
    enkf_predict,
    ensemble_stats,
    inflate,
    init_ensemble,
)
from enkf_lab.errors import DimensionError, DivergenceError
from enkf_lab.kf_linear import ObservationModel, kalman_gain
from enkf_lab.randomness import RngStream


def identity_obs(n, gamma):
    return ObservationModel(np.eye(n), gamma * np.eye(n))


class TestInitEnsemble:
    def test_zero_spread_copies_center(self):
        center = np.array([-11.0, -12.0, 10.0])
        ens = init_ensemble(center, 0.0, 5, RngStream(0))
        assert np.all(ens.members == center)

    def test_sample_mean_near_center(self):
        center = np.array([-11.0, -12.0, 10.0])
        ens = init_ensemble(center, 0.1, 100, RngStream(1))
        stats = ensemble_stats(ens)
        np.testing.assert_allclose(stats.mean, center, atol=0.05)

    def test_sample_covariance_near_spread_squared(self):
        ens = init_ensemble(np.zeros(3), 0.1, 10_000, RngStream(2))
        stats = ensemble_stats(ens)
        target = 0.01 * np.eye(3)
        assert np.linalg.norm(stats.covariance - target) < 0.05 * np.linalg.norm(
            target
        )

    def test_too_few_members_rejected(self):
        with pytest.raises(DimensionError):
            init_ensemble(np.zeros(3), 0.1, 1, RngStream(0))


class TestEnkfPredict:
    def test_identity_transition_no_noise(self):
        ens = Ensemble([[1.0, 2.0], [3.0, 4.0]])
        predicted, _ = enkf_predict(ens, lambda m: m, np.zeros((2, 2)))
        np.testing.assert_array_equal(predicted.members, ens.members)

    def test_scalar_doubling_hand_values(self):
        ens = Ensemble([[1.0], [3.0]])
        predicted, stats = enkf_predict(ens, lambda m: 2.0 * m, np.zeros((1, 1)))
        np.testing.assert_array_equal(predicted.members, [[2.0], [6.0]])
        assert stats.mean[0] == 4.0
        assert stats.covariance[0, 0] == pytest.approx(8.0, abs=1e-12)

    def test_lorenz_member_matches_single_state(self):
        transition = lorenz_transition()
        rng = np.random.default_rng(3)
        members = rng.standard_normal((4, 3)) * 5
        predicted, _ = enkf_predict(Ensemble(members), transition, np.zeros((3, 3)))
        drift = lorenz_drift_fn()
        for k in range(4):
            expected = integrate_rk4(drift, members[k], 0.1, 10)
            np.testing.assert_allclose(predicted.members[k], expected, atol=1e-12)

    def test_divergence_reports_member(self):
        ens = Ensemble([[1.0], [2.0]])

        def blow_up(m):
            out = m.copy()
            out[1] = np.inf
            return out

        with pytest.raises(DivergenceError) as exc_info:
            enkf_predict(ens, blow_up, np.zeros((1, 1)))
        assert exc_info.value.member == 1

    def test_process_noise_has_right_scale(self):
        ens = Ensemble(np.zeros((2000, 2)))
        _, stats = enkf_predict(
            ens, lambda m: m, 0.04 * np.eye(2), RngStream(4)
        )
        np.testing.assert_allclose(stats.covariance, 0.04 * np.eye(2), atol=0.005)


class TestEnkfGain:
    def test_collapsed_ensemble_gives_zero_gain(self):
        stats = ensemble_stats(Ensemble(np.ones((3, 2))))
        gain = enkf_gain(stats, identity_obs(2, 1.0))
        np.testing.assert_array_equal(gain, np.zeros((2, 2)))

    def test_matches_linear_gain_bitwise(self):
        rng = np.random.default_rng(5)
        members = rng.standard_normal((10, 3))
        stats = ensemble_stats(Ensemble(members))
        obs = identity_obs(3, 0.01)
        np.testing.assert_array_equal(
            enkf_gain(stats, obs), kalman_gain(stats.covariance, obs)
        )

    def test_scalar_hand_value(self):
        # Sample covariance of {0, 2} is 2; gain 2 / (2 + 2) = 0.5.
        stats = ensemble_stats(Ensemble([[0.0], [2.0]]))
        gain = enkf_gain(stats, identity_obs(1, 2.0))
        assert gain[0, 0] == pytest.approx(0.5, abs=1e-15)


class TestEnkfAnalyze:
    def test_collapsed_ensemble_unchanged(self):
        ens = Ensemble(np.ones((4, 2)))
        update = enkf_analyze(ens, [5.0, 5.0], identity_obs(2, 1.0), rng=None)
        np.testing.assert_array_equal(update.ensemble.members, ens.members)

    def test_perfect_observation_pulls_members_to_y(self):
        rng = np.random.default_rng(6)
        ens = Ensemble(rng.standard_normal((20, 3)))
        y = np.array([1.0, -2.0, 0.5])
        update = enkf_analyze(ens, y, identity_obs(3, 1e-12), rng=None)
        np.testing.assert_allclose(
            update.ensemble.members, np.tile(y, (20, 1)), atol=1e-6
        )

    def test_hand_example_with_forced_perturbations(self):
        ens = Ensemble([[0.0], [2.0]])
        update = enkf_analyze(
            ens,
            [1.0],
            identity_obs(1, 2.0),
            perturbations=np.array([[1.0], [-1.0]]),
        )
        np.testing.assert_allclose(update.ensemble.members, [[1.0], [1.0]], atol=1e-14)

    def test_mean_update_identity_with_recorded_perturbations(self):
        rng = np.random.default_rng(7)
        ens = Ensemble(rng.standard_normal((15, 3)))
        obs = identity_obs(3, 0.01)
        y = rng.standard_normal(3)
        update = enkf_analyze(ens, y, obs, rng=RngStream(8))
        stats = ensemble_stats(ens)
        eta_bar = update.perturbations.mean(axis=0)
        expected = stats.mean + update.gain @ (y + eta_bar - stats.mean)
        np.testing.assert_allclose(update.stats.mean, expected, atol=1e-12)

    def test_zero_perturbation_covariance_identity(self):
        rng = np.random.default_rng(9)
        ens = Ensemble(rng.standard_normal((8, 3)))
        obs = ObservationModel(rng.standard_normal((2, 3)), np.eye(2))
        update = enkf_analyze(ens, rng.standard_normal(2), obs, rng=None)
        stats = ensemble_stats(ens)
        expected = deterministic_analysis_covariance(stats, update.gain, obs)
        np.testing.assert_allclose(update.stats.covariance, expected, atol=1e-12)

    def test_permutation_equivariance(self):
        rng = np.random.default_rng(10)
        members = rng.standard_normal((6, 3))
        eta = rng.standard_normal((6, 3)) * 0.1
        obs = identity_obs(3, 0.01)
        y = rng.standard_normal(3)
        perm = np.array([4, 2, 0, 5, 1, 3])
        base = enkf_analyze(Ensemble(members), y, obs, perturbations=eta)
        permuted = enkf_analyze(
            Ensemble(members[perm]), y, obs, perturbations=eta[perm]
        )
        np.testing.assert_allclose(
            permuted.ensemble.members, base.ensemble.members[perm], atol=1e-12
        )

    def test_deterministic_under_fixed_stream(self):
        rng = np.random.default_rng(11)
        members = rng.standard_normal((5, 3))
        obs = identity_obs(3, 0.01)
        y = np.zeros(3)
        a = enkf_analyze(Ensemble(members), y, obs, rng=RngStream(12))
        b = enkf_analyze(Ensemble(members), y, obs, rng=RngStream(12))
        np.testing.assert_array_equal(a.ensemble.members, b.ensemble.members)

    def test_trace_reduction_with_optimal_gain(self):
        rng = np.random.default_rng(13)
        for _ in range(10):
            ens = Ensemble(rng.standard_normal((10, 3)))
            stats = ensemble_stats(ens)
            obs = identity_obs(3, 0.1)
            gain = enkf_gain(stats, obs)
            reduced = deterministic_analysis_covariance(stats, gain, obs)
            assert np.trace(reduced) <= np.trace(stats.covariance) + 1e-12


class TestDeterministicAnalysisCovariance:
    def test_zero_gain_keeps_covariance(self):
        rng = np.random.default_rng(14)
        stats = ensemble_stats(Ensemble(rng.standard_normal((5, 2))))
        obs = identity_obs(2, 1.0)
        result = deterministic_analysis_covariance(stats, np.zeros((2, 2)), obs)
        np.testing.assert_allclose(result, stats.covariance, atol=1e-15)

    def test_identity_gain_annihilates(self):
        rng = np.random.default_rng(15)
        stats = ensemble_stats(Ensemble(rng.standard_normal((5, 2))))
        obs = identity_obs(2, 1.0)
        result = deterministic_analysis_covariance(stats, np.eye(2), obs)
        np.testing.assert_allclose(result, np.zeros((2, 2)), atol=1e-15)


def test_inflate_is_noop_at_unit_factor():
    ens = Ensemble([[1.0, 2.0], [3.0, 4.0]])
    assert inflate(ens, 1.0) is ens


def test_inflate_scales_deviations():
    ens = Ensemble([[0.0], [2.0]])
    inflated = inflate(ens, 2.0)
    np.testing.assert_allclose(inflated.members, [[-1.0], [3.0]], atol=1e-14)
