"""Estimator: coefficient limits, matrix-route oracle, error analytics."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rismiso import (EstimationError, PhaseShifts, Scenario, build_estimator,
                     link_gains, lmmse_estimate, los_components, ls_estimate,
                     mse_trace_closed_form, nmse_closed_form, observe,
                     sample_channels)
from rismiso.channel import bs_arrival_steer, ris_departure_steer, user_ris_los
from rismiso.estimation import EstimatorModel


def aligned_phases(scn):
    from rismiso.phases import synthesize_align
    return synthesize_align(user_ris_los(scn), ris_departure_steer(scn))


def matrix_route_model(scn, gains, phases):
    """Independent oracle: solve the linear-MMSE problem with dense algebra.

    Builds the combined-channel covariance explicitly, forms the filter as
    cov @ inv(cov + rho I), and returns (filter, offset, nmse, mse_trace).
    """
    steer = bs_arrival_steer(scn)
    h_los, big_los = los_components(scn)
    var_dir = scn.n * gains.composite * scn.delta
    var_iso = scn.n * gains.composite * (scn.epsilon + 1.0) + gains.user_bs
    cov = var_dir * np.outer(steer, np.conj(steer)) + var_iso * np.eye(scn.m)
    rho = scn.noise_ratio
    filt = cov @ np.linalg.inv(cov + rho * np.eye(scn.m))
    mean = math.sqrt(gains.composite * scn.delta * scn.epsilon) * (
        big_los @ (phases.unit() * h_los))
    offset = (np.eye(scn.m) - filt) @ mean
    err_cov = cov - filt @ cov
    nmse = float(np.trace(err_cov).real / np.trace(cov).real)
    return filt, offset, nmse, float(np.trace(err_cov).real)


class TestBuildEstimator:
    def test_perfect_observation_limit(self):
        scn = Scenario(m=4, n=4, sigma2_dbm=-math.inf)
        gains = link_gains(scn)
        model = build_estimator(scn, gains, aligned_phases(scn))
        assert model.w_dir == 0.0
        assert model.w_id == 1.0
        np.testing.assert_array_equal(model.offset, np.zeros(scn.m))
        np.testing.assert_allclose(model.filter_matrix(), np.eye(scn.m), atol=0)

    def test_pure_rayleigh(self):
        scn = Scenario(m=4, n=4, delta=0.0, epsilon=0.0)
        gains = link_gains(scn)
        model = build_estimator(scn, gains, aligned_phases(scn))
        assert model.var_dir == 0.0
        assert model.w_dir == 0.0
        np.testing.assert_array_equal(model.offset, np.zeros(scn.m))
        np.testing.assert_allclose(model.filter_matrix(), model.w_id * np.eye(scn.m),
                                   atol=0)

    def test_matches_matrix_route(self):
        scn = Scenario(m=16, n=16)
        gains = link_gains(scn)
        phases = aligned_phases(scn)
        model = build_estimator(scn, gains, phases)
        filt, offset, nmse, mse = matrix_route_model(scn, gains, phases)
        np.testing.assert_allclose(model.filter_matrix(), filt, rtol=1e-10)
        np.testing.assert_allclose(model.offset, offset, rtol=1e-9, atol=1e-25)
        assert nmse_closed_form(model, scn.m) == pytest.approx(nmse, rel=1e-10)
        assert mse_trace_closed_form(model, scn.m) == pytest.approx(mse, rel=1e-10)

    def test_apply_filter_matches_materialized(self):
        scn = Scenario(m=9, n=4)
        model = build_estimator(scn, link_gains(scn), aligned_phases(scn))
        vec = np.random.default_rng(1).standard_normal(scn.m) + 1j
        np.testing.assert_allclose(model.apply_filter(vec),
                                   model.filter_matrix() @ vec, rtol=1e-12)


class TestObserve:
    def test_noise_free(self):
        scn = Scenario(m=4, n=4, sigma2_dbm=-math.inf)
        gains = link_gains(scn)
        sample = sample_channels(scn, gains, aligned_phases(scn), np.random.default_rng(0))
        obs = observe(sample, scn, np.random.default_rng(1))
        np.testing.assert_array_equal(obs.received, sample.overall)

    def test_doubling_tau_halves_variance(self):
        assert Scenario(tau=2).noise_ratio == pytest.approx(Scenario(tau=1).noise_ratio / 2.0)

    def test_noise_covariance(self):
        scn = Scenario(m=4, n=4)
        gains = link_gains(scn)
        phases = aligned_phases(scn)
        rng = np.random.default_rng(7)
        trials = 20000
        acc = np.zeros((scn.m, scn.m), dtype=complex)
        sample = sample_channels(scn, gains, phases, rng)
        for _ in range(trials):
            noise = observe(sample, scn, rng).received - sample.overall
            acc += np.outer(noise, np.conj(noise))
        cov = acc / trials
        rho = scn.noise_ratio
        np.testing.assert_allclose(np.diag(cov).real, rho, rtol=0.05)
        off = cov - np.diag(np.diag(cov))
        assert np.abs(off).max() < 0.05 * rho


class TestEstimators:
    def test_identity_filter_passthrough(self):
        scn = Scenario(m=4, n=4, sigma2_dbm=-math.inf)
        gains = link_gains(scn)
        model = build_estimator(scn, gains, aligned_phases(scn))
        sample = sample_channels(scn, gains, aligned_phases(scn), np.random.default_rng(3))
        obs = observe(sample, scn, np.random.default_rng(4))
        np.testing.assert_allclose(lmmse_estimate(model, obs), obs.received, rtol=1e-12)

    def test_rayleigh_pure_shrinkage(self):
        scn = Scenario(m=4, n=4, delta=0.0, epsilon=0.0)
        gains = link_gains(scn)
        model = build_estimator(scn, gains, aligned_phases(scn))
        sample = sample_channels(scn, gains, aligned_phases(scn), np.random.default_rng(3))
        obs = observe(sample, scn, np.random.default_rng(4))
        np.testing.assert_allclose(lmmse_estimate(model, obs),
                                   model.w_id * obs.received, rtol=1e-12)

    def test_ls_is_identity_and_lmmse_wins(self):
        scn = Scenario(m=4, n=4)
        gains = link_gains(scn)
        phases = aligned_phases(scn)
        model = build_estimator(scn, gains, phases)
        rng = np.random.default_rng(11)
        lmmse_err = ls_err = 0.0
        trials = 10000
        for _ in range(trials):
            sample = sample_channels(scn, gains, phases, rng)
            obs = observe(sample, scn, rng)
            assert ls_estimate(obs) is obs.received
            diff_lmmse = lmmse_estimate(model, obs) - sample.overall
            diff_ls = ls_estimate(obs) - sample.overall
            lmmse_err += float(np.vdot(diff_lmmse, diff_lmmse).real)
            ls_err += float(np.vdot(diff_ls, diff_ls).real)
        assert lmmse_err < ls_err
        assert ls_err / trials == pytest.approx(scn.m * scn.noise_ratio, rel=0.02)

    def test_dimension_mismatch(self):
        scn = Scenario(m=4, n=4)
        model = build_estimator(scn, link_gains(scn), aligned_phases(scn))
        from rismiso.estimation import Observation
        with pytest.raises(ValueError):
            lmmse_estimate(model, Observation(np.zeros(5, dtype=complex), 0.0))


class TestClosedForms:
    def test_zero_noise_means_zero_error(self):
        scn = Scenario(m=4, n=4, sigma2_dbm=-math.inf)
        model = build_estimator(scn, link_gains(scn), aligned_phases(scn))
        assert nmse_closed_form(model, scn.m) == 0.0
        assert mse_trace_closed_form(model, scn.m) == 0.0

    def test_nmse_vanishes_with_large_n(self):
        values = []
        for n in (64, 256, 1024, 4096, 16384):
            scn = Scenario(n=n)
            model = build_estimator(scn, link_gains(scn), aligned_phases(scn))
            values.append(nmse_closed_form(model, scn.m))
        assert all(b < a for a, b in zip(values, values[1:]))
        assert values[-1] < 0.05 * values[0]

    def test_mse_per_antenna_approaches_noise_floor(self):
        scn_small = Scenario(n=16, tau=16)
        scn_large = Scenario(n=1024, tau=16)
        rho = scn_small.noise_ratio
        mse_small = mse_trace_closed_form(
            build_estimator(scn_small, link_gains(scn_small), aligned_phases(scn_small)),
            scn_small.m) / scn_small.m
        mse_large = mse_trace_closed_form(
            build_estimator(scn_large, link_gains(scn_large), aligned_phases(scn_large)),
            scn_large.m) / scn_large.m
        assert mse_small < mse_large < rho
        assert mse_large > 0.95 * rho

    def test_nmse_strictly_decreasing_in_pilot_energy(self):
        values = []
        for tau in (1, 2, 4, 8):
            scn = Scenario(m=4, n=4, tau=tau)
            model = build_estimator(scn, link_gains(scn), aligned_phases(scn))
            values.append(nmse_closed_form(model, scn.m))
        assert all(b < a for a, b in zip(values, values[1:]))

    def test_longer_pilots_and_more_elements_act_alike(self):
        # quadrupling the pilot length or the element count cuts the NMSE by
        # comparable amounts in this regime
        def nmse(tau, n):
            scn = Scenario(tau=tau, n=n)
            return nmse_closed_form(build_estimator(scn, link_gains(scn),
                                                    aligned_phases(scn)), scn.m)

        base = nmse(1, 64)
        via_tau = nmse(4, 64)
        via_n = nmse(1, 256)
        assert via_tau < base and via_n < base
        assert 0.5 < via_tau / via_n < 2.0

    def test_degenerate_channel_raises(self):
        model = EstimatorModel(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
                               np.ones(2, dtype=complex), np.zeros(2, dtype=complex), 1.0)
        with pytest.raises(EstimationError):
            nmse_closed_form(model, 2)

    def test_matches_monte_carlo(self):
        # NMSE normalizes by the channel's fluctuation energy (so a
        # mean-value estimate scores exactly 1), hence the centering below.
        scn = Scenario(m=4, n=4)
        gains = link_gains(scn)
        phases = aligned_phases(scn)
        model = build_estimator(scn, gains, phases)
        rng = np.random.default_rng(21)
        err_acc = chan_acc = 0.0
        mean_acc = np.zeros(scn.m, dtype=complex)
        trials = 20000
        for _ in range(trials):
            sample = sample_channels(scn, gains, phases, rng)
            obs = observe(sample, scn, rng)
            err = lmmse_estimate(model, obs) - sample.overall
            err_acc += float(np.vdot(err, err).real)
            chan_acc += float(np.vdot(sample.overall, sample.overall).real)
            mean_acc += sample.overall
        fluct = chan_acc / trials - float(np.vdot(mean_acc / trials, mean_acc / trials).real)
        assert err_acc / trials / fluct == pytest.approx(nmse_closed_form(model, scn.m), rel=0.02)
        assert err_acc / trials == pytest.approx(mse_trace_closed_form(model, scn.m), rel=0.02)


class TestInvariants:
    def test_nmse_ignores_phases(self):
        scn = Scenario(m=4, n=9)
        gains = link_gains(scn)
        rng = np.random.default_rng(2)
        picks = [nmse_closed_form(build_estimator(scn, gains, PhaseShifts.random(scn.n, rng)),
                                  scn.m) for _ in range(5)]
        assert all(v == picks[0] for v in picks)

    def test_estimate_orthogonal_to_error(self):
        scn = Scenario(m=4, n=4)
        gains = link_gains(scn)
        phases = aligned_phases(scn)
        model = build_estimator(scn, gains, phases)
        rng = np.random.default_rng(9)
        acc = 0.0 + 0.0j
        scale = 0.0
        trials = 20000
        for _ in range(trials):
            sample = sample_channels(scn, gains, phases, rng)
            est = lmmse_estimate(model, observe(sample, scn, rng))
            acc += np.vdot(sample.overall - est, est)
            scale += float(np.vdot(est, est).real)
        assert abs(acc) / scale < 0.02

    def test_long_pilot_recovers_channel(self):
        scn = Scenario(m=4, n=4, tau=10 ** 9, tau_c=10 ** 9 + 1)
        gains = link_gains(scn)
        phases = aligned_phases(scn)
        model = build_estimator(scn, gains, phases)
        sample = sample_channels(scn, gains, phases, np.random.default_rng(5))
        est = lmmse_estimate(model, observe(sample, scn, np.random.default_rng(6)))
        assert np.linalg.norm(est - sample.overall) < 1e-3 * np.linalg.norm(sample.overall)

    @settings(max_examples=60, deadline=None)
    @given(m_side=st.integers(1, 6), n_side=st.integers(1, 8),
           delta=st.floats(0.0, 50.0), epsilon=st.floats(0.0, 50.0),
           tau=st.integers(1, 32), p_dbm=st.floats(-20.0, 50.0))
    def test_effective_gains_in_unit_interval(self, m_side, n_side, delta, epsilon, tau, p_dbm):
        scn = Scenario(m=m_side ** 2, n=n_side ** 2, delta=delta, epsilon=epsilon,
                       tau=tau, tau_c=tau + 10, p_dbm=p_dbm)
        model = build_estimator(scn, link_gains(scn), aligned_phases(scn))
        for value in (model.eff_lin, model.eff_dir, model.eff_sq):
            assert 0.0 <= value <= 1.0 + 1e-12
        assert 0.0 < model.w_id < 1.0 + 1e-12
        assert model.w_dir >= 0.0
