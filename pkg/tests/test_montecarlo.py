"""Monte-Carlo engine: determinism, stream independence, summaries."""

import math

import numpy as np
import pytest

from rismiso import McConfig, collect_trials, run_trials, trial_rng
from rismiso.montecarlo import bootstrap_stat_ci, summarize


class TestConfig:
    def test_rejects_bad_settings(self):
        with pytest.raises(ValueError):
            McConfig(trials=0)
        with pytest.raises(ValueError):
            McConfig(trials=10, parallelism=0)
        with pytest.raises(ValueError):
            McConfig(trials=10, ci_level=1.0)
        with pytest.raises(ValueError):
            McConfig(trials=10, bootstrap_resamples=0)


class TestDeterminism:
    def test_constant_trials(self):
        summaries = run_trials(McConfig(trials=500, seed=1), lambda i, rng: 1.0)
        assert len(summaries) == 1
        s = summaries[0]
        assert s.mean == 1.0
        assert s.variance == 0.0
        assert s.ci_low == s.ci_high == 1.0
        assert s.trials_used == 500

    def test_parallelism_does_not_change_results(self):
        def per_trial(i, rng):
            return np.array([rng.standard_normal(), rng.uniform()])

        serial = collect_trials(McConfig(trials=2000, seed=7, parallelism=1), per_trial)
        threaded = collect_trials(McConfig(trials=2000, seed=7, parallelism=8), per_trial)
        np.testing.assert_array_equal(serial, threaded)

        sum_serial = run_trials(McConfig(trials=2000, seed=7, parallelism=1), per_trial)
        sum_threaded = run_trials(McConfig(trials=2000, seed=7, parallelism=8), per_trial)
        assert sum_serial == sum_threaded

    def test_streams_keyed_not_sequential(self):
        # trial i's stream must not depend on how many trials run before it
        a = trial_rng(3, 17).standard_normal()
        b = trial_rng(3, 17).standard_normal()
        assert a == b
        assert trial_rng(3, 17).standard_normal() != trial_rng(3, 18).standard_normal()
        assert trial_rng(3, 17).standard_normal() != trial_rng(4, 17).standard_normal()


class TestStatistics:
    def test_normal_mean_within_clt_band(self):
        trials = 100000
        summaries = run_trials(McConfig(trials=trials, seed=11),
                               lambda i, rng: rng.standard_normal())
        assert abs(summaries[0].mean) < 3.0 / math.sqrt(trials)
        assert summaries[0].variance == pytest.approx(1.0, rel=0.05)

    def test_lag_one_autocorrelation(self):
        trials = 100000
        values = collect_trials(McConfig(trials=trials, seed=13),
                                lambda i, rng: rng.standard_normal())[:, 0]
        centered = values - values.mean()
        r1 = float(centered[:-1] @ centered[1:] / (centered @ centered))
        assert abs(r1) < 4.0 / math.sqrt(trials)

    def test_bootstrap_interval_brackets_mean(self):
        rng = np.random.default_rng(5)
        values = rng.exponential(size=4000)
        s = summarize(values, McConfig(trials=4000, seed=9))
        assert s.ci_low <= s.mean <= s.ci_high
        # the interval should be in the right ballpark of the CLT width
        width = s.ci_high - s.ci_low
        clt = 2.0 * 1.96 * values.std(ddof=1) / math.sqrt(values.size)
        assert width == pytest.approx(clt, rel=0.25)

    def test_bootstrap_stat_ci_nonlinear(self):
        rng = np.random.default_rng(6)
        rows = np.column_stack([rng.normal(2.0, 1.0, 3000), rng.normal(5.0, 1.0, 3000)])
        low, high = bootstrap_stat_ci(rows, lambda mm: mm[..., 0] / mm[..., 1],
                                      McConfig(trials=3000, seed=2))
        assert low < 0.4 < high
