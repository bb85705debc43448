"""Seeded Monte-Carlo engine with parallelism-independent reproducibility.

Every trial gets its own generator, keyed by (seed, trial index) rather than
split sequentially, and results land in a preallocated array indexed by
trial. Reductions then run in a fixed order, so the same (seed, trials)
yields bit-identical output for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

_TRIAL_STREAM = 0
_BOOTSTRAP_STREAM = 1

# Cap on floats touched per bootstrap batch (keeps resampling memory modest).
_BOOTSTRAP_BATCH_BUDGET = 1 << 21


@dataclass(frozen=True)
class McConfig:
    """Trial count, seed, and summary settings for one Monte-Carlo run."""

    trials: int
    seed: int = 1
    parallelism: int = 1
    ci_level: float = 0.95
    bootstrap_resamples: int = 1000

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.parallelism < 1:
            raise ValueError("parallelism must be >= 1")
        if not 0.0 < self.ci_level < 1.0:
            raise ValueError("ci_level must lie strictly between 0 and 1")
        if self.bootstrap_resamples < 1:
            raise ValueError("bootstrap_resamples must be >= 1")


@dataclass(frozen=True)
class McSummary:
    mean: float
    variance: float
    ci_low: float
    ci_high: float
    trials_used: int


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """Independent generator for one trial, keyed by (seed, index)."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(_TRIAL_STREAM, index)))


def bootstrap_rng(seed: int) -> np.random.Generator:
    """Resampling stream, separated from the trial streams."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(_BOOTSTRAP_STREAM,)))


def collect_trials(config: McConfig,
                   per_trial: Callable[[int, np.random.Generator], np.ndarray]) -> np.ndarray:
    """Evaluate ``per_trial`` for every index into a (trials, k) array.

    ``per_trial`` must be pure given its generator; it may return a scalar
    or a fixed-length 1-d array. The output is identical for any
    ``parallelism`` because each row depends only on (seed, index).
    """
    first = np.atleast_1d(np.asarray(per_trial(0, trial_rng(config.seed, 0)), dtype=np.float64))
    out = np.empty((config.trials, first.shape[0]), dtype=np.float64)
    out[0] = first

    def fill(lo: int, hi: int) -> None:
        for i in range(lo, hi):
            out[i] = per_trial(i, trial_rng(config.seed, i))

    if config.parallelism == 1 or config.trials <= 2:
        fill(1, config.trials)
    else:
        chunk = max(1, math.ceil((config.trials - 1) / config.parallelism))
        bounds = [(lo, min(lo + chunk, config.trials))
                  for lo in range(1, config.trials, chunk)]
        with ThreadPoolExecutor(max_workers=config.parallelism) as pool:
            for future in [pool.submit(fill, lo, hi) for lo, hi in bounds]:
                future.result()
    return out


def bootstrap_stat_ci(rows: np.ndarray, statistic: Callable[[np.ndarray], np.ndarray],
                      config: McConfig) -> tuple[float, float]:
    """Percentile bootstrap interval for a statistic of column means.

    ``statistic`` maps an (..., k) array of column means to (...) values and
    must be vectorized over the leading axes.
    """
    trials, width = rows.shape
    rng = bootstrap_rng(config.seed)
    reps = np.empty(config.bootstrap_resamples, dtype=np.float64)
    batch = max(1, _BOOTSTRAP_BATCH_BUDGET // max(trials * width, 1))
    done = 0
    while done < config.bootstrap_resamples:
        b = min(batch, config.bootstrap_resamples - done)
        idx = rng.integers(0, trials, size=(b, trials))
        reps[done:done + b] = statistic(rows[idx].mean(axis=1))
        done += b
    alpha = (1.0 - config.ci_level) / 2.0
    low, high = np.quantile(reps, [alpha, 1.0 - alpha])
    return float(low), float(high)


def summarize(values: np.ndarray, config: McConfig) -> McSummary:
    """Mean of one tracked value with a percentile-bootstrap interval."""
    values = np.asarray(values, dtype=np.float64)
    mean = float(values.mean())
    variance = float(values.var(ddof=1)) if values.shape[0] > 1 else 0.0
    low, high = bootstrap_stat_ci(values[:, None], lambda m: m[..., 0], config)
    return McSummary(mean, variance, low, high, values.shape[0])


def run_trials(config: McConfig,
               per_trial: Callable[[int, np.random.Generator], np.ndarray]) -> list[McSummary]:
    """Run all trials and summarize each tracked column.

    Returns one :class:`McSummary` per column of ``per_trial``'s output, in
    column order. Bit-identical for fixed (seed, trials) at any parallelism.
    """
    rows = collect_trials(config, per_trial)
    return [summarize(rows[:, j], config) for j in range(rows.shape[1])]
