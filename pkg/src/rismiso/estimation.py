"""Pilot observation and linear-MMSE estimation of the combined channel.

The combined channel is estimated as a whole from a single despread pilot
observation per coherence interval, so the pilot length only has to reach
the number of users (one here).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import (ChannelSample, LinkGains, PhaseShifts, Scenario,
                      bs_arrival_steer, complex_normal, los_components)


class EstimationError(ValueError):
    """Raised when an estimator quantity is undefined for the given setup."""


@dataclass(frozen=True)
class EstimatorModel:
    """Coefficients of the affine estimator for one scenario.

    The combined-channel covariance splits into ``var_dir`` times the
    projector onto the BS arrival direction plus ``var_iso`` times the
    identity. ``w_dir``/``w_id`` are the matching filter weights, and the
    effective gains fold them into the scalars the rate analysis consumes:
    ``eff_lin = w_dir + w_id``, ``eff_dir = m*w_dir + w_id`` (the filter's
    eigenvalue along the steering direction), and
    ``eff_sq = m*w_dir^2 + 2*w_dir*w_id + w_id^2``. All three lie in [0, 1].
    """

    var_dir: float
    var_iso: float
    w_dir: float
    w_id: float
    eff_lin: float
    eff_dir: float
    eff_sq: float
    steer_bs: np.ndarray
    offset: np.ndarray
    noise_ratio: float

    def filter_matrix(self) -> np.ndarray:
        """Materialized m x m filter (projector part plus identity part)."""
        m = self.steer_bs.shape[0]
        return (self.w_dir * np.outer(self.steer_bs, np.conj(self.steer_bs))
                + self.w_id * np.eye(m))

    def apply_filter(self, vec: np.ndarray) -> np.ndarray:
        """Apply the filter in O(m) using its rank-one-plus-identity form."""
        return self.w_dir * np.vdot(self.steer_bs, vec) * self.steer_bs + self.w_id * vec


@dataclass(frozen=True)
class Observation:
    """Despread pilot observation: true combined channel plus noise.

    ``noise_scale`` is the per-antenna noise variance sigma^2/(tau*p); the
    pilot sequence itself never needs to be materialized because despreading
    a single user's unit-norm pilot is exact.
    """

    received: np.ndarray
    noise_scale: float


def build_estimator(scenario: Scenario, gains: LinkGains,
                    phases: PhaseShifts) -> EstimatorModel:
    """Assemble the affine estimator for a scenario and phase configuration."""
    rho = scenario.noise_ratio
    m, n = scenario.m, scenario.n
    var_dir = n * gains.composite * scenario.delta
    var_iso = n * gains.composite * (scenario.epsilon + 1.0) + gains.user_bs
    w_dir = var_dir * rho / ((var_iso + rho) * (var_iso + rho + m * var_dir))
    w_id = var_iso / (var_iso + rho)
    eff_lin = w_dir + w_id
    eff_dir = m * w_dir + w_id
    eff_sq = m * w_dir * w_dir + 2.0 * w_dir * w_id + w_id * w_id
    steer = bs_arrival_steer(scenario)
    h_los, big_los = los_components(scenario)
    mean_overall = math.sqrt(gains.composite * scenario.delta * scenario.epsilon) * (
        big_los @ (phases.unit() * h_los))
    offset = mean_overall - (w_dir * np.vdot(steer, mean_overall) * steer
                             + w_id * mean_overall)
    steer.setflags(write=False)
    offset.setflags(write=False)
    return EstimatorModel(var_dir, var_iso, w_dir, w_id, eff_lin, eff_dir, eff_sq,
                          steer, offset, rho)


def observe(sample: ChannelSample, scenario: Scenario,
            rng: np.random.Generator) -> Observation:
    """Draw the despread pilot observation for one channel realization."""
    rho = scenario.noise_ratio
    noise = math.sqrt(rho) * complex_normal(rng, scenario.m)
    return Observation(sample.overall + noise, rho)


def lmmse_estimate(model: EstimatorModel, obs: Observation) -> np.ndarray:
    """Affine estimate of the combined channel from one observation."""
    if obs.received.shape != model.steer_bs.shape:
        raise ValueError("observation length does not match the estimator dimension")
    return model.apply_filter(obs.received) + model.offset


def ls_estimate(obs: Observation) -> np.ndarray:
    """Least-squares estimate: the despread observation itself."""
    return obs.received


def nmse_closed_form(model: EstimatorModel, m: int) -> float:
    """Normalized estimation error power in [0, 1]; phase-independent."""
    vd, vi, rho = model.var_dir, model.var_iso, model.noise_ratio
    total = vd + vi
    if total <= 0.0:
        raise EstimationError("combined channel has zero power; NMSE undefined")
    num = rho * (m * vd * vi + vi * vi + total * rho)
    den = (vi + rho) * (vi + rho + m * vd) * total
    return num / den


def mse_trace_closed_form(model: EstimatorModel, m: int) -> float:
    """Total estimation error power across antennas.

    Equals the NMSE times the channel power trace m*(var_dir + var_iso); the
    per-antenna value approaches noise_ratio from below as n grows.
    """
    return nmse_closed_form(model, m) * m * (model.var_dir + model.var_iso)
