"""Ergodic-rate lower bound of the estimated-channel MRC receiver.

The closed form follows the use-and-then-forget decomposition: the mean of
the estimate/channel correlation is the useful signal, its fluctuation is
self-interference, and the estimate energy scales the thermal noise. The
same three moments are also measured by a joint Monte-Carlo oracle so the
closed form can be checked end to end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import (LinkGains, PhaseShifts, Scenario, los_components,
                      ris_departure_steer, sample_channels, user_ris_los)
from .estimation import EstimatorModel, lmmse_estimate, observe
from .montecarlo import McConfig, bootstrap_stat_ci, collect_trials

_LN2 = math.log(2.0)


class ScalingLawError(ValueError):
    """Raised when a power-scaling limit's premises do not hold."""


def los_coupling(phases: PhaseShifts, h_los: np.ndarray, dep_steer: np.ndarray) -> complex:
    """Scalar coupling of the phases to the two deterministic responses.

    Sum over elements of exp(j*theta_n) * conj(dep_steer)_n * (h_los)_n;
    its modulus is at most the element count.
    """
    if len(phases) != h_los.shape[0] or h_los.shape != dep_steer.shape:
        raise ValueError("phase and response vector lengths must agree")
    return complex(np.sum(np.conj(dep_steer) * phases.unit() * h_los))


@dataclass(frozen=True)
class RateBreakdown:
    """Terms of the closed-form rate bound at one phase configuration."""

    coupling_abs2: float   # |coupling|^2, in [0, n^2]
    signal_power: float    # squared mean correlation; equals noise_power^2
    leakage_power: float   # variance of the correlation
    noise_power: float     # mean estimate energy
    snr: float
    rate: float            # bits/s/Hz including the pilot-overhead prefactor


def _noise_term(scenario: Scenario, gains: LinkGains, model: EstimatorModel,
                coupling_abs2: float) -> float:
    c, g = gains.composite, gains.user_bs
    dlt, eps = scenario.delta, scenario.epsilon
    n = scenario.n
    return scenario.m * (coupling_abs2 * c * dlt * eps
                         + n * c * dlt * model.eff_dir
                         + (n * c * (eps + 1.0) + g) * model.eff_lin)


def _leakage_term(scenario: Scenario, gains: LinkGains, model: EstimatorModel,
                  coupling_abs2: float) -> float:
    m, n = scenario.m, scenario.n
    dlt, eps = scenario.delta, scenario.epsilon
    c, g = gains.composite, gains.user_bs
    e1, e2, e3 = model.eff_lin, model.eff_dir, model.eff_sq
    rho = model.noise_ratio
    x = coupling_abs2
    total = m * x * c * c * dlt * eps * (
        n * (m * dlt + eps + 1.0) * (e2 * e2 + 1.0)
        + 2.0 * (m * e1 + e2) * (e2 + 1.0))
    total += m * x * c * dlt * eps * (g + (g + rho) * e2 * e2)
    total += m * m * n * n * c * c * dlt * dlt * e2 * e2
    total += m * n * n * c * c * (2.0 * dlt * (eps + 1.0) * e2 * e2
                                  + (eps + 1.0) ** 2 * e3)
    total += m * m * n * c * c * ((2.0 * eps + 1.0) * e1 * e1 + 2.0 * dlt * e1 * e2)
    total += m * n * c * (c * (2.0 * dlt * e2 * e2 + (2.0 * eps + 1.0) * e3)
                          + (2.0 * g + rho) * (dlt * e2 * e2 + (eps + 1.0) * e3))
    total += m * g * (g + rho) * e3
    return total


def rate_from_coupling(scenario: Scenario, gains: LinkGains, model: EstimatorModel,
                       coupling_abs2: float) -> RateBreakdown:
    """Closed-form rate bound evaluated directly at x = |coupling|^2.

    Sums the signal/leakage/noise expressions term by term at the given x;
    :func:`snr_quadratic` reaches the same SNR through its coefficients, so
    the two routes check each other.
    """
    x = float(coupling_abs2)
    x_max = float(scenario.n) ** 2
    if not 0.0 <= x <= x_max * (1.0 + 1e-9):
        raise ValueError("coupling power must lie in [0, n^2]")
    x = min(x, x_max)  # forgive rounding overshoot from synthesized phases
    noise_p = _noise_term(scenario, gains, model, x)
    signal_p = noise_p * noise_p
    leak_p = _leakage_term(scenario, gains, model, x)
    p, sigma2 = scenario.p_mw, scenario.sigma2_mw
    snr = p * signal_p / (p * leak_p + sigma2 * noise_p)
    rate = scenario.prefactor * math.log1p(snr) / _LN2
    return RateBreakdown(x, signal_p, leak_p, noise_p, snr, rate)


def rate_lower_bound(scenario: Scenario, gains: LinkGains, model: EstimatorModel,
                     phases: PhaseShifts) -> RateBreakdown:
    """Closed-form rate bound at the given phase configuration."""
    coupling = los_coupling(phases, user_ris_los(scenario), ris_departure_steer(scenario))
    return rate_from_coupling(scenario, gains, model, abs(coupling) ** 2)


@dataclass(frozen=True)
class SnrQuadratic:
    """SNR as a function of x = |coupling|^2: (a*x+b)^2 / (c*x+d).

    ``x_stationary`` is the sign-change point of the SNR derivative (always
    a minimum when it exists); it is None when the coefficients carry no x
    dependence, which happens exactly when either Rician factor is zero.
    """

    num_slope: float
    num_level: float
    den_slope: float
    den_level: float
    x_stationary: float | None

    @property
    def degenerate(self) -> bool:
        return self.x_stationary is None

    def snr_at(self, x: float) -> float:
        num = self.num_slope * x + self.num_level
        return num * num / (self.den_slope * x + self.den_level)


def snr_quadratic(scenario: Scenario, gains: LinkGains,
                  model: EstimatorModel) -> SnrQuadratic:
    """Collect the SNR coefficients by their dependence on x = |coupling|^2.

    Assembled term by term at coefficient level, independently of the direct
    evaluation in :func:`rate_lower_bound`, so the two routes cross-check.
    """
    m, n = scenario.m, scenario.n
    dlt, eps = scenario.delta, scenario.epsilon
    c, g = gains.composite, gains.user_bs
    e1, e2, e3 = model.eff_lin, model.eff_dir, model.eff_sq
    rho = model.noise_ratio
    noise_over_p = scenario.sigma2_mw / scenario.p_mw

    num_slope = m * c * dlt * eps
    num_level = m * (n * c * dlt * e2 + (n * c * (eps + 1.0) + g) * e1)

    den_slope = m * c * c * dlt * eps * (
        n * (m * dlt + eps + 1.0) * (e2 * e2 + 1.0)
        + 2.0 * (m * e1 + e2) * (e2 + 1.0))
    den_slope += m * c * dlt * eps * (g + (g + rho) * e2 * e2)
    den_slope += noise_over_p * num_slope

    den_level = m * m * n * n * c * c * dlt * dlt * e2 * e2
    den_level += m * n * n * c * c * (2.0 * dlt * (eps + 1.0) * e2 * e2
                                      + (eps + 1.0) ** 2 * e3)
    den_level += m * m * n * c * c * ((2.0 * eps + 1.0) * e1 * e1 + 2.0 * dlt * e1 * e2)
    den_level += m * n * c * (c * (2.0 * dlt * e2 * e2 + (2.0 * eps + 1.0) * e3)
                              + (2.0 * g + rho) * (dlt * e2 * e2 + (eps + 1.0) * e3))
    den_level += m * g * (g + rho) * e3
    den_level += noise_over_p * num_level

    if num_slope == 0.0 or den_slope == 0.0:
        x_stat = None
    else:
        x_stat = (num_level * den_slope - 2.0 * num_slope * den_level) / (num_slope * den_slope)
    return SnrQuadratic(num_slope, num_level, den_slope, den_level, x_stat)


@dataclass(frozen=True)
class EmpiricalRate:
    """Monte-Carlo rate bound with a percentile-bootstrap interval."""

    rate: float
    ci_low: float
    ci_high: float
    trials: int
    signal_power: float
    leakage_power: float
    noise_power: float


def _rate_from_moments(scenario: Scenario, means: np.ndarray) -> np.ndarray:
    """Rate statistic from (..., 4) mean columns (Re z, Im z, |z|^2, energy)."""
    means = np.asarray(means, dtype=np.float64)
    signal = means[..., 0] ** 2 + means[..., 1] ** 2
    leak = np.maximum(means[..., 2] - signal, 0.0)
    noise = means[..., 3]
    p, sigma2 = scenario.p_mw, scenario.sigma2_mw
    snr = p * signal / (p * leak + sigma2 * noise)
    return scenario.prefactor * np.log1p(snr) / _LN2


def empirical_rate_bound(scenario: Scenario, gains: LinkGains, model: EstimatorModel,
                         phases: PhaseShifts, mc: McConfig) -> EmpiricalRate:
    """Measure the rate bound from joint channel and pilot-noise draws.

    Each trial draws fresh channels and fresh pilot noise (no conditioning
    shortcuts) and records the estimate/channel correlation and the estimate
    energy; the bound is formed from their sample moments.
    """
    if mc.trials < 1000:
        raise ValueError("at least 1000 trials are needed for a stable rate estimate")
    los = los_components(scenario)

    def per_trial(index: int, rng: np.random.Generator) -> np.ndarray:
        sample = sample_channels(scenario, gains, phases, rng, los=los)
        obs = observe(sample, scenario, rng)
        est = lmmse_estimate(model, obs)
        corr = np.vdot(est, sample.overall)
        energy = float(np.vdot(est, est).real)
        return np.array([corr.real, corr.imag, abs(corr) ** 2, energy])

    rows = collect_trials(mc, per_trial)
    means = rows.mean(axis=0)
    rate = float(_rate_from_moments(scenario, means))
    low, high = bootstrap_stat_ci(rows, lambda mm: _rate_from_moments(scenario, mm), mc)
    signal = float(means[0] ** 2 + means[1] ** 2)
    return EmpiricalRate(rate, low, high, mc.trials, signal,
                         float(max(means[2] - signal, 0.0)), float(means[3]))


@dataclass(frozen=True)
class ScalingLimit:
    """Limiting rate under a power-scaling law.

    ``log2_arg`` is the argument of the log2 in the limit expression; it is
    free of the pilot length, unlike the rate with its overhead prefactor.
    """

    rate: float
    log2_arg: float


def rate_limit_scaling_n2(scenario: Scenario, gains: LinkGains,
                          e_u_mw: float) -> ScalingLimit:
    """Limit rate when transmit power shrinks as e_u / n^2.

    Holds only with deterministic components on both RIS links (both Rician
    factors positive); the limit does not depend on n or the pilot length.
    """
    if scenario.delta <= 0.0 or scenario.epsilon <= 0.0:
        raise ScalingLawError("1/n^2 power scaling requires strictly positive Rician factors")
    snr = (e_u_mw / scenario.sigma2_mw) * scenario.m * (
        gains.ris_bs * gains.user_ris * scenario.delta * scenario.epsilon
        / ((scenario.delta + 1.0) * (scenario.epsilon + 1.0)))
    arg = 1.0 + snr
    return ScalingLimit(scenario.prefactor * math.log2(arg), arg)


def rate_limit_rayleigh_n(scenario: Scenario, gains: LinkGains,
                          e_u_mw: float) -> ScalingLimit:
    """Limit rate for fully scattered RIS links when power shrinks as e_u / n.

    The limit drops the +1 inside the log, so it is meaningful (and a tight
    approximation) only where the limiting SNR is large.
    """
    if scenario.delta != 0.0 or scenario.epsilon != 0.0:
        raise ScalingLawError("1/n power scaling requires fully Rayleigh RIS links")
    ba = gains.ris_bs * gains.user_ris
    sigma2 = scenario.sigma2_mw
    tau = scenario.tau
    arg = e_u_mw * scenario.m * ba / (
        e_u_mw * ba + sigma2 / tau + sigma2 * (1.0 + sigma2 / (tau * e_u_mw * ba)))
    return ScalingLimit(scenario.prefactor * math.log2(arg), arg)
