"""Long-term phase-shift design from channel statistics.

The closed-form SNR depends on the phases only through x = |coupling|^2, a
ratio of a squared affine to an affine function of x whose stationary point
is a minimum. The optimum over [0, n^2] therefore always sits at an
endpoint: full alignment (x = n^2) or full cancellation (x = 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import (LinkGains, PhaseShifts, Scenario, ris_departure_steer,
                      user_ris_los)
from .estimation import EstimatorModel
from .rate import snr_quadratic

CASE_ALIGN = "align"
CASE_NULL = "null"
CASE_COMPARE = "compare"
CASE_ASYMPTOTIC_ALIGN = "asymptotic-align"  # reserved for explicit large-n reasoning
CASE_PHASE_IRRELEVANT = "phase-irrelevant"


class PhaseSynthesisError(ValueError):
    """Raised when a requested coupling magnitude cannot be synthesized."""


@dataclass(frozen=True)
class PhaseDecision:
    """Outcome of the statistical phase design."""

    case_id: str
    x_star: float
    phases: PhaseShifts
    achieved_snr: float


def synthesize_align(h_los: np.ndarray, dep_steer: np.ndarray) -> PhaseShifts:
    """Phases that make every coupling summand equal one: |coupling| = n."""
    return PhaseShifts(np.angle(dep_steer) - np.angle(h_los))


def synthesize_null(h_los: np.ndarray, dep_steer: np.ndarray) -> PhaseShifts:
    """Phases that cancel the coupling exactly: |coupling| = 0.

    Starts from the aligned phases and offsets element i by 2*pi*i/n, so the
    summands become the n-th roots of unity. A single element cannot cancel
    (|coupling| is identically one), hence n >= 2 is required.
    """
    n = h_los.shape[0]
    if n < 2:
        raise PhaseSynthesisError("coupling cannot be cancelled with a single element")
    offsets = 2.0 * math.pi * np.arange(n) / n
    return PhaseShifts(synthesize_align(h_los, dep_steer).theta + offsets)


def optimize_phases(scenario: Scenario, gains: LinkGains,
                    model: EstimatorModel) -> PhaseDecision:
    """Pick the SNR-optimal endpoint of x = |coupling|^2 and synthesize it."""
    quad = snr_quadratic(scenario, gains, model)
    h_los = user_ris_los(scenario)
    dep_steer = ris_departure_steer(scenario)
    aligned = synthesize_align(h_los, dep_steer)
    x_max = float(scenario.n) ** 2
    if scenario.n == 1:
        # |coupling| is identically one; any phase achieves the same SNR.
        return PhaseDecision(CASE_PHASE_IRRELEVANT, 1.0, aligned, quad.snr_at(1.0))
    if quad.degenerate:
        return PhaseDecision(CASE_PHASE_IRRELEVANT, x_max, aligned, quad.snr_at(x_max))
    if quad.x_stationary <= 0.0:
        return PhaseDecision(CASE_ALIGN, x_max, aligned, quad.snr_at(x_max))
    if quad.x_stationary >= x_max:
        return PhaseDecision(CASE_NULL, 0.0, synthesize_null(h_los, dep_steer),
                             quad.snr_at(0.0))
    snr_null = quad.snr_at(0.0)
    snr_align = quad.snr_at(x_max)
    if snr_align >= snr_null:
        return PhaseDecision(CASE_COMPARE, x_max, aligned, snr_align)
    return PhaseDecision(CASE_COMPARE, 0.0, synthesize_null(h_los, dep_steer), snr_null)
