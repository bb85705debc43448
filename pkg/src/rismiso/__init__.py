"""RIS-aided uplink MISO link: channel model, estimation, rate analysis.

The package is organized bottom-up: `channel` (geometry, path loss, Rician
sampling), `estimation` (pilot observation and the affine estimator),
`rate` (closed-form rate bound, its quadratic SNR form, scaling limits, and
the Monte-Carlo oracle), `phases` (statistical phase design), `montecarlo`
(reproducible trial engine), and `experiments`/`cli` (the runnable studies).
"""

__version__ = "0.1.0"

from .channel import (ArrayAngles, ChannelSample, GeometryError, LinkGains,
                      PhaseShifts, Scenario, dbm_to_linear, linear_to_dbm,
                      link_gains, los_components, overall_channel,
                      sample_channels, steering_vector)
from .estimation import (EstimationError, EstimatorModel, Observation,
                         build_estimator, lmmse_estimate, ls_estimate,
                         mse_trace_closed_form, nmse_closed_form, observe)
from .montecarlo import McConfig, McSummary, collect_trials, run_trials, trial_rng
from .phases import (PhaseDecision, PhaseSynthesisError, optimize_phases,
                     synthesize_align, synthesize_null)
from .rate import (EmpiricalRate, RateBreakdown, ScalingLawError, ScalingLimit,
                   SnrQuadratic, empirical_rate_bound, los_coupling,
                   rate_from_coupling, rate_limit_rayleigh_n,
                   rate_limit_scaling_n2, rate_lower_bound, snr_quadratic)

__all__ = [
    "ArrayAngles", "ChannelSample", "GeometryError", "LinkGains", "PhaseShifts",
    "Scenario", "dbm_to_linear", "linear_to_dbm", "link_gains", "los_components",
    "overall_channel", "sample_channels", "steering_vector",
    "EstimationError", "EstimatorModel", "Observation", "build_estimator",
    "lmmse_estimate", "ls_estimate", "mse_trace_closed_form", "nmse_closed_form",
    "observe",
    "McConfig", "McSummary", "collect_trials", "run_trials", "trial_rng",
    "PhaseDecision", "PhaseSynthesisError", "optimize_phases", "synthesize_align",
    "synthesize_null",
    "EmpiricalRate", "RateBreakdown", "ScalingLawError", "ScalingLimit",
    "SnrQuadratic", "empirical_rate_bound", "los_coupling", "rate_from_coupling",
    "rate_limit_rayleigh_n", "rate_limit_scaling_n2", "rate_lower_bound",
    "snr_quadratic",
    "__version__",
]
