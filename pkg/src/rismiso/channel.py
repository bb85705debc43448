"""Channel geometry, path loss, and Rician fading for an RIS-aided uplink.

A single-antenna user transmits to an M-antenna base station, directly
(Rayleigh link) and through an N-element reflecting surface (Rician links
on both hops). All powers are linear milliwatts internally; angles are
radians; distances are meters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi

# Sub-stream id used to derive the per-scenario angle draw from the seed.
_ANGLE_STREAM = 101


class GeometryError(ValueError):
    """Raised for array sizes or spacings the planar-array model rejects."""


def dbm_to_linear(value_dbm: float) -> float:
    """dBm to linear milliwatts."""
    return 10.0 ** (value_dbm / 10.0)


def linear_to_dbm(value_mw: float) -> float:
    """Linear milliwatts to dBm."""
    if value_mw <= 0.0:
        raise ValueError("power must be positive to express in dBm")
    return 10.0 * math.log10(value_mw)


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """Unit-variance circularly-symmetric complex Gaussians.

    Real and imaginary parts are each N(0, 1/2) so the total variance per
    entry is 1.
    """
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


def steering_vector(count: int, azimuth: float, elevation: float,
                    spacing_ratio: float) -> np.ndarray:
    """Response of a square planar array with ``count`` elements.

    Element x (1-based) sits at grid position (floor((x-1)/side), (x-1) mod
    side) with side = sqrt(count) and contributes phase
    2*pi*spacing_ratio*(row*sin(el)*sin(az) + col*cos(el)). Every entry has
    unit modulus. Non-square counts are accepted (side is then irrational,
    the grid indices fractional); the second-order analysis downstream only
    relies on unit modulus and total norm, so it stays valid.
    """
    if int(count) != count or count < 1:
        raise GeometryError(f"element count must be a positive integer, got {count!r}")
    if spacing_ratio <= 0.0:
        raise GeometryError(f"element spacing ratio must be positive, got {spacing_ratio!r}")
    root = math.isqrt(int(count))
    side = float(root) if root * root == count else math.sqrt(count)
    idx = np.arange(count, dtype=np.float64)
    rows = np.floor(idx / side)
    cols = idx - rows * side
    phase = TWO_PI * spacing_ratio * (
        rows * math.sin(elevation) * math.sin(azimuth) + cols * math.cos(elevation)
    )
    return np.exp(1j * phase)


@dataclass(frozen=True)
class ArrayAngles:
    """The six azimuth/elevation angles of the deterministic link components.

    ``user_ris_*``: arrival at the RIS from the user; ``ris_bs_dep_*``:
    departure from the RIS toward the BS; ``ris_bs_arr_*``: arrival at the
    BS from the RIS.
    """

    user_ris_az: float
    user_ris_el: float
    ris_bs_dep_az: float
    ris_bs_dep_el: float
    ris_bs_arr_az: float
    ris_bs_arr_el: float

    @classmethod
    def from_seed(cls, seed: int) -> "ArrayAngles":
        """Fixed angle set drawn once: azimuths U[0, 2pi), elevations U[0, pi).

        Draw order is (user_ris, ris_bs_dep, ris_bs_arr), azimuths first.
        """
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(_ANGLE_STREAM,)))
        az = rng.uniform(0.0, TWO_PI, size=3)
        el = rng.uniform(0.0, math.pi, size=3)
        return cls(az[0], el[0], az[1], el[1], az[2], el[2])


@dataclass(frozen=True)
class Scenario:
    """All deterministic parameters of one simulated link setup.

    ``m`` (BS antennas) and ``n`` (RIS elements) are meant to be perfect
    squares so the planar arrays have integer grids; other positive counts
    are accepted for analytical studies. When ``angles`` is omitted, a fixed
    set is derived from ``seed``.
    """

    m: int = 64
    n: int = 64
    p_dbm: float = 30.0
    sigma2_dbm: float = -104.0
    tau: int = 1
    tau_c: int = 196
    delta: float = 1.0
    epsilon: float = 10.0
    d_ui: float = 20.0
    d_ib: float = 700.0
    geometry_angle: float = math.pi / 5.0
    pathloss_exponents: tuple[float, float, float] = (2.0, 2.5, 4.0)
    pathloss_ref: float = 1e-3
    spacing_ratio: float = 0.5
    seed: int = 1
    angles: ArrayAngles | None = None

    def __post_init__(self) -> None:
        for name in ("m", "n", "tau", "tau_c", "seed"):
            value = getattr(self, name)
            if int(value) != value:
                raise ValueError(f"{name} must be an integer, got {value!r}")
        if self.m < 1 or self.n < 1:
            raise ValueError("antenna and element counts must be positive")
        if self.tau < 1:
            raise ValueError("pilot length tau must be >= 1")
        if self.tau_c <= self.tau:
            raise ValueError("coherence interval tau_c must exceed tau")
        if self.delta < 0.0 or self.epsilon < 0.0:
            raise ValueError("Rician factors must be nonnegative")
        if self.d_ui <= 0.0 or self.d_ib <= 0.0:
            raise ValueError("distances must be positive")
        if self.spacing_ratio <= 0.0:
            raise ValueError("spacing ratio must be positive")
        if self.pathloss_ref <= 0.0:
            raise ValueError("path-loss reference gain must be positive")
        if len(self.pathloss_exponents) != 3:
            raise ValueError("pathloss_exponents must be a (user-RIS, RIS-BS, user-BS) triple")
        if self.angles is None:
            object.__setattr__(self, "angles", ArrayAngles.from_seed(self.seed))

    @property
    def p_mw(self) -> float:
        return dbm_to_linear(self.p_dbm)

    @property
    def sigma2_mw(self) -> float:
        return dbm_to_linear(self.sigma2_dbm)

    @property
    def noise_ratio(self) -> float:
        """Per-antenna noise variance of the despread pilot observation."""
        return self.sigma2_mw / (self.tau * self.p_mw)

    @property
    def prefactor(self) -> float:
        """Fraction of the coherence interval left for data."""
        return (self.tau_c - self.tau) / self.tau_c


@dataclass(frozen=True)
class LinkGains:
    """Large-scale power gains of the three links plus the cascade composite."""

    user_ris: float
    ris_bs: float
    user_bs: float
    composite: float  # ris_bs * user_ris / ((delta+1) * (epsilon+1))

    def __post_init__(self) -> None:
        if min(self.user_ris, self.ris_bs, self.user_bs, self.composite) <= 0.0:
            raise ValueError("link gains must be strictly positive")


def user_bs_distance(scenario: Scenario) -> float:
    """User-BS distance from the user offset geometry."""
    along = scenario.d_ib - scenario.d_ui * math.sin(scenario.geometry_angle)
    across = scenario.d_ui * math.cos(scenario.geometry_angle)
    return math.hypot(along, across)


def link_gains(scenario: Scenario) -> LinkGains:
    """Power-law path losses for the three links."""
    e_ui, e_ib, e_ub = scenario.pathloss_exponents
    ref = scenario.pathloss_ref
    user_ris = ref * scenario.d_ui ** (-e_ui)
    ris_bs = ref * scenario.d_ib ** (-e_ib)
    user_bs = ref * user_bs_distance(scenario) ** (-e_ub)
    composite = ris_bs * user_ris / ((scenario.delta + 1.0) * (scenario.epsilon + 1.0))
    return LinkGains(user_ris, ris_bs, user_bs, composite)


def user_ris_los(scenario: Scenario) -> np.ndarray:
    """Deterministic user-to-RIS component (length n, unit-modulus entries)."""
    a = scenario.angles
    return steering_vector(scenario.n, a.user_ris_az, a.user_ris_el, scenario.spacing_ratio)


def ris_departure_steer(scenario: Scenario) -> np.ndarray:
    """RIS-side response toward the BS (length n)."""
    a = scenario.angles
    return steering_vector(scenario.n, a.ris_bs_dep_az, a.ris_bs_dep_el, scenario.spacing_ratio)


def bs_arrival_steer(scenario: Scenario) -> np.ndarray:
    """BS-side response from the RIS (length m)."""
    a = scenario.angles
    return steering_vector(scenario.m, a.ris_bs_arr_az, a.ris_bs_arr_el, scenario.spacing_ratio)


def los_components(scenario: Scenario) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic parts of the user-RIS vector and the RIS-BS matrix.

    The matrix is the rank-one outer product of the BS arrival response and
    the conjugated RIS departure response.
    """
    h_los = user_ris_los(scenario)
    big_los = np.outer(bs_arrival_steer(scenario), np.conj(ris_departure_steer(scenario)))
    return h_los, big_los


@dataclass(frozen=True)
class PhaseShifts:
    """Per-element reflection phases, stored canonically in [0, 2pi)."""

    theta: np.ndarray

    def __post_init__(self) -> None:
        arr = np.mod(np.asarray(self.theta, dtype=np.float64), TWO_PI)
        arr.setflags(write=False)
        object.__setattr__(self, "theta", arr)

    def __len__(self) -> int:
        return self.theta.shape[0]

    def unit(self) -> np.ndarray:
        """Diagonal entries exp(j*theta) of the reflection matrix."""
        return np.exp(1j * self.theta)

    @classmethod
    def zeros(cls, n: int) -> "PhaseShifts":
        return cls(np.zeros(n))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "PhaseShifts":
        return cls(rng.uniform(0.0, TWO_PI, size=n))


@dataclass(frozen=True)
class ChannelSample:
    """One random channel realization plus its derived combined vectors.

    ``cascaded`` and ``overall`` are consistent with the phases passed to
    :func:`sample_channels`; use :func:`overall_channel` for other phases.
    """

    direct: np.ndarray    # user-BS, length m
    user_ris: np.ndarray  # user-RIS, length n
    ris_bs: np.ndarray    # RIS-BS, m x n
    cascaded: np.ndarray  # ris_bs @ diag(exp(j theta)) @ user_ris
    overall: np.ndarray   # cascaded + direct


def sample_channels(scenario: Scenario, gains: LinkGains, phases: PhaseShifts,
                    rng: np.random.Generator,
                    los: tuple[np.ndarray, np.ndarray] | None = None) -> ChannelSample:
    """Draw one channel realization.

    The direct link is Rayleigh; the two RIS links mix their deterministic
    components with unit-variance complex Gaussian scatter according to the
    Rician factors. Draw order (direct, user-RIS, RIS-BS) is fixed so a
    given generator state reproduces the sample bit-exactly.
    """
    if los is None:
        los = los_components(scenario)
    h_los, big_los = los
    eps, dlt = scenario.epsilon, scenario.delta
    direct = math.sqrt(gains.user_bs) * complex_normal(rng, scenario.m)
    user_ris = math.sqrt(gains.user_ris / (eps + 1.0)) * (
        math.sqrt(eps) * h_los + complex_normal(rng, scenario.n))
    ris_bs = math.sqrt(gains.ris_bs / (dlt + 1.0)) * (
        math.sqrt(dlt) * big_los + complex_normal(rng, (scenario.m, scenario.n)))
    cascaded = ris_bs @ (phases.unit() * user_ris)
    return ChannelSample(direct, user_ris, ris_bs, cascaded, cascaded + direct)


def overall_channel(sample: ChannelSample, phases: PhaseShifts) -> np.ndarray:
    """Combined BS-side vector of this realization under arbitrary phases."""
    if len(phases) != sample.user_ris.shape[0]:
        raise ValueError("phase vector length does not match the RIS element count")
    return sample.ris_bs @ (phases.unit() * sample.user_ris) + sample.direct
