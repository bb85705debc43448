"""Experiment configuration: defaults, YAML loading, strict validation.

Configs are plain nested mappings; unknown keys are rejected everywhere so a
typo never silently reverts to a default.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from pathlib import Path

import yaml

from .channel import ArrayAngles, Scenario
from .montecarlo import McConfig

EXPERIMENTS = ("nmse-sweep", "stat-vs-inst", "power-scaling", "validate")

DEFAULT_SWEEPS = {
    "nmse-sweep": (16, 36, 64, 100, 144, 196, 256),
    "stat-vs-inst": (16, 36, 64, 100, 144, 169),
    "power-scaling": (16, 36, 64, 144, 256, 576, 1024),
    "validate": (),
}

DEFAULT_TRIALS = {
    "nmse-sweep": 5000,
    "stat-vs-inst": 200,
    "power-scaling": 1,
    "validate": 100000,
}

# validate runs at a small size so Monte-Carlo tolerances are tight.
_VALIDATE_SCENARIO = {"m": 4, "n": 4}

_SCENARIO_KEYS = {f.name for f in fields(Scenario)}
_ANGLE_KEYS = {f.name for f in fields(ArrayAngles)}
_MC_KEYS = {f.name for f in fields(McConfig)}
_SWEEP_KEYS = {"variable", "values"}
_TOP_KEYS = {"experiment", "scenario", "sweep", "mc", "power_scaling", "output"}
_POWER_KEYS = {"e_u_dbm"}


class ConfigError(ValueError):
    """Raised for unreadable, unknown, or inconsistent configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    scenario: Scenario
    mc: McConfig
    sweep_variable: str = "n"
    sweep_values: tuple[int, ...] = ()
    e_u_dbm: float = 20.0
    output: str | None = None

    def to_dict(self) -> dict:
        """Fully resolved configuration as plain built-in types."""
        angles = self.scenario.angles
        return {
            "experiment": self.experiment,
            "scenario": {
                "m": int(self.scenario.m),
                "n": int(self.scenario.n),
                "p_dbm": float(self.scenario.p_dbm),
                "sigma2_dbm": float(self.scenario.sigma2_dbm),
                "tau": int(self.scenario.tau),
                "tau_c": int(self.scenario.tau_c),
                "delta": float(self.scenario.delta),
                "epsilon": float(self.scenario.epsilon),
                "d_ui": float(self.scenario.d_ui),
                "d_ib": float(self.scenario.d_ib),
                "geometry_angle": float(self.scenario.geometry_angle),
                "pathloss_exponents": [float(v) for v in self.scenario.pathloss_exponents],
                "pathloss_ref": float(self.scenario.pathloss_ref),
                "spacing_ratio": float(self.scenario.spacing_ratio),
                "seed": int(self.scenario.seed),
                "angles": {k: float(getattr(angles, k)) for k in sorted(_ANGLE_KEYS)},
            },
            "sweep": {"variable": self.sweep_variable, "values": [int(v) for v in self.sweep_values]},
            "mc": {
                "trials": int(self.mc.trials),
                "seed": int(self.mc.seed),
                "parallelism": int(self.mc.parallelism),
                "ci_level": float(self.mc.ci_level),
                "bootstrap_resamples": int(self.mc.bootstrap_resamples),
            },
            "power_scaling": {"e_u_dbm": float(self.e_u_dbm)},
            "output": self.output,
        }


def _check_keys(mapping: dict, allowed: set[str], where: str) -> None:
    unknown = sorted(set(mapping) - allowed)
    if unknown:
        raise ConfigError(f"unknown {where} key(s): {', '.join(unknown)}")


def _is_square(value: int) -> bool:
    root = math.isqrt(int(value))
    return root * root == value


def from_dict(data: dict, experiment: str | None = None) -> ExperimentConfig:
    """Build a config from a nested mapping, applying per-experiment defaults."""
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a mapping")
    _check_keys(data, _TOP_KEYS, "top-level")

    name = data.get("experiment", experiment)
    if name is None:
        raise ConfigError("no experiment named (config key 'experiment' or CLI subcommand)")
    if name not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {name!r}; expected one of {', '.join(EXPERIMENTS)}")
    if experiment is not None and name != experiment:
        raise ConfigError(f"config names experiment {name!r} but {experiment!r} was requested")

    scenario_data = dict(data.get("scenario") or {})
    _check_keys(scenario_data, _SCENARIO_KEYS, "scenario")
    if name == "validate":
        for key, value in _VALIDATE_SCENARIO.items():
            scenario_data.setdefault(key, value)
    angles_data = scenario_data.pop("angles", None)
    if angles_data is not None:
        if not isinstance(angles_data, dict):
            raise ConfigError("scenario.angles must be a mapping of the six angles")
        _check_keys(angles_data, _ANGLE_KEYS, "scenario.angles")
        missing = sorted(_ANGLE_KEYS - set(angles_data))
        if missing:
            raise ConfigError(f"scenario.angles is missing: {', '.join(missing)}")
        scenario_data["angles"] = ArrayAngles(**{k: float(v) for k, v in angles_data.items()})
    if "pathloss_exponents" in scenario_data:
        exps = scenario_data["pathloss_exponents"]
        if not isinstance(exps, (list, tuple)) or len(exps) != 3:
            raise ConfigError("scenario.pathloss_exponents must be a list of three numbers")
        scenario_data["pathloss_exponents"] = tuple(float(v) for v in exps)
    try:
        scenario = Scenario(**scenario_data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid scenario: {exc}") from exc

    mc_data = dict(data.get("mc") or {})
    _check_keys(mc_data, _MC_KEYS, "mc")
    mc_data.setdefault("trials", DEFAULT_TRIALS[name])
    mc_data.setdefault("seed", scenario.seed)
    try:
        mc = McConfig(**mc_data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid mc settings: {exc}") from exc

    sweep_data = dict(data.get("sweep") or {})
    _check_keys(sweep_data, _SWEEP_KEYS, "sweep")
    variable = sweep_data.get("variable", "n")
    if variable != "n":
        raise ConfigError(f"unsupported sweep variable {variable!r}; only 'n' is swept")
    values = sweep_data.get("values", DEFAULT_SWEEPS[name])
    values = tuple(int(v) for v in values)
    for value in values:
        if value < 1:
            raise ConfigError(f"sweep value {value} is not a positive integer")
        if not _is_square(value):
            raise ConfigError(f"sweep value {value} is not a perfect square")
    if name != "validate" and not values:
        raise ConfigError(f"experiment {name!r} needs at least one sweep value")

    power_data = dict(data.get("power_scaling") or {})
    _check_keys(power_data, _POWER_KEYS, "power_scaling")
    e_u_dbm = float(power_data.get("e_u_dbm", 20.0))
    if name == "power-scaling" and (scenario.delta <= 0.0 or scenario.epsilon <= 0.0):
        raise ConfigError("power-scaling needs positive Rician factors in the base scenario")

    output = data.get("output")
    return ExperimentConfig(name, scenario, mc, variable, values, e_u_dbm,
                            None if output is None else str(output))


def load_file(path: str | Path) -> dict:
    """Read a YAML config file into a mapping."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config file {path}: {exc}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must contain a mapping")
    return data


def apply_overrides(data: dict, *, seed: int | None = None, trials: int | None = None,
                    parallelism: int | None = None, sweep: str | None = None,
                    output: str | None = None) -> dict:
    """Overlay CLI flags onto a config mapping (flags win over file values)."""
    merged = {key: (dict(value) if isinstance(value, dict) else value)
              for key, value in data.items()}
    if seed is not None:
        merged.setdefault("scenario", {})["seed"] = seed
        merged.setdefault("mc", {})["seed"] = seed
    if trials is not None:
        merged.setdefault("mc", {})["trials"] = trials
    if parallelism is not None:
        merged.setdefault("mc", {})["parallelism"] = parallelism
    if sweep is not None:
        var, _, raw = sweep.partition("=")
        if not raw:
            raise ConfigError("--sweep expects VAR=V1,V2,...")
        try:
            values = [int(v) for v in raw.split(",") if v]
        except ValueError as exc:
            raise ConfigError(f"bad sweep values in {sweep!r}") from exc
        merged["sweep"] = {"variable": var, "values": values}
    if output is not None:
        merged["output"] = output
    return merged
