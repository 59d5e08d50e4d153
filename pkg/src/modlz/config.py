"""Scenario configuration: schema, defaults, file loading, validation.

The interface is dimensionless-first: windows are given as nu*tau_c,
damping rates as gamma/nu, matching how results are naturally quoted
for this model.  Absolute eta and nu (inverse-time units) fix the scale
when one is needed.  A flat TOML file can predefine any key; command
line flags override file values; unknown keys are rejected rather than
ignored so typos cannot silently change a run.
"""

import math
from dataclasses import dataclass, fields, replace

try:
    import tomllib
except ModuleNotFoundError:  # python 3.10
    import tomli as tomllib

from .model import make_params
from .oracle import TOL_RANGE

SCENARIOS = ("fields", "levels", "exact", "oracle", "transitions",
             "dephasing", "spinflip", "sweep", "verify")
SWEEP_AXES = ("tau_c", "gamma", "eta_over_nu")
NOISE_KINDS = ("dephasing", "spinflip")
FORMATS = ("csv", "json")

DEFAULT_NU_TAU_C = 10 * math.pi


@dataclass(frozen=True)
class ScenarioConfig:
    """One validated run description; build through build_config."""

    scenario: str
    eta: float = 1.0
    nu: float = 0.8
    j: float = 0.5
    nu_tau_c: float = DEFAULT_NU_TAU_C
    points: int = 2001
    tol: float = 1e-10
    m: float | None = None          # initial level; None means +j
    gamma_x: float | None = None    # rates as gamma/nu ratios
    gamma_y: float | None = None
    gamma_z: float | None = None
    gamma: float | None = None      # isotropic shorthand
    axis: str | None = None         # sweep only
    values: tuple | None = None     # sweep only
    noise: str | None = None        # channel for gamma sweeps
    out: str | None = None
    format: str = "csv"

    @property
    def tau_c(self):
        """Half-window in absolute time units."""
        return self.nu_tau_c / self.nu

    @property
    def initial_level(self):
        return self.j if self.m is None else self.m


_FLOAT_KEYS = {"eta", "nu", "j", "nu_tau_c", "tau_c", "tol", "m",
               "gamma_x", "gamma_y", "gamma_z", "gamma"}
_KNOWN_KEYS = {f.name for f in fields(ScenarioConfig)} | {"tau_c"}


class ConfigError(ValueError):
    """Invalid or inconsistent scenario configuration."""


def load_config_file(path):
    """Read a flat TOML config file, rejecting unknown keys."""
    with open(path, "rb") as fh:
        try:
            data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from exc
    unknown = sorted(set(data) - _KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    return data


def _coerce(key, value):
    if value is None:
        return None
    if key in _FLOAT_KEYS:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key} must be a number, got {value!r}")
        return float(value)
    if key == "points":
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"points must be an integer, got {value!r}")
        return value
    if key == "values":
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"values must be a list, got {value!r}")
        out = []
        for x in value:
            if isinstance(x, bool) or not isinstance(x, (int, float)):
                raise ConfigError(f"sweep values must be numbers, got {x!r}")
            out.append(float(x))
        return tuple(out)
    if key in ("scenario", "axis", "noise", "out", "format"):
        if not isinstance(value, str):
            raise ConfigError(f"{key} must be a string, got {value!r}")
        return value
    raise ConfigError(f"unknown config key: {key}")


def build_config(scenario, file_values=None, overrides=None):
    """Merge defaults, config-file values, and explicit overrides.

    Overrides (typically parsed CLI flags) win over the file; the file
    wins over defaults.  `tau_c` (absolute) and `nu_tau_c`
    (dimensionless) are alternative spellings of the window; giving
    both is an error.
    """
    merged = {}
    for layer in (file_values or {}, overrides or {}):
        for key, value in layer.items():
            if value is None:
                continue
            if key not in _KNOWN_KEYS:
                raise ConfigError(f"unknown config key(s): {key}")
            merged[key] = _coerce(key, value)

    if "tau_c" in merged and "nu_tau_c" in merged:
        raise ConfigError("give either tau_c or nu_tau_c, not both")

    file_scenario = merged.pop("scenario", None)
    scenario = _resolve_scenario(scenario, file_scenario)

    tau_c = merged.pop("tau_c", None)
    cfg = ScenarioConfig(scenario=scenario, **merged)
    if tau_c is not None:
        if tau_c <= 0:
            raise ConfigError("tau_c must be positive")
        cfg = replace(cfg, nu_tau_c=cfg.nu * tau_c)
    return validate_config(cfg)


def _resolve_scenario(requested, from_file):
    """Reconcile the subcommand's scenario family with a file's scenario."""
    if from_file is None:
        return requested
    families = {
        "oracle": ("oracle", "exact"),
        "exact": ("oracle", "exact"),
        "dephasing": NOISE_KINDS,
        "spinflip": NOISE_KINDS,
    }
    allowed = families.get(requested, (requested,))
    if from_file not in allowed:
        raise ConfigError(
            f"config file scenario {from_file!r} does not match the "
            f"requested command ({requested!r})")
    return from_file


def validate_config(cfg):
    if cfg.scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {cfg.scenario!r}; expected one "
                          f"of {', '.join(SCENARIOS)}")
    try:
        params = make_params(cfg.eta, cfg.nu, cfg.j)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if not cfg.nu_tau_c > 0:
        raise ConfigError("nu_tau_c must be positive")
    if cfg.points < 2:
        raise ConfigError("points must be at least 2")
    if not (TOL_RANGE[0] <= cfg.tol <= TOL_RANGE[1]):
        raise ConfigError(f"tol must lie in [{TOL_RANGE[0]:g}, "
                          f"{TOL_RANGE[1]:g}]")
    if cfg.format not in FORMATS:
        raise ConfigError(f"format must be one of {', '.join(FORMATS)}")
    if cfg.m is not None:
        two_m = round(2 * cfg.m)
        if abs(2 * cfg.m - two_m) > 1e-9 or abs(cfg.m) > params.j + 1e-9 \
                or (round(2 * params.j) - two_m) % 2 != 0:
            raise ConfigError(f"m = {cfg.m} is not a level of the "
                              f"spin-{params.j} multiplet")
    for key in ("gamma_x", "gamma_y", "gamma_z", "gamma"):
        value = getattr(cfg, key)
        if value is not None and value < 0:
            raise ConfigError(f"{key} must be non-negative")
    if cfg.scenario == "sweep":
        if cfg.axis is None:
            raise ConfigError("sweep requires an axis "
                              f"(one of {', '.join(SWEEP_AXES)})")
        if cfg.axis not in SWEEP_AXES:
            raise ConfigError(f"invalid sweep axis {cfg.axis!r}; expected "
                              f"one of {', '.join(SWEEP_AXES)}")
        if cfg.values is None:
            raise ConfigError("sweep requires values (possibly empty)")
    if cfg.noise is not None and cfg.noise not in NOISE_KINDS:
        raise ConfigError(f"noise must be one of {', '.join(NOISE_KINDS)}")
    return cfg


def config_meta(cfg, engine_version):
    """Flat metadata dict recording the fully resolved configuration."""
    params = make_params(cfg.eta, cfg.nu, cfg.j)
    meta = {
        "engine": "modlz",
        "engine_version": engine_version,
        "scenario": cfg.scenario,
        "eta": cfg.eta,
        "nu": cfg.nu,
        "j": cfg.j,
        "kappa": params.kappa,
        "nu_tau_c": cfg.nu_tau_c,
        "points": cfg.points,
        "tol": cfg.tol,
    }
    if cfg.scenario in ("oracle", "exact", "transitions"):
        meta["m"] = cfg.initial_level
    for key in ("gamma_x", "gamma_y", "gamma_z", "gamma"):
        value = getattr(cfg, key)
        if value is not None:
            meta[key] = value
    if cfg.scenario == "sweep":
        meta["axis"] = cfg.axis
        meta["values"] = list(cfg.values)
        meta["noise"] = cfg.noise or "spinflip"
    return meta


def config_from_meta(meta):
    """Rebuild a ScenarioConfig from a dataset metadata block."""
    drop = {"engine", "engine_version", "kappa"}
    kwargs = {k: v for k, v in meta.items() if k not in drop}
    scenario = kwargs.pop("scenario")
    if "values" in kwargs:
        kwargs["values"] = tuple(float(x) for x in kwargs["values"])
    return validate_config(ScenarioConfig(scenario=scenario, **kwargs))
