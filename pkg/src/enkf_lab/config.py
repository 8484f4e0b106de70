"""Flat key-value configuration documents for the twin experiment.

One `key = value` per line, '#' comments, UTF-8.  Unknown keys are a hard
error (typos in sweep configs must not silently fall back to defaults);
missing keys take the experiment defaults.
"""

from __future__ import annotations

from dataclasses import replace

from .dynamics import Lorenz63Params
from .errors import ConfigError
from .experiments import TwinExperimentConfig

# key -> (kind, description).  Kinds drive parsing and serialization.
CONFIG_KEYS = {
    "truth_init": ("vector", "true initial state"),
    "guess_init": ("vector", "first-guess initial state"),
    "dt": ("float", "assimilation interval"),
    "steps": ("int", "number of assimilation steps"),
    "obs_noise_var": ("float", "observation noise variance (Gamma = var * I)"),
    "init_spread": ("float", "initial ensemble perturbation scale"),
    "ensemble_sizes": ("int_list", "ensemble sizes for the sweep"),
    "seeds": ("int_list", "seed population for the sweep"),
    "q_jitter": ("float", "additive covariance regularization q"),
    "process_noise_var": ("float", "process noise variance (Sigma = var * I)"),
    "substeps": ("int", "RK4 substeps per assimilation interval"),
    "trajectory_time": ("float", "horizon for the trajectory command"),
    "sigma": ("float", "Lorenz sigma parameter"),
    "r": ("float", "Lorenz r parameter"),
    "b": ("float", "Lorenz b parameter"),
}


def default_config() -> TwinExperimentConfig:
    return TwinExperimentConfig()


def _parse_value(kind: str, raw: str, key: str, line_no: int):
    try:
        if kind == "float":
            return float(raw)
        if kind == "int":
            return int(raw)
        if kind == "vector":
            return tuple(float(p) for p in raw.split(","))
        if kind == "int_list":
            return tuple(int(p) for p in raw.split(","))
    except ValueError:
        raise ConfigError(
            f"line {line_no}: malformed value for key '{key}': {raw!r}"
        ) from None
    raise AssertionError(f"unhandled kind {kind}")


def parse_config(text: str) -> TwinExperimentConfig:
    """Parse a config document, applying defaults for absent keys."""
    values = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {line_no}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"line {line_no}: unknown key '{key}'")
        if key in values:
            raise ConfigError(f"line {line_no}: duplicate key '{key}'")
        values[key] = _parse_value(CONFIG_KEYS[key][0], raw, key, line_no)

    lorenz_kwargs = {}
    for key in ("sigma", "r", "b"):
        if key in values:
            lorenz_kwargs[key] = values.pop(key)
    try:
        config = TwinExperimentConfig(**values)
        if lorenz_kwargs:
            config = replace(config, lorenz=Lorenz63Params(**lorenz_kwargs))
    except Exception as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc
    return config


def _format_value(kind: str, value) -> str:
    if kind == "vector":
        return ",".join(format(float(v), ".17g") for v in value)
    if kind == "int_list":
        return ",".join(str(int(v)) for v in value)
    if kind == "int":
        return str(int(value))
    return format(float(value), ".17g")


def serialize_config(config: TwinExperimentConfig) -> str:
    """Render a config so that parse_config reproduces it exactly."""
    lines = []
    for key, (kind, _) in CONFIG_KEYS.items():
        if key in ("sigma", "r", "b"):
            value = getattr(config.lorenz, key)
        else:
            value = getattr(config, key)
        lines.append(f"{key} = {_format_value(kind, value)}")
    return "\n".join(lines) + "\n"


def _display_value(kind: str, value) -> str:
    # Shortest round-trip repr: '0.1' instead of the 17-digit CSV form.
    if kind == "vector":
        return ",".join(repr(float(v)) for v in value)
    if kind in ("int_list", "int"):
        return _format_value(kind, value)
    return repr(float(value))


def describe_defaults() -> str:
    """Human-readable key list with defaults, for --help output."""
    config = default_config()
    lines = []
    for key, (kind, description) in CONFIG_KEYS.items():
        if key in ("sigma", "r", "b"):
            value = getattr(config.lorenz, key)
        else:
            value = getattr(config, key)
        rendered = _display_value(kind, value)
        lines.append(f"  {key:<18} {description} (default: {rendered})")
    return "\n".join(lines)
