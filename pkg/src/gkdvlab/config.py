"""Flat key = value run configuration with exact round-tripping.

One schema table drives parsing, validation, defaulting, CLI flag
generation, and serialization, so a config written by the tool parses back
to identical field values (floats are printed with 17 significant digits,
which is lossless for doubles).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Any

from .dynamics import DEFAULT_DT
from .errors import ConfigError
from .grid import Grid
from .rng import DEFAULT_SEED
from .waves import WaveParams, default_grid

__all__ = [
    "RunConfig",
    "SCHEMA",
    "VARIANTS",
    "parse_config",
    "serialize_config",
    "wave_params",
    "resolve_grid",
    "resolve_dt",
]

VARIANTS = ("instability", "shoot-cs", "shoot-cu", "center", "exit-time",
            "stability", "rescale")


@dataclass(frozen=True)
class _Key:
    kind: str           # int | float | signed_float | float_or_none | float_list | str_or_none | choice
    default: Any
    help: str


SCHEMA: dict[str, _Key] = {
    "k": _Key("int", 7, "nonlinearity exponent, integer >= 6"),
    "c": _Key("float", 1.0, "wave speed, > 0"),
    "n_points": _Key("int", 2048, "grid points, power of two >= 128"),
    "half_length": _Key("float_or_none", None,
                        "domain half length; default round(50/sqrt(c))"),
    "dt": _Key("float_or_none", None,
               "time step; default 5e-4 scaled by c^-3/2"),
    "drift_budget": _Key("float", 1e-8,
                         "relative conservation drift allowed over a run"),
    "t_end": _Key("signed_float", 1.0,
                  "integration time; negative runs backward"),
    "sample_every": _Key("float", 1e-2, "sampling interval for trajectories"),
    "eps": _Key("float", 1e-3, "perturbation size"),
    "t_stay": _Key("float_or_none", None,
                   "stay horizon for shooting; default 15/lambda_c"),
    "tol": _Key("float", 1e-10, "bisection tolerance in the shot coordinate"),
    "seed": _Key("int", DEFAULT_SEED, "seed for the perturbation generator"),
    "offset": _Key("signed_float", 1e-4,
                   "shot-coordinate offset for exit timing; sign picks the side"),
    "c2": _Key("float", 2.0, "target speed for the rescale check"),
    "sizes": _Key("float_list", (1e-3, 2e-3, 4e-3),
                  "perturbation sizes for the stability sweep"),
    "t_horizon": _Key("float_or_none", None,
                      "excursion horizon for stability runs; default 6/lambda_c"),
    "output_dir": _Key("str_or_none", None, "directory for CSV outputs"),
    "variant": _Key("choice", None,
                    "experiment variant: " + ", ".join(VARIANTS)),
}


@dataclass(frozen=True)
class RunConfig:
    k: int = 7
    c: float = 1.0
    n_points: int = 2048
    half_length: float | None = None
    dt: float | None = None
    drift_budget: float = 1e-8
    t_end: float = 1.0
    sample_every: float = 1e-2
    eps: float = 1e-3
    t_stay: float | None = None
    tol: float = 1e-10
    seed: int = DEFAULT_SEED
    offset: float = 1e-4
    c2: float = 2.0
    sizes: tuple[float, ...] = (1e-3, 2e-3, 4e-3)
    t_horizon: float | None = None
    output_dir: str | None = None
    variant: str | None = None


def _convert(key: str, kind: str, sval: str, where: str) -> Any:
    try:
        if kind == "int":
            return int(sval)
        if kind in ("float", "signed_float"):
            return float(sval)
        if kind == "float_or_none":
            return None if sval.lower() in ("", "none", "auto") else float(sval)
        if kind == "float_list":
            parts = [s.strip() for s in sval.split(",") if s.strip()]
            return tuple(float(s) for s in parts)
        if kind in ("str_or_none", "choice"):
            return None if sval == "" else sval
    except ValueError:
        raise ConfigError(f"{where}: cannot parse value {sval!r} for key {key!r}") from None
    raise ConfigError(f"unhandled schema kind {kind!r} for key {key!r}")


def _validate(key: str, value: Any, where: str) -> None:
    if value is None:
        return
    if key == "k":
        if value <= 5:
            raise ConfigError(
                f"{where}: k = {value} is not supercritical; this tool covers "
                "the supercritical regime k > 5 (integer k >= 6)")
        return
    if key == "n_points":
        if value < 128 or value & (value - 1):
            raise ConfigError(
                f"{where}: n_points must be a power of two >= 128, got {value}")
        return
    if key == "seed":
        if value < 0:
            raise ConfigError(f"{where}: seed must be nonnegative, got {value}")
        return
    if key == "variant":
        if value not in VARIANTS:
            raise ConfigError(
                f"{where}: unknown variant {value!r}; expected one of "
                + ", ".join(VARIANTS))
        return
    if key == "sizes":
        for s in value:
            if not (math.isfinite(s) and s >= 0.0):
                raise ConfigError(
                    f"{where}: sizes must be finite and nonnegative, got {s!r}")
        if not value:
            raise ConfigError(f"{where}: sizes must not be empty")
        return
    if key in ("t_end", "offset"):
        if not math.isfinite(value) or (key == "t_end" and value == 0.0):
            raise ConfigError(
                f"{where}: {key} must be finite"
                + (" and nonzero" if key == "t_end" else "")
                + f", got {value!r}")
        return
    if key == "eps":
        if not (math.isfinite(value) and value >= 0.0):
            raise ConfigError(f"{where}: eps must be >= 0, got {value!r}")
        return
    if isinstance(value, float):
        if not (math.isfinite(value) and value > 0.0):
            raise ConfigError(f"{where}: {key} must be positive, got {value!r}")


def parse_config(text: str) -> RunConfig:
    """Parse flat `key = value` text (with # comments) into a RunConfig.

    Unknown keys are rejected, duplicates are reported with both line
    numbers, and every value is range-checked with its line in the message.
    """
    seen: dict[str, int] = {}
    values: dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, _, sval = line.partition("=")
        key = key.strip()
        sval = sval.strip()
        if key not in SCHEMA:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in seen:
            raise ConfigError(
                f"duplicate key {key!r} on lines {seen[key]} and {lineno}")
        seen[key] = lineno
        where = f"line {lineno}"
        value = _convert(key, SCHEMA[key].kind, sval, where)
        _validate(key, value, where)
        values[key] = value
    return RunConfig(**values)


def _fmt(value: Any) -> str:
    if isinstance(value, bool):
        raise ConfigError("boolean config values are not supported")
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, tuple):
        return ",".join(format(v, ".17g") for v in value)
    return str(value)


def serialize_config(cfg: RunConfig) -> str:
    """Canonical text form; parse_config(serialize_config(cfg)) == cfg."""
    lines = []
    for f in fields(cfg):
        value = getattr(cfg, f.name)
        if value is None:
            continue
        lines.append(f"{f.name} = {_fmt(value)}")
    return "\n".join(lines) + "\n"


def override(cfg: RunConfig, key: str, sval: str, where: str) -> RunConfig:
    """Apply one key = value override (used for CLI flags)."""
    if key not in SCHEMA:
        raise ConfigError(f"{where}: unknown key {key!r}")
    value = _convert(key, SCHEMA[key].kind, sval, where)
    _validate(key, value, where)
    from dataclasses import replace
    return replace(cfg, **{key: value})


def wave_params(cfg: RunConfig) -> WaveParams:
    return WaveParams(cfg.k, cfg.c)


def resolve_grid(cfg: RunConfig) -> Grid:
    if cfg.half_length is not None:
        return Grid(cfg.n_points, cfg.half_length)
    return default_grid(wave_params(cfg), cfg.n_points)


def resolve_dt(cfg: RunConfig) -> float:
    if cfg.dt is not None:
        return cfg.dt
    return DEFAULT_DT / cfg.c ** 1.5
