"""
Flat ``key = value`` run configuration.

One key per line, ``#`` starts a comment, infinities are spelled ``inf`` and
lists are comma separated. A sweep grid is either an explicit ``grid`` list
or ``grid_start``/``grid_stop``/``grid_points`` (evenly spaced). Keys and
units:

    cn2            refractive-index structure constant, m^(-2/3)
    l0             inner scale, m
    L0             outer scale, m (inf allowed)
    q0             central wavenumber, 1/m
    z              propagation distance, m
    r0             aperture radius, m
    lambda_c       phase-diffuser coherence length, m (inf allowed)
    axis           swept quantity: z | cn2 | sigma1_sq
    grid           comma-separated sweep values, in the unit of ``axis``
    grid_start     first sweep value
    grid_stop      last sweep value
    grid_points    number of evenly spaced sweep values
    r0_series      comma-separated aperture radii, m; repeats the sweep per radius
    cn2_series     comma-separated Cn² values, m^(-2/3); repeats a z sweep per value
    tol            relative tolerance of the deterministic stages
    seed           master seed, 0 <= seed < 2^64
    mc_samples     Monte Carlo samples for the cross term
    threads        worker threads (results do not depend on it)
    output         CSV path
    preset         fig1 | fig2 | fig3 | fig4
    preset_override  true to let preset values win over conflicting keys
    cache_dir      result cache directory
    cache          false disables the result cache
"""

from __future__ import annotations

import math
from collections.abc import Callable
from typing import Any

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..config import settings
from ..errors import ConfigError
from ..physics.first_order import MAX_REL_TOL, MIN_REL_TOL
from ..physics.params import PhysicalParams
from ..pipeline.models import SweepAxis
from .presets import preset as load_preset

logger = structlog.get_logger(__name__).bind(component="cli-io")

PHYSICAL_KEYS = ("cn2", "l0", "L0", "q0", "z", "r0", "lambda_c")
GRID_RANGE_KEYS = ("grid_start", "grid_stop", "grid_points")
OPTION_KEYS = (
    "axis",
    "grid",
    "r0_series",
    "cn2_series",
    "tol",
    "seed",
    "mc_samples",
    "threads",
    "output",
    "cache_dir",
    "cache",
)


class RunConfig(BaseModel):
    """A fully resolved run: channel, sweep and numerical options."""

    model_config = ConfigDict(frozen=True)

    params: PhysicalParams
    axis: SweepAxis = SweepAxis.Z
    grid: tuple[float, ...] = Field(min_length=1)
    r0_series: tuple[float, ...] = ()
    cn2_series: tuple[float, ...] = ()
    tol: float = Field(default_factory=lambda: settings.rel_tol)
    seed: int = Field(default_factory=lambda: settings.seed, ge=0, lt=2**64)
    mc_samples: int = Field(default_factory=lambda: settings.mc_samples, ge=1)
    threads: int = Field(default_factory=lambda: settings.threads, ge=1)
    output: str | None = None
    preset: str | None = None
    cache_dir: str = Field(default_factory=lambda: settings.cache_dir)
    cache: bool = Field(default_factory=lambda: settings.cache_enabled)

    @field_validator("tol")
    @classmethod
    def _check_tol(cls, value: float) -> float:
        if not MIN_REL_TOL < value < MAX_REL_TOL:
            raise ValueError(f"must lie in ({MIN_REL_TOL:g}, {MAX_REL_TOL:g})")
        return value

    @field_validator("r0_series")
    @classmethod
    def _check_radii(cls, value: tuple[float, ...]) -> tuple[float, ...]:
        if any(not (math.isfinite(r) and r > 0) for r in value):
            raise ValueError("radii must be finite and strictly positive")
        return value

    @field_validator("cn2_series")
    @classmethod
    def _check_strengths(cls, value: tuple[float, ...]) -> tuple[float, ...]:
        if any(not (math.isfinite(v) and v >= 0) for v in value):
            raise ValueError("Cn² values must be finite and non-negative")
        return value

    @model_validator(mode="after")
    def _check_grid(self) -> RunConfig:
        if any(b <= a for a, b in zip(self.grid, self.grid[1:], strict=False)):
            raise ValueError("grid must be strictly increasing")
        if any(not math.isfinite(v) for v in self.grid):
            raise ValueError("grid values must be finite")
        if self.r0_series and self.cn2_series:
            raise ValueError("give at most one of r0_series and cn2_series")
        if self.cn2_series and self.axis is not SweepAxis.Z:
            raise ValueError("cn2_series needs axis = z")
        return self


def _float(text: str) -> float:
    value = float(text)
    if math.isnan(value):
        raise ValueError("nan is not a valid value")
    return value


def _int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        value = float(text)
        if not value.is_integer():
            raise ValueError(f"{text!r} is not an integer") from None
        return int(value)


def _bool(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"{text!r} is not a boolean")


def _floats(text: str) -> tuple[float, ...]:
    return tuple(_float(part.strip()) for part in text.split(",") if part.strip())


CONVERTERS: dict[str, Callable[[str], Any]] = {
    **{key: _float for key in PHYSICAL_KEYS},
    "axis": str,
    "grid": _floats,
    "grid_start": _float,
    "grid_stop": _float,
    "grid_points": _int,
    "r0_series": _floats,
    "cn2_series": _floats,
    "tol": _float,
    "seed": _int,
    "mc_samples": _int,
    "threads": _int,
    "output": str,
    "preset": str,
    "preset_override": _bool,
    "cache_dir": str,
    "cache": _bool,
}


def _tokenize(text: str) -> dict[str, tuple[str, int]]:
    entries: dict[str, tuple[str, int]] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError([f"expected 'key = value', got {line!r}"], line=number)
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in CONVERTERS:
            raise ConfigError([f"unknown key {key!r}"], line=number)
        if key in entries:
            raise ConfigError([f"duplicate key {key!r}"], line=number)
        entries[key] = (value, number)
    return entries


def _format_errors(error: ValidationError, prefix: str = "") -> list[str]:
    problems = []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"] if part != "params")
        problems.append(f"{prefix}{location or 'config'}: {item['msg']}")
    return problems


def _grid(values: dict[str, Any], problems: list[str]) -> None:
    present = [key for key in GRID_RANGE_KEYS if key in values]
    if not present:
        return
    if "grid" in values:
        problems.append("grid: give either grid or grid_start/grid_stop/grid_points, not both")
        return
    missing = [key for key in GRID_RANGE_KEYS if key not in values]
    if missing:
        problems.append(f"{missing[0]}: required together with {', '.join(present)}")
        return
    if values["grid_points"] < 1:
        problems.append("grid_points: must be at least 1")
        return
    start, stop, points = (values.pop(key) for key in GRID_RANGE_KEYS)
    values["grid"] = tuple(float(v) for v in np.linspace(start, stop, points))


def parse_config(text: str) -> RunConfig:
    """Parse and validate a run configuration document.

    Syntax problems raise at once with their line number; conversion and
    validation problems are collected and raised together.
    """
    entries = _tokenize(text)
    problems: list[str] = []
    explicit: dict[str, Any] = {}
    for key, (raw, number) in entries.items():
        try:
            explicit[key] = CONVERTERS[key](raw)
        except ValueError as e:
            problems.append(f"line {number}: {key}: {e}")

    override = bool(explicit.pop("preset_override", False))
    values: dict[str, Any] = {}
    if "preset" in explicit:
        values = load_preset(explicit["preset"])
        for key, value in explicit.items():
            if key in values and values[key] != value:
                if override:
                    logger.info("Preset value kept over explicit key", key=key, preset=explicit["preset"])
                    continue
                problems.append(
                    f"line {entries[key][1]}: {key}: conflicts with preset "
                    f"{explicit['preset']!r} (set preset_override = true to use the preset)"
                )
                continue
            values[key] = value
        if any(key in explicit for key in GRID_RANGE_KEYS) and "grid" in values and "grid" not in explicit:
            values.pop("grid")
    else:
        values = dict(explicit)

    _grid(values, problems)

    axis = values.get("axis", SweepAxis.Z.value)
    if axis == SweepAxis.SIGMA1_SQ.value:
        # placeholder, every row derives its own cn2
        values.setdefault("cn2", 0.0)
    if "grid" not in values:
        if "axis" in values:
            problems.append("grid: required when axis is given")
        elif "z" in values:
            values["grid"] = (values["z"],)

    params = None
    try:
        params = PhysicalParams.model_validate({k: values[k] for k in PHYSICAL_KEYS if k in values})
    except ValidationError as e:
        problems.extend(_format_errors(e))

    options = {k: v for k, v in values.items() if k not in PHYSICAL_KEYS}
    config = None
    if params is not None:
        try:
            config = RunConfig.model_validate({"params": params, **options})
        except ValidationError as e:
            problems.extend(_format_errors(e))

    if problems or config is None:
        raise ConfigError(problems or ["configuration is incomplete"])
    logger.debug("Parsed run configuration", axis=config.axis.value, points=len(config.grid))
    return config


def _render(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "inf" if value == math.inf else format(value, ".17g")
    if isinstance(value, tuple):
        return ", ".join(_render(v) for v in value)
    if isinstance(value, SweepAxis):
        return value.value
    return str(value)


def render_config(config: RunConfig) -> str:
    """Flat document that parses back to ``config`` exactly.

    The preset name is kept as a comment; its values are written out.
    """
    lines = []
    if config.preset is not None:
        lines.append(f"# preset: {config.preset}")
    for key in PHYSICAL_KEYS:
        lines.append(f"{key} = {_render(getattr(config.params, key))}")
    for key in OPTION_KEYS:
        value = getattr(config, key)
        if value is None or value == ():
            continue
        lines.append(f"{key} = {_render(value)}")
    return "\n".join(lines) + "\n"
