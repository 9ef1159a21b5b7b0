"""Scenario configuration: INI-style text with one section per group.

Example::

    [grid]
    n = 4096
    dx = 1.0

    [pulse]
    envelope = sin2
    width = 256
    k = 1.5707963267948966
    center = 1024

    [sweep]
    delays = -400:400:21      # start:stop:count, or a comma separated list

Every field has a default, so a config only needs to name what it changes.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ConfigError

SCENARIOS = ("single_bs", "hom_sweep", "verify")
PHASE_CONVENTIONS = {"t_eq_ir": 1, "t_eq_minus_ir": -1}


@dataclass
class GridConfig:
    n: int = 4096
    dx: float = 1.0


@dataclass
class Constants:
    c: float = 1.0
    hbar: float = 1.0


@dataclass
class PulseConfig:
    envelope: str = "sin2"
    width: float = 256.0
    k: float = math.pi / 2
    center: float = 1024.0


@dataclass
class BeamSplitterConfig:
    theta: float = math.pi / 4
    phase_convention: str = "t_eq_ir"
    alpha: float = 0.0
    position: Optional[float] = None
    detector_distance: Optional[float] = None


@dataclass
class PropagationConfig:
    dispersion: str = "carrier_translation"


@dataclass
class ScenarioSection:
    kind: str = ""


@dataclass
class SweepConfig:
    delays: tuple = ()


@dataclass
class OutputConfig:
    directory: str = "out"
    snapshot_times: tuple = ()


@dataclass
class ScenarioConfig:
    grid: GridConfig = field(default_factory=GridConfig)
    constants: Constants = field(default_factory=Constants)
    pulse: PulseConfig = field(default_factory=PulseConfig)
    beam_splitter: BeamSplitterConfig = field(default_factory=BeamSplitterConfig)
    propagation: PropagationConfig = field(default_factory=PropagationConfig)
    scenario: ScenarioSection = field(default_factory=ScenarioSection)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def validate(self) -> "ScenarioConfig":
        g = self.grid
        if g.n <= 0 or g.n & (g.n - 1):
            raise ConfigError(f"grid.n must be a positive power of two, got {g.n}")
        _positive("grid.dx", g.dx)
        _positive("constants.c", self.constants.c)
        _positive("constants.hbar", self.constants.hbar)
        if self.pulse.envelope not in ("sin2", "gauss_truncated"):
            raise ConfigError(f"pulse.envelope must be sin2 or gauss_truncated, got {self.pulse.envelope!r}")
        _positive("pulse.width", self.pulse.width)
        _finite("pulse.k", self.pulse.k)
        _finite("pulse.center", self.pulse.center)
        bs = self.beam_splitter
        _finite("beam_splitter.theta", bs.theta)
        if not 0 < bs.theta < math.pi / 2:
            raise ConfigError(f"beam_splitter.theta must lie in (0, pi/2), got {bs.theta!r}")
        if bs.phase_convention not in PHASE_CONVENTIONS:
            raise ConfigError(
                f"beam_splitter.phase_convention must be one of {sorted(PHASE_CONVENTIONS)}"
            )
        _finite("beam_splitter.alpha", bs.alpha)
        if bs.position is not None:
            _finite("beam_splitter.position", bs.position)
        if bs.detector_distance is not None:
            _positive("beam_splitter.detector_distance", bs.detector_distance)
        if self.propagation.dispersion not in ("carrier_translation", "full_abs_k"):
            raise ConfigError("propagation.dispersion must be carrier_translation or full_abs_k")
        if self.scenario.kind and self.scenario.kind not in SCENARIOS:
            raise ConfigError(f"scenario.kind must be one of {SCENARIOS}, got {self.scenario.kind!r}")
        for d in self.sweep.delays:
            _finite("sweep.delays", d)
        for t in self.output.snapshot_times:
            _finite("output.snapshot_times", t)
            if t < 0:
                raise ConfigError("output.snapshot_times must be >= 0")
        return self


def _finite(name, value):
    if not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"{name} must be a finite number, got {value!r}")


def _positive(name, value):
    _finite(name, value)
    if value <= 0:
        raise ConfigError(f"{name} must be > 0, got {value!r}")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _parse_float_list(name: str, text: str) -> tuple:
    text = text.strip()
    if not text:
        return ()
    try:
        if ":" in text:
            start, stop, count = text.split(":")
            count = int(count)
            if count < 1:
                raise ValueError("count must be >= 1")
            return tuple(float(v) for v in np.linspace(float(start), float(stop), count))
        return tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"{name}: cannot parse {text!r} ({exc})") from None


def _convert(section: str, name: str, default, raw: str):
    key = f"{section}.{name}"
    if isinstance(default, tuple):
        return _parse_float_list(key, raw)
    if isinstance(default, str):
        return raw.strip()
    if default is None and raw.strip().lower() in ("", "none"):
        return None
    try:
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float) or default is None:
            return float(raw)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {raw!r}") from None
    raise ConfigError(f"{key}: unsupported field type")


def parse_config(text: str) -> ScenarioConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    cfg = ScenarioConfig()
    sections = {f.name: f for f in fields(cfg)}
    for sec in parser.sections():
        if sec not in sections:
            raise ConfigError(f"unknown section [{sec}]")
        obj = getattr(cfg, sec)
        known = {f.name: f for f in fields(obj)}
        for key, raw in parser.items(sec):
            if key not in known:
                raise ConfigError(f"unknown field {sec}.{key}")
            default = getattr(type(obj)(), key)
            setattr(obj, key, _convert(sec, key, default, raw))
    return cfg.validate()


def load_config(path) -> ScenarioConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)


def serialize_config(cfg: ScenarioConfig) -> str:
    """Render ``cfg`` so that ``parse_config(serialize_config(cfg)) == cfg``."""
    lines = []
    for sec, values in asdict(cfg).items():
        lines.append(f"[{sec}]")
        for key, value in values.items():
            if value is None:
                continue
            if isinstance(value, (tuple, list)):
                text = ", ".join(_fmt(v) for v in value)
            elif isinstance(value, float):
                text = _fmt(value)
            else:
                text = str(value)
            lines.append(f"{key} = {text}")
        lines.append("")
    return "\n".join(lines)
