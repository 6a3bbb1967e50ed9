"""Scenario configuration: knob table, flat key=value files, validation."""
from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional

from .classical import Model, ModelParams, shortest_period
from .errors import ConfigError, InvalidStateError

SCENARIOS = (
    "classical-duality",
    "master-reduction",
    "spectra",
    "anomaly",
    "interferometer",
    "rydberg-limit",
)
ALL = "all"

_ANGLE = re.compile(r"^\s*([-+]?[0-9.]*(?:[eE][-+]?[0-9]+)?)\s*\*?\s*pi\s*(?:/\s*([0-9.]+))?\s*$")


def parse_angle(text: str) -> float:
    """Float, or a multiple of pi such as ``2pi``, ``pi/2``, ``-0.5*pi``."""
    text = str(text)
    m = _ANGLE.match(text)
    if m:
        coef = m.group(1)
        coef = 1.0 if coef in ("", "+") else (-1.0 if coef == "-" else float(coef))
        div = float(m.group(2)) if m.group(2) else 1.0
        return coef * math.pi / div
    return float(text)


def parse_float_list(text: str) -> tuple[float, ...]:
    if isinstance(text, (list, tuple)):
        return tuple(float(v) for v in text)
    return tuple(float(v) for v in str(text).replace(";", ",").split(",") if v.strip())


def _optional_float(text):
    if text is None or str(text).strip().lower() in ("", "none", "auto"):
        return None
    return float(text)


@dataclass(frozen=True)
class Knob:
    name: str
    parse: Callable[[str], Any]
    default: Any
    help: str


KNOBS = (
    Knob("m", float, 1.0, "mass"),
    Knob("g", float, 1.0, "Chern-Simons coupling"),
    Knob("k", float, 1.0, "harmonic strength"),
    Knob("hbar", float, 1.0, "action scale"),
    Knob("dt", _optional_float, None, "classical step; auto = period/10000"),
    Knob("t_end", _optional_float, None, "classical run length; auto = 10 periods"),
    Knob("dim", int, 32, "Fock truncation for single-mode artifacts"),
    Knob("lm_dim", int, 8, "per-mode truncation for two-mode LM operators"),
    Knob("thermal_dim", int, 64, "Fock truncation for thermal states"),
    Knob("n_t", int, 1024, "time-circle samples for gauge loops"),
    Knob("homotopy_samples", int, 64, "branch-tracking points along the gauge homotopy"),
    Knob("chi_points", int, 64, "phase-scan points per interferogram"),
    Knob("alpha", parse_angle, 2 * math.pi, "internal rotation angle (accepts 2pi, pi/2, ...)"),
    Knob("betas", parse_float_list, (0.5, 1.0, 2.0), "thermal beta*hbar*omega values"),
    Knob("random_cases", int, 100, "randomized interferometer oracle cases"),
    Knob("mass_scales", parse_float_list, (1.0, 0.1, 0.01, 0.001), "Rydberg mass multipliers"),
    Knob("csv_stride", int, 100, "write every n-th trajectory sample"),
    Knob("seed", int, 42, "root seed for randomized suites"),
    Knob("out", str, "lmduality-out", "output directory"),
    Knob("scenario", str, ALL, "scenario name"),
)
KNOB_NAMES = tuple(k.name for k in KNOBS)
_BY_NAME = {k.name: k for k in KNOBS}


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    params: ModelParams
    knobs: dict = field(hash=False)

    def __getattr__(self, name):
        knobs = object.__getattribute__(self, "knobs")
        if name in knobs:
            return knobs[name]
        raise AttributeError(name)

    @property
    def out(self) -> Path:
        return Path(self.knobs["out"])

    @property
    def scenarios(self) -> tuple[str, ...]:
        return SCENARIOS if self.scenario == ALL else (self.scenario,)

    @property
    def period(self) -> float:
        return 2 * math.pi / self.params.omega_lm

    @property
    def step(self) -> float:
        return self.knobs["dt"] if self.knobs["dt"] is not None else self.period / 10000

    @property
    def duration(self) -> float:
        return self.knobs["t_end"] if self.knobs["t_end"] is not None else 10 * self.period


def defaults() -> dict:
    return {k.name: k.default for k in KNOBS}


def help_table() -> str:
    width = max(len(n) for n in KNOB_NAMES)
    lines = ["knob".ljust(width) + "  default".ljust(26) + "meaning"]
    for k in KNOBS:
        d = k.default
        if isinstance(d, tuple):
            d = ",".join(format(v, "g") for v in d)
        elif k.name == "alpha":
            d = "2pi"
        lines.append(f"{k.name.ljust(width)}  {str(d).ljust(24)}{k.help}")
    return "\n".join(lines)


def _normalize_key(key: str) -> str:
    return key.strip().lower().replace("-", "_")


def read_config_file(path) -> dict:
    """Raw ``key = value`` pairs from a flat config file; ``#`` starts a comment."""
    text = Path(path).read_text(encoding="utf-8")
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string("[__root__]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if len(cp.sections()) != 1:
        raise ConfigError(f"{path}: sections are not supported, use a flat key = value list")
    return {_normalize_key(k): v for k, v in cp["__root__"].items()}


def parse_config(path=None, overrides: Optional[dict] = None) -> ScenarioConfig:
    """Defaults, then the file at ``path``, then ``overrides``; validated.

    Raises
    ------
    ConfigError
        Unknown keys (all of them are listed), unparsable values or values
        that violate a module precondition.
    """
    raw = read_config_file(path) if path is not None else {}
    raw.update({_normalize_key(k): v for k, v in (overrides or {}).items() if v is not None})
    unknown = sorted(set(raw) - set(KNOB_NAMES))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    knobs = defaults()
    for key, val in raw.items():
        try:
            knobs[key] = _BY_NAME[key].parse(val) if isinstance(val, str) else val
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {key}: {val!r} ({exc})") from None
    return validate(knobs)


def validate(knobs: dict) -> ScenarioConfig:
    scenario = knobs["scenario"]
    if scenario not in SCENARIOS + (ALL,):
        raise ConfigError(f"unknown scenario {scenario!r}; valid: {', '.join(SCENARIOS + (ALL,))}")
    try:
        params = ModelParams(knobs["m"], knobs["g"], knobs["k"], knobs["hbar"])
    except InvalidStateError as exc:
        raise ConfigError(str(exc)) from None
    cfg = ScenarioConfig(scenario, params, dict(knobs))

    period = min(shortest_period(Model.LM, params), shortest_period(Model.CO, params))
    if cfg.step <= 0 or cfg.step >= period / 10:
        raise ConfigError(f"dt={cfg.step:g} must be positive and below period/10={period / 10:g}")
    if cfg.duration <= 0:
        raise ConfigError("t_end must be positive")
    for name, lo in (("dim", 4), ("lm_dim", 4), ("thermal_dim", 4), ("n_t", 8),
                     ("homotopy_samples", 2), ("chi_points", 8), ("random_cases", 1), ("csv_stride", 1)):
        if knobs[name] < lo:
            raise ConfigError(f"{name} must be >= {lo}, got {knobs[name]}")
    if not knobs["mass_scales"] or any(s <= 0 for s in knobs["mass_scales"]):
        raise ConfigError("mass_scales must be a non-empty list of positive numbers")
    if not knobs["betas"] or any(b <= 0 for b in knobs["betas"]):
        raise ConfigError("betas must be a non-empty list of positive numbers")
    if not math.isfinite(knobs["alpha"]):
        raise ConfigError("alpha must be finite")
    return cfg
