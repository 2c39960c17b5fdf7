"""Config file parsing and the built-in scenario presets.

Config files are INI-style key-value text::

    [surface]
    kind = type1

    [leader]
    init = [50, -10, -0.996, 0.087]

    [extension]
    length = 3.57
    period = 1.28
    side = left

    [edmd]
    dictionary = b
    warmup = 4
    steps = 36
    velocity_mode = none

    [integrator]
    step = 0.01

Only surface.kind and leader.init are required; every other key falls
back to the type1 scenario defaults.  The presets type1/type2/type3
select the three built-in surfaces with their reference leader starts.
"""

from __future__ import annotations

import configparser
import math
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .formation import ExtensionSpec, Side
from .observables import Dictionary
from .scenario import ScenarioConfig, VelocityMode
from .surfaces import Surface

DEFAULT_EXTENSION_LENGTH = 3.57
DEFAULT_PERIOD = 1.28
DEFAULT_WARMUP = 4
DEFAULT_STEPS = 36
DEFAULT_INTEGRATOR_STEP = 0.01

PRESET_NAMES = ("type1", "type2", "type3")

_PRESET_INITS = {
    "type1": (50.0, -10.0, -math.cos(math.pi / 36.0), math.sin(math.pi / 36.0)),
    "type2": (50.0, -20.0, 1.0, 0.0),
    "type3": (30.0, 5.0, 1.0, 0.0),
}

_SCHEMA = {
    "surface": {"kind"},
    "leader": {"init"},
    "extension": {"length", "period", "side"},
    "edmd": {"dictionary", "warmup", "steps", "velocity_mode"},
    "integrator": {"step"},
}


def preset_config(name: str) -> ScenarioConfig:
    """A fresh ScenarioConfig for one of the built-in presets."""
    if name not in _PRESET_INITS:
        raise ConfigError(f"unknown preset {name!r}; choose from {PRESET_NAMES}")
    cfg = ScenarioConfig(
        surface=Surface.builtin(name),
        leader_init=np.array(_PRESET_INITS[name]),
        extension=ExtensionSpec(
            length=DEFAULT_EXTENSION_LENGTH, side=Side.LEFT, period=DEFAULT_PERIOD
        ),
        dictionary=Dictionary.RELATIVE,
        warmup=DEFAULT_WARMUP,
        steps=DEFAULT_STEPS,
        velocity_mode=VelocityMode.NONE,
        step=DEFAULT_INTEGRATOR_STEP,
    )
    return cfg.validate()


def _parse_vector(text: str, n: int) -> np.ndarray:
    parts = text.strip().lstrip("[").rstrip("]").split(",")
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise ConfigError(f"cannot parse vector from {text!r}") from None
    if len(values) != n:
        raise ConfigError(f"expected {n} components, got {len(values)} in {text!r}")
    return np.array(values)


def parse_config(text: str) -> ScenarioConfig:
    """Build a validated ScenarioConfig from config file text."""
    cp = configparser.ConfigParser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc

    for section in cp.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        for key in cp.options(section):
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key {section}.{key}")

    def get(section, key, fallback=None):
        return cp.get(section, key, fallback=fallback)

    kind = get("surface", "kind")
    if kind is None:
        raise ConfigError("surface.kind is required")
    try:
        surface = Surface.builtin(kind.strip().lower())
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    init_text = get("leader", "init")
    if init_text is None:
        raise ConfigError("leader.init is required")
    leader_init = _parse_vector(init_text, 4)

    try:
        extension = ExtensionSpec(
            length=float(get("extension", "length", DEFAULT_EXTENSION_LENGTH)),
            side=Side.parse(get("extension", "side", Side.LEFT.value)),
            period=float(get("extension", "period", DEFAULT_PERIOD)),
        )
        cfg = ScenarioConfig(
            surface=surface,
            leader_init=leader_init,
            extension=extension,
            dictionary=Dictionary.parse(get("edmd", "dictionary", Dictionary.RELATIVE.value)),
            warmup=int(get("edmd", "warmup", DEFAULT_WARMUP)),
            steps=int(get("edmd", "steps", DEFAULT_STEPS)),
            velocity_mode=VelocityMode.parse(
                get("edmd", "velocity_mode", VelocityMode.NONE.value)
            ),
            step=float(get("integrator", "step", DEFAULT_INTEGRATOR_STEP)),
        )
    except (ValueError, TypeError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    return cfg.validate()


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    return parse_config(path.read_text())
