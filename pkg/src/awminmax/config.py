"""Scenario configuration and scenario-file parsing.

A scenario file is a flat YAML (or JSON) mapping whose keys are exactly the
field names of :class:`ScenarioConfig`. Missing keys take the defaults below,
which describe the standard simulation setup (100 m square, 150 nodes,
30 anchors, 20 m radio range, DoI 0.02, 100 Monte Carlo runs).
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

import yaml

from .exceptions import ConfigError


@dataclass(frozen=True)
class ScenarioConfig:
    area_side: float = 100.0
    node_count: int = 150
    anchor_count: int = 30
    comm_radius: float = 20.0
    doi: float = 0.02
    obstacle_center: tuple[float, float] | None = None
    obstacle_radius: float = 20.0
    trials: int = 100
    epsilon: float = 1e-3
    base_seed: int = 1

    def __post_init__(self):
        if self.obstacle_center is None:
            half = self.area_side / 2.0
            object.__setattr__(self, "obstacle_center", (half, half))
        else:
            object.__setattr__(
                self, "obstacle_center", tuple(float(v) for v in self.obstacle_center)
            )
        self.validate()

    def validate(self) -> None:
        """Raise :class:`ConfigError` naming the first violated constraint."""
        if not self.area_side > 0:
            raise ConfigError("area_side must be > 0")
        if self.anchor_count < 3:
            raise ConfigError("anchor_count must be >= 3")
        if not self.anchor_count < self.node_count:
            raise ConfigError("anchor_count must be < node_count")
        if not self.comm_radius > 0:
            raise ConfigError("comm_radius must be > 0")
        if not 0.0 <= self.doi < 1.0:
            raise ConfigError("doi must lie in [0, 1)")
        if self.obstacle_radius < 0:
            raise ConfigError("obstacle_radius must be >= 0")
        if len(self.obstacle_center) != 2:
            raise ConfigError("obstacle_center must be a 2D point")
        cx, cy = self.obstacle_center
        r = self.obstacle_radius
        if r > 0 and not (r <= cx <= self.area_side - r and r <= cy <= self.area_side - r):
            raise ConfigError("obstacle_center: obstacle disc must lie inside the area")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not self.epsilon > 0:
            raise ConfigError("epsilon must be > 0")
        if not 0 <= self.base_seed < 2**64:
            raise ConfigError("base_seed must be an unsigned 64-bit integer")

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        out = dataclasses.asdict(self)
        out["obstacle_center"] = list(self.obstacle_center)
        return out

    @property
    def unknown_count(self) -> int:
        return self.node_count - self.anchor_count


_FIELD_TYPES = {
    "area_side": float,
    "node_count": int,
    "anchor_count": int,
    "comm_radius": float,
    "doi": float,
    "obstacle_center": "point",
    "obstacle_radius": float,
    "trials": int,
    "epsilon": float,
    "base_seed": int,
}


def _coerce(key: str, value: Any):
    kind = _FIELD_TYPES[key]
    if kind == "point":
        if (
            not isinstance(value, (list, tuple))
            or len(value) != 2
            or not all(_is_real(v) for v in value)
        ):
            raise ConfigError(f"{key}: expected a pair of numbers, got {value!r}")
        return tuple(float(v) for v in value)
    if kind is int:
        # bools are ints in Python; reject them explicitly
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{key}: expected an integer, got {value!r}")
        return value
    if not _is_real(value):
        raise ConfigError(f"{key}: expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{key}: must be finite")
    return value


def _is_real(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def config_from_mapping(data: Mapping[str, Any] | None) -> ScenarioConfig:
    """Build a validated config from a flat mapping, filling defaults."""
    data = dict(data or {})
    unknown = sorted(set(data) - set(_FIELD_TYPES))
    if unknown:
        raise ConfigError(f"{unknown[0]}: unknown key")
    kwargs = {key: _coerce(key, value) for key, value in data.items()}
    return ScenarioConfig(**kwargs)


def parse_scenario(path: str | Path) -> ScenarioConfig:
    """Read a scenario file. An empty file yields the default scenario.

    Raises
    ------
    ConfigError
        Unknown key, wrong type, or violated invariant; the message starts
        with the offending key.
    OSError
        The file cannot be read.
    """
    text = Path(path).read_text()
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed scenario file: {exc}") from exc
    if data is not None and not isinstance(data, dict):
        raise ConfigError("scenario file must contain a key/value mapping")
    return config_from_mapping(data)


DEFAULT_SCENARIO = ScenarioConfig()
