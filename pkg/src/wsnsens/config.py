"""Configuration records and the flat ``key = value`` config file format.

A single config file may carry arena keys, cost-model keys, a baseline
network configuration and parameter-space bounds (``name.low`` /
``name.high``).  Each loader picks out the keys it owns.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Mapping

from .errors import ConfigurationError

#: The eight tunable network parameters, in canonical order.
PARAMETER_NAMES = (
    "sensor_interval",
    "sense_radius",
    "transmission_radius",
    "transmission_interval",
    "num_neighbors",
    "num_hops",
    "network_density",
    "num_sinks",
)

INTEGER_PARAMETERS = frozenset(
    {"sensor_interval", "transmission_interval", "num_neighbors", "num_hops", "num_sinks"}
)

#: Human-readable labels used in text reports.
PARAMETER_LABELS = {
    "sensor_interval": "Sensor interval",
    "sense_radius": "Sense Radius",
    "transmission_radius": "Transmission Radius",
    "transmission_interval": "Transmission interval",
    "num_neighbors": "Number of Neighbours",
    "num_hops": "Number of Hops",
    "network_density": "Network density",
    "num_sinks": "Number of Sinks",
}


@dataclass(frozen=True)
class WsnConfig:
    """One point in the eight-dimensional configuration space.

    Intervals are in ticks, radii in meters, density in nodes per square
    meter.  ``num_neighbors`` caps the neighbor table; ``num_hops`` is the
    hop budget (TTL) of every data packet and control cascade.
    """

    sensor_interval: int = 5
    sense_radius: float = 30.0
    transmission_radius: float = 60.0
    transmission_interval: int = 5
    num_neighbors: int = 10
    num_hops: int = 10
    network_density: float = 0.001
    num_sinks: int = 4

    def __post_init__(self):
        for name in PARAMETER_NAMES:
            value = getattr(self, name)
            if name in INTEGER_PARAMETERS:
                if isinstance(value, bool) or int(value) != value:
                    raise ConfigurationError(f"{name} must be an integer, got {value!r}")
                object.__setattr__(self, name, int(value))
            else:
                object.__setattr__(self, name, float(value))
                if not math.isfinite(getattr(self, name)):
                    raise ConfigurationError(f"{name} must be finite, got {value!r}")
            if getattr(self, name) <= 0:
                raise ConfigurationError(f"{name} must be strictly positive, got {value!r}")

    def replace(self, **changes) -> "WsnConfig":
        data = self.to_dict()
        data.update(changes)
        return WsnConfig(**data)

    def to_dict(self) -> dict:
        return asdict(self)

    def vector(self) -> tuple:
        return tuple(getattr(self, name) for name in PARAMETER_NAMES)


@dataclass(frozen=True)
class ArenaSpec:
    """Rectangular deployment area and the stimulus process running over it."""

    width: float = 500.0
    height: float = 500.0
    stimulus_rate: float = 10.0
    duration: int = 240
    initial_battery: float = 2.0e7
    stimulus_lifetime: int = 10

    def __post_init__(self):
        object.__setattr__(self, "width", float(self.width))
        object.__setattr__(self, "height", float(self.height))
        object.__setattr__(self, "stimulus_rate", float(self.stimulus_rate))
        object.__setattr__(self, "initial_battery", float(self.initial_battery))
        if int(self.duration) != self.duration:
            raise ConfigurationError(f"duration must be an integer tick count, got {self.duration!r}")
        object.__setattr__(self, "duration", int(self.duration))
        if int(self.stimulus_lifetime) != self.stimulus_lifetime or self.stimulus_lifetime < 1:
            raise ConfigurationError("stimulus_lifetime must be a positive integer tick count")
        object.__setattr__(self, "stimulus_lifetime", int(self.stimulus_lifetime))
        if not (self.width > 0 and self.height > 0):
            raise ConfigurationError("arena width and height must be positive")
        # duration 0 is accepted: a run of zero ticks is well defined
        if self.duration < 0:
            raise ConfigurationError("duration must be non-negative")
        if not self.stimulus_rate >= 0 or not math.isfinite(self.stimulus_rate):
            raise ConfigurationError("stimulus_rate must be a finite value >= 0")
        if not self.initial_battery > 0 or not math.isfinite(self.initial_battery):
            raise ConfigurationError("initial_battery must be a finite value > 0")

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def diagonal(self) -> float:
        return math.hypot(self.width, self.height)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class CostModel:
    """Per-activity energy constants, in abstract energy units.

    Radio constants follow the first-order radio model.  Sensing and
    route-control constants are sized so that, at mid-range configurations,
    sensing, neighbor monitoring, relaying and routing stay within roughly
    an order of magnitude of one another.
    """

    e_elec: float = 50.0
    e_amp: float = 0.01
    e_sense_base: float = 100.0
    e_sense_area: float = 2.0
    e_beacon: float = 20.0
    e_route_ctl: float = 300.0
    packet_bits: int = 1024
    ctl_bits: int = 128
    beacon_period: int = 10

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name in ("packet_bits", "ctl_bits", "beacon_period"):
                if int(value) != value:
                    raise ConfigurationError(f"{f.name} must be an integer, got {value!r}")
                value = int(value)
            else:
                value = float(value)
            if not (value > 0 and math.isfinite(value)):
                raise ConfigurationError(f"{f.name} must be strictly positive, got {value!r}")
            object.__setattr__(self, f.name, value)

    def to_dict(self) -> dict:
        return asdict(self)


def validate_against_arena(config: WsnConfig, arena: ArenaSpec) -> int:
    """Check the cross-record invariants and return the node count."""
    if config.sense_radius > arena.diagonal:
        raise ConfigurationError("sense_radius exceeds the arena diagonal")
    if config.transmission_radius > arena.diagonal:
        raise ConfigurationError("transmission_radius exceeds the arena diagonal")
    n = node_count(config, arena)
    if n < 1:
        raise ConfigurationError(
            f"network_density {config.network_density} on a {arena.width:g}x{arena.height:g} "
            "arena yields no nodes"
        )
    return n


def node_count(config: WsnConfig, arena: ArenaSpec) -> int:
    return math.floor(config.network_density * arena.area)


# --- flat key = value files -------------------------------------------------


def parse_key_values(text: str, source: str = "<string>") -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    result: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ConfigurationError(f"{source}:{lineno}: empty key or value in {raw!r}")
        if key in result:
            raise ConfigurationError(f"{source}:{lineno}: duplicate key {key!r}")
        result[key] = value
    return result


def read_key_values(path) -> dict[str, str]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc}") from exc
    return parse_key_values(text, source=str(path))


def _number(key: str, value: str) -> float | int:
    try:
        return int(value)
    except ValueError:
        pass
    try:
        return float(value)
    except ValueError:
        raise ConfigurationError(f"{key}: expected a number, got {value!r}") from None


def _pick(cls, mapping: Mapping[str, Any]):
    names = {f.name for f in fields(cls)}
    kwargs = {
        key: (_number(key, value) if isinstance(value, str) else value)
        for key, value in mapping.items()
        if key in names
    }
    return cls(**kwargs)


def arena_from_mapping(mapping: Mapping[str, Any]) -> ArenaSpec:
    return _pick(ArenaSpec, mapping)


def cost_from_mapping(mapping: Mapping[str, Any]) -> CostModel:
    return _pick(CostModel, mapping)


def wsn_config_from_mapping(mapping: Mapping[str, Any], base: WsnConfig | None = None) -> WsnConfig:
    """Baseline configuration: bare parameter keys override ``base``."""
    data = (base or WsnConfig()).to_dict()
    for name in PARAMETER_NAMES:
        if name in mapping:
            value = mapping[name]
            data[name] = _number(name, value) if isinstance(value, str) else value
    return WsnConfig(**data)


KNOWN_KEYS = (
    {f.name for f in fields(ArenaSpec)}
    | {f.name for f in fields(CostModel)}
    | set(PARAMETER_NAMES)
    | {f"{name}.{end}" for name in PARAMETER_NAMES for end in ("low", "high")}
)


def check_known_keys(mapping: Mapping[str, Any]) -> None:
    unknown = sorted(set(mapping) - KNOWN_KEYS)
    if unknown:
        raise ConfigurationError(f"unknown config keys: {', '.join(unknown)}")
