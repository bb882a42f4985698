"""Profiling campaigns: sample configurations, run them, persist the results.

Datasets are JSON Lines files.  The first line is a header describing the
shared arena, cost model, parameter space and sampling scheme; every other
line is one :class:`~wsnsens.sim.RunRecord`.
"""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .config import (
    INTEGER_PARAMETERS,
    PARAMETER_NAMES,
    ArenaSpec,
    CostModel,
    WsnConfig,
)
from .errors import ConfigurationError, DatasetIntegrityError, DatasetParseError
from .sim import RunRecord, run

SCHEMES = ("uniform", "latin-hypercube")

DEFAULT_BOUNDS = {
    "sensor_interval": (1, 30),
    "sense_radius": (5.0, 50.0),
    "transmission_radius": (20.0, 100.0),
    "transmission_interval": (1, 30),
    "num_neighbors": (2, 20),
    "num_hops": (1, 20),
    "network_density": (0.0002, 0.002),
    "num_sinks": (1, 8),
}


@dataclass(frozen=True)
class Dimension:
    name: str
    low: float
    high: float
    integer: bool


@dataclass(frozen=True)
class ParameterSpace:
    """Sampling bounds for the eight configuration parameters."""

    bounds: Mapping[str, tuple] = field(default_factory=lambda: dict(DEFAULT_BOUNDS))

    def __post_init__(self):
        missing = set(PARAMETER_NAMES) - set(self.bounds)
        extra = set(self.bounds) - set(PARAMETER_NAMES)
        if missing or extra:
            raise ConfigurationError(
                f"parameter space must cover exactly the eight parameters "
                f"(missing {sorted(missing)}, unknown {sorted(extra)})"
            )
        clean = {}
        for name in PARAMETER_NAMES:
            low, high = self.bounds[name]
            if name in INTEGER_PARAMETERS:
                if int(low) != low or int(high) != high:
                    raise ConfigurationError(f"{name}: integer dimension needs integer bounds")
                low, high = int(low), int(high)
            else:
                low, high = float(low), float(high)
            if not low < high:
                raise ConfigurationError(f"{name}: need low < high, got ({low}, {high})")
            if low <= 0:
                raise ConfigurationError(f"{name}: lower bound must be positive")
            clean[name] = (low, high)
        object.__setattr__(self, "bounds", clean)

    @property
    def dimensions(self) -> list[Dimension]:
        return [
            Dimension(name, *self.bounds[name], name in INTEGER_PARAMETERS)
            for name in PARAMETER_NAMES
        ]

    def contains(self, config: WsnConfig) -> bool:
        return all(low <= getattr(config, name) <= high for name, (low, high) in self.bounds.items())

    def to_dict(self) -> dict:
        return {name: [low, high] for name, (low, high) in self.bounds.items()}

    @classmethod
    def from_dict(cls, data: Mapping) -> "ParameterSpace":
        return cls({name: tuple(v) for name, v in data.items()})


def space_from_mapping(mapping: Mapping[str, str]) -> ParameterSpace:
    """Read ``name.low`` / ``name.high`` keys over the default bounds."""
    bounds = dict(DEFAULT_BOUNDS)
    for name in PARAMETER_NAMES:
        low, high = bounds[name]
        for end in ("low", "high"):
            key = f"{name}.{end}"
            if key in mapping:
                try:
                    value = float(mapping[key])
                except ValueError:
                    raise ConfigurationError(f"{key}: expected a number, got {mapping[key]!r}") from None
                if end == "low":
                    low = value
                else:
                    high = value
        bounds[name] = (low, high)
    return ParameterSpace(bounds)


@dataclass(frozen=True)
class SamplePlan:
    configs: tuple[WsnConfig, ...]
    seeds: tuple[int, ...]
    scheme: str
    master_seed: int
    # design in the unit hypercube, shape (M, 8); integer dimensions are
    # discretized from these coordinates
    unit: np.ndarray = field(repr=False, compare=False, default=None)

    def __len__(self) -> int:
        return len(self.configs)


def derive_seed(master_seed: int, index: int) -> int:
    """Per-run seed: first 8 bytes of BLAKE2b(``"<master>:<index>"``), top bit cleared."""
    digest = hashlib.blake2b(f"{int(master_seed)}:{int(index)}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big") & (2**63 - 1)


def _latin_hypercube(rng: np.random.Generator, m: int, d: int) -> np.ndarray:
    unit = np.empty((m, d))
    for j in range(d):
        strata = rng.permutation(m)
        unit[:, j] = (strata + rng.random(m)) / m
    return unit


def _scale(dim: Dimension, u: np.ndarray) -> list:
    if dim.integer:
        span = int(dim.high) - int(dim.low) + 1
        values = np.minimum(np.floor(u * span).astype(np.int64), span - 1) + int(dim.low)
        return [int(v) for v in values]
    values = dim.low + u * (dim.high - dim.low)
    return [float(v) for v in values]


def sample_configs(
    space: ParameterSpace,
    m: int,
    scheme: str = "uniform",
    master_seed: int = 0,
) -> SamplePlan:
    """Draw ``m`` configurations from ``space``.

    ``uniform`` draws every dimension independently (integers uniformly over
    the inclusive range).  ``latin-hypercube`` puts exactly one sample in
    each of ``m`` equal strata per dimension.
    """
    if m < 0:
        raise ConfigurationError("sample count must be >= 0")
    if scheme not in SCHEMES:
        raise ConfigurationError(f"unknown scheme {scheme!r}; choose from {', '.join(SCHEMES)}")
    dims = space.dimensions
    if m > 0:
        for dim in dims:
            if dim.integer and int(dim.high) == int(dim.low):
                raise ConfigurationError(f"{dim.name}: degenerate integer range")
    rng = np.random.default_rng(np.random.SeedSequence([int(master_seed), SCHEMES.index(scheme)]))
    if scheme == "uniform":
        unit = rng.random((m, len(dims)))
    else:
        unit = _latin_hypercube(rng, m, len(dims))
    columns = [_scale(dim, unit[:, j]) for j, dim in enumerate(dims)]
    configs = tuple(
        WsnConfig(**{dim.name: columns[j][i] for j, dim in enumerate(dims)}) for i in range(m)
    )
    seeds = tuple(derive_seed(master_seed, i) for i in range(m))
    return SamplePlan(configs, seeds, scheme, int(master_seed), unit)


class PlanExecutionError(ConfigurationError):
    def __init__(self, index: int, cause: Exception):
        self.index = index
        super().__init__(f"run {index} failed: {cause}")


@dataclass(frozen=True)
class ProfileDataset:
    records: tuple[RunRecord, ...]
    arena: ArenaSpec
    cost: CostModel
    space: ParameterSpace | None = None
    scheme: str | None = None
    master_seed: int | None = None

    @property
    def M(self) -> int:
        return len(self.records)

    def __len__(self) -> int:
        return len(self.records)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r.config, name) for r in self.records], dtype=float)

    def energy(self) -> np.ndarray:
        return np.array([r.total_energy for r in self.records], dtype=float)


def _run_indexed(job):
    index, config, arena, cost, seed = job
    try:
        return index, run(config, arena, cost, seed), None
    except ConfigurationError as exc:
        return index, None, str(exc)


def execute_plan(
    plan: SamplePlan,
    arena: ArenaSpec,
    cost: CostModel,
    workers: int = 1,
    space: ParameterSpace | None = None,
) -> ProfileDataset:
    """Run every configuration of ``plan``; record order follows the plan."""
    if workers < 1:
        raise ConfigurationError("workers must be >= 1")
    jobs = [(i, c, arena, cost, s) for i, (c, s) in enumerate(zip(plan.configs, plan.seeds))]
    if workers == 1 or len(jobs) <= 1:
        results = map(_run_indexed, jobs)
    else:
        pool = ProcessPoolExecutor(max_workers=workers)
        results = pool.map(_run_indexed, jobs, chunksize=max(1, len(jobs) // (4 * workers)))
    records: list[RunRecord | None] = [None] * len(jobs)
    try:
        for index, record, error in results:
            if error is not None:
                raise PlanExecutionError(index, ConfigurationError(error))
            records[index] = record
    finally:
        if workers > 1 and len(jobs) > 1:
            pool.shutdown(cancel_futures=True)
    return ProfileDataset(tuple(records), arena, cost, space, plan.scheme, plan.master_seed)


# --- persistence -------------------------------------------------------------


def _format_energy(value: float) -> str:
    # 17 significant digits: exact round trip for IEEE doubles
    if not math.isfinite(value):
        raise ValueError("energy must be finite")
    return f"{value:.16e}"


def record_to_json(record: RunRecord) -> str:
    data = record.to_dict()
    data["total_energy"] = "@ENERGY@"
    text = json.dumps(data, sort_keys=False, separators=(", ", ": "))
    return text.replace('"@ENERGY@"', _format_energy(record.total_energy))


def _header(dataset: ProfileDataset) -> dict:
    return {
        "arena": dataset.arena.to_dict(),
        "cost": dataset.cost.to_dict(),
        "space": dataset.space.to_dict() if dataset.space is not None else None,
        "scheme": dataset.scheme,
        "master_seed": dataset.master_seed,
        "M": dataset.M,
    }


def dumps_dataset(dataset: ProfileDataset) -> str:
    lines = [json.dumps(_header(dataset), separators=(", ", ": "))]
    lines.extend(record_to_json(r) for r in dataset.records)
    return "\n".join(lines) + "\n"


def save_dataset(dataset: ProfileDataset, destination) -> Path:
    path = Path(destination)
    path.write_text(dumps_dataset(dataset), encoding="utf-8", newline="\n")
    return path


def _parse_line(line: str, lineno: int) -> dict:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise DatasetParseError(f"invalid JSON ({exc.msg})", line=lineno) from None
    if not isinstance(obj, dict):
        raise DatasetParseError("expected a JSON object", line=lineno)
    return obj


def loads_dataset(text: str) -> ProfileDataset:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise DatasetParseError("missing header", line=1)
    header = _parse_line(lines[0], 1)
    try:
        arena = ArenaSpec(**header["arena"])
        cost = CostModel(**header["cost"])
        space = ParameterSpace.from_dict(header["space"]) if header.get("space") else None
    except (KeyError, TypeError, ConfigurationError) as exc:
        raise DatasetParseError(f"bad header: {exc}", line=1) from None

    records = []
    for lineno, line in enumerate(lines[1:], start=2):
        obj = _parse_line(line, lineno)
        if "arena" in obj or "cost" in obj:
            if obj.get("arena") != header["arena"] or obj.get("cost") != header["cost"]:
                raise DatasetIntegrityError(
                    f"line {lineno}: header disagrees with the dataset header (arena/cost differ)"
                )
            continue
        try:
            records.append(RunRecord.from_dict(obj))
        except (KeyError, TypeError, ValueError) as exc:
            raise DatasetParseError(f"bad run record: {exc}", line=lineno) from None

    declared = header.get("M")
    if declared is not None and declared != len(records):
        raise DatasetIntegrityError(f"header declares M={declared} but {len(records)} records follow")
    return ProfileDataset(
        tuple(records), arena, cost, space, header.get("scheme"), header.get("master_seed")
    )


def load_dataset(source) -> ProfileDataset:
    return loads_dataset(Path(source).read_text(encoding="utf-8"))


def dataset_from_records(
    records: Iterable[RunRecord],
    arena: ArenaSpec | None = None,
    cost: CostModel | None = None,
) -> ProfileDataset:
    return ProfileDataset(tuple(records), arena or ArenaSpec(), cost or CostModel())


def dataset_from_columns(
    columns: Mapping[str, Sequence[float]],
    energy: Sequence[float],
    arena: ArenaSpec | None = None,
) -> ProfileDataset:
    """Wrap raw parameter columns and energies as a dataset (synthetic data).

    Values are not range-checked against any parameter space, but each must
    still be a valid configuration value (positive; integer where required).
    """
    m = len(energy)
    records = []
    for i in range(m):
        values = {name: columns[name][i] for name in PARAMETER_NAMES}
        records.append(
            RunRecord(
                config=WsnConfig(**values),
                seed=i,
                total_energy=float(energy[i]),
                packets_generated=0,
                packets_delivered=0,
                nodes_died=0,
                duration=0,
            )
        )
    return dataset_from_records(records, arena)
