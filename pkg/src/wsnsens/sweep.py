"""One-parameter sweeps over a baseline configuration.

Every swept value is run with the same ``repeats`` seeds (common random
numbers), so differences between rows come from the parameter, not from
different deployments.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import INTEGER_PARAMETERS, PARAMETER_NAMES, ArenaSpec, CostModel, WsnConfig
from .errors import ConfigurationError
from .profiler import SamplePlan, derive_seed, execute_plan

SWEEP_HEADER = ("value", "mean_energy", "std_energy", "mean_delivered", "std_delivered", "repeats")


@dataclass(frozen=True)
class SweepRow:
    value: float
    mean_energy: float
    std_energy: float
    mean_delivered: float
    std_delivered: float
    repeats: int


@dataclass(frozen=True)
class SweepResult:
    parameter_name: str
    rows: tuple[SweepRow, ...]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(SWEEP_HEADER)
        for r in self.rows:
            value = str(int(r.value)) if self.parameter_name in INTEGER_PARAMETERS else repr(float(r.value))
            writer.writerow(
                [
                    value,
                    f"{r.mean_energy:.10e}",
                    f"{r.std_energy:.10e}",
                    f"{r.mean_delivered:.6f}",
                    f"{r.std_delivered:.6f}",
                    r.repeats,
                ]
            )
        return buf.getvalue()


def _sem(values: np.ndarray) -> float:
    # standard error of the mean; zero for a single repeat
    if len(values) < 2:
        return 0.0
    return float(np.std(values, ddof=1) / math.sqrt(len(values)))


def sweep(
    parameter: str,
    values: Sequence[float],
    baseline: WsnConfig,
    arena: ArenaSpec,
    cost: CostModel,
    repeats: int = 20,
    master_seed: int = 0,
    workers: int = 1,
) -> SweepResult:
    """Run ``repeats`` simulations per value of ``parameter``.

    Rows report the mean over repeats and the standard error of that mean.
    """
    if parameter not in PARAMETER_NAMES:
        raise ConfigurationError(
            f"unknown parameter {parameter!r}; valid names: {', '.join(PARAMETER_NAMES)}"
        )
    if repeats < 1:
        raise ConfigurationError("repeats must be >= 1")
    seeds = [derive_seed(master_seed, r) for r in range(repeats)]
    configs = []
    for v in values:
        configs.extend([baseline.replace(**{parameter: v})] * repeats)
    plan = SamplePlan(tuple(configs), tuple(seeds * len(values)), "sweep", int(master_seed))
    dataset = execute_plan(plan, arena, cost, workers=workers)
    rows = []
    for i, v in enumerate(values):
        chunk = dataset.records[i * repeats : (i + 1) * repeats]
        energy = np.array([rec.total_energy for rec in chunk])
        delivered = np.array([rec.packets_delivered for rec in chunk], dtype=float)
        rows.append(
            SweepRow(
                value=getattr(chunk[0].config, parameter),
                mean_energy=float(energy.mean()),
                std_energy=_sem(energy),
                mean_delivered=float(delivered.mean()),
                std_delivered=_sem(delivered),
                repeats=repeats,
            )
        )
    return SweepResult(parameter, tuple(rows))
