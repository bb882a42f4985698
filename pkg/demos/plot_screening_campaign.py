"""
Screening the eight parameters
==============================

Sample configurations, simulate each one, then test every parameter
against total energy. Effective rows carry a star.
"""

import tempfile
from pathlib import Path

from wsnsens import ArenaSpec, CostModel, ParameterSpace, execute_plan, extract_effective, sample_configs
from wsnsens.profiler import load_dataset, save_dataset

# A short run length keeps this at desk scale (well under a minute on one core).
space = ParameterSpace()
plan = sample_configs(space, 300, scheme="latin-hypercube", master_seed=3)
dataset = execute_plan(plan, ArenaSpec(duration=60), CostModel(), workers=2)

# Datasets are JSON lines: a header with the arena, costs and space, then one run per line.
path = Path(tempfile.mkdtemp()) / "campaign.jsonl"
save_dataset(dataset, path)
print(path.read_text().splitlines()[1][:120], "...")

report = extract_effective(load_dataset(path), alpha=0.05)
print(report.to_text())
print("effective:", ", ".join(report.effective))
