"""
Hop budget against energy and delivery
======================================

Sweep the hop budget with repeated seeds. Energy climbs with the budget
because route-maintenance floods reach further, while delivery levels off
once the budget covers the usual path to the sinks.
"""

from wsnsens import ArenaSpec, CostModel, WsnConfig, sweep

result = sweep(
    "num_hops",
    [1, 2, 3, 4, 6, 8, 12, 16, 20],
    WsnConfig(),
    ArenaSpec(duration=120),
    CostModel(),
    repeats=8,
    master_seed=1,
)

# The CSV is ready for any plotting tool; print a crude text plot instead.
print(result.to_csv())
top = max(row.mean_energy for row in result.rows)
for row in result.rows:
    bar = "#" * int(40 * row.mean_energy / top)
    print(f"{int(row.value):3d} hops  {bar:40s}  delivered {row.mean_delivered:7.1f} +/- {row.std_delivered:.1f}")
