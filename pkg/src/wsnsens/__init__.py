"""Energy sensitivity screening for wireless sensor network configurations."""

from .config import PARAMETER_NAMES, ArenaSpec, CostModel, WsnConfig
from .errors import (
    ConfigurationError,
    DatasetIntegrityError,
    DatasetParseError,
    DegenerateInputError,
    InsufficientDataError,
    WsnError,
)
from .profiler import (
    ParameterSpace,
    ProfileDataset,
    execute_plan,
    load_dataset,
    sample_configs,
    save_dataset,
)
from .sim import RunRecord, build_world, run, run_world, step
from .stats import (
    SensitivityReport,
    corr_p_value,
    extract_effective,
    linear_corr,
    order_m_corr,
)
from .sweep import SweepResult, sweep

__version__ = "0.1.0"

__all__ = [
    "PARAMETER_NAMES",
    "ArenaSpec",
    "ConfigurationError",
    "CostModel",
    "DatasetIntegrityError",
    "DatasetParseError",
    "DegenerateInputError",
    "InsufficientDataError",
    "ParameterSpace",
    "ProfileDataset",
    "RunRecord",
    "SensitivityReport",
    "SweepResult",
    "WsnConfig",
    "WsnError",
    "build_world",
    "corr_p_value",
    "execute_plan",
    "extract_effective",
    "linear_corr",
    "load_dataset",
    "order_m_corr",
    "run",
    "run_world",
    "sample_configs",
    "save_dataset",
    "step",
    "sweep",
]
