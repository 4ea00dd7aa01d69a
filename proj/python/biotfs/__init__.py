"""Fixed-stress and parallel-in-time fixed-stress splitting for Biot consolidation."""

from ._core import (
    ConfigError,
    MandelParams,
    MandelSolution,
    Material,
    RunConfig,
    RunOutcome,
    mandel_preset,
    preset_names,
    run,
    theoretical_rate,
)

__all__ = [
    "ConfigError",
    "MandelParams",
    "MandelSolution",
    "Material",
    "RunConfig",
    "RunOutcome",
    "mandel_preset",
    "preset_names",
    "run",
    "theoretical_rate",
]
