"""
Pydantic schemas for glstep run configurations and result records
"""

from .run import (
    BarrierConfig,
    DegennesConfig,
    EnergySource,
    FiberConfig,
    Gl1dConfig,
    OutputFormat,
    PhaseConfig,
    ResultRecord,
    RunConfig,
    StripConfig,
    SurfaceConfig,
    parse_grid,
)

__all__ = [
    # Shared
    "RunConfig",
    "OutputFormat",
    "EnergySource",
    "parse_grid",

    # Per subcommand
    "DegennesConfig",
    "FiberConfig",
    "Gl1dConfig",
    "SurfaceConfig",
    "StripConfig",
    "BarrierConfig",
    "PhaseConfig",

    # Results
    "ResultRecord",
]
