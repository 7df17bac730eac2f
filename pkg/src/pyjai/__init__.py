"""Estimation of the jump activity index from irregularly sampled prices."""

from pyjai.api import JumpActivityAPI
from pyjai.exceptions import (
    ConfigError,
    DataError,
    DegenerateDataError,
    DegenerateStatisticError,
    InsufficientDataError,
    JumpActivityError,
    ParameterError,
    SimulationError,
    StudyError,
)

__all__ = [
    "ConfigError",
    "DataError",
    "DegenerateDataError",
    "DegenerateStatisticError",
    "InsufficientDataError",
    "JumpActivityAPI",
    "JumpActivityError",
    "ParameterError",
    "SimulationError",
    "StudyError",
]
