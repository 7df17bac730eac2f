# Copyright 2024 The pyjai developers
#
# This file is part of pyjai
#
# pyjai is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# pyjai is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with pyjai. If not, see <http://www.gnu.org/licenses/>.


from typing import Any, Optional

from pyjai.constants import (
    EXIT_CONFIG_ERROR,
    EXIT_DATA_ERROR,
    EXIT_DEGENERATE,
    EXIT_FAILURE,
)


class JumpActivityError(Exception):
    """Base class of every error raised by pyjai.

    :param str message: Human readable description.
    :param dict details: Structured context (offending value, index, ...).
    """

    exit_code: int = EXIT_FAILURE

    def __init__(
        self,
        message: str,
        details: Optional[dict[str, Any]] = None,
    ) -> None:
        """Initialize the exception."""
        self.details = details or {}
        super().__init__(message)


class ParameterError(JumpActivityError, ValueError):
    """A parameter lies outside the domain of the operation."""

    exit_code = EXIT_CONFIG_ERROR


class ConfigError(JumpActivityError):
    """A configuration file or flag could not be parsed or validated."""

    exit_code = EXIT_CONFIG_ERROR

    def __init__(
        self,
        message: str,
        section: Optional[str] = None,
        key: Optional[str] = None,
        line: Optional[int] = None,
    ) -> None:
        """Initialize the exception with the location of the problem."""
        self.section = section
        self.key = key
        self.line = line
        where = ", ".join(
            f"{name}={value}"
            for name, value in (("section", section), ("key", key), ("line", line))
            if value is not None
        )
        if where:
            message = f"{message} ({where})"
        super().__init__(message, {"section": section, "key": key, "line": line})


class DataError(JumpActivityError):
    """Observed data is malformed (ingestion, monotonicity, finiteness)."""

    exit_code = EXIT_DATA_ERROR

    def __init__(self, message: str, row: Optional[int] = None) -> None:
        """Initialize the exception, optionally naming the offending row."""
        self.row = row
        if row is not None:
            message = f"{message} (row {row})"
        super().__init__(message, {"row": row})


class InsufficientDataError(DataError):
    """Too few observations for the requested windows."""


class DegenerateDataError(DataError):
    """Data makes a statistic undefined, e.g. a zero local scale."""


class DegenerateStatisticError(JumpActivityError):
    """An empirical characteristic function value makes the estimator undefined."""

    exit_code = EXIT_DEGENERATE


class SimulationError(JumpActivityError):
    """The Euler scheme produced a non-finite state."""

    def __init__(self, message: str, time: Optional[float] = None) -> None:
        """Initialize the exception with the failing time."""
        self.time = time
        super().__init__(message, {"time": time})


class StudyError(JumpActivityError):
    """A Monte Carlo study cell failed too often to be reported."""
