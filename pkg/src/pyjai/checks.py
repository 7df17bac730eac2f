import math
from typing import Optional

from validators import between

from pyjai.exceptions import ParameterError


def require_open(name: str, value: float, low: float, high: float) -> float:
    """Ensure ``low < value < high`` and return ``value``.

    :raises ParameterError: If the value is not finite or lies outside the interval.
    """
    if not (math.isfinite(value) and low < value < high):
        msg = f"{name} must lie in the open interval ({low}, {high}), got {value}"
        raise ParameterError(msg, {name: value})
    return value


def require_range(
    name: str,
    value: float,
    low: Optional[float] = None,
    high: Optional[float] = None,
) -> float:
    """Ensure ``low <= value <= high`` (either bound optional) and return ``value``.

    :raises ParameterError: If the value is not finite or out of bounds.
    """
    if not math.isfinite(value) or not between(value, min_val=low, max_val=high):
        msg = f"{name} must lie in [{low}, {high}], got {value}"
        raise ParameterError(msg, {name: value})
    return value


def require_positive(name: str, value: float) -> float:
    """Ensure ``value > 0`` and finite."""
    if not (math.isfinite(value) and value > 0):
        msg = f"{name} must be strictly positive, got {value}"
        raise ParameterError(msg, {name: value})
    return value
