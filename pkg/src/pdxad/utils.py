import math
from typing import Any, Sequence

import numpy as np

from .AdErrors import DimensionMismatchError, DomainError
from .admath import value_of


def get_as_tuple[T](value: T | Sequence[T] | None) -> tuple[T, ...]:
    """
    Returns the value as a tuple.
    If the value is None, returns an empty tuple.
    If the value is a list, tuple or 1-d array, returns a tuple of its elements.
    Otherwise, returns a tuple with the value itself.
    """
    if value is None:
        return ()
    if isinstance(value, (list, tuple)):
        return tuple(value)
    if isinstance(value, np.ndarray):
        return tuple(value.ravel().tolist()) if value.dtype != object else tuple(value.ravel())
    return (value,)


def as_float_vector(values: Sequence[float] | np.ndarray | float, name: str = "vector",
                    length: int | None = None) -> np.ndarray:
    """
    Converts the values into a finite 1-d float array.

    Raises:
        DimensionMismatchError: if ``length`` is given and does not match.
        DomainError: if an entry is NaN or infinite.
    """
    vector = np.atleast_1d(np.asarray(values, dtype=float))
    if vector.ndim != 1:
        raise DimensionMismatchError(f"{name} must be one-dimensional, got shape {vector.shape}")
    if length is not None and vector.shape[0] != length:
        raise DimensionMismatchError(f"{name} has length {vector.shape[0]}, expected {length}")
    if not np.all(np.isfinite(vector)):
        raise DomainError(f"{name} contains non-finite entries")
    return vector


def check_finite(value: float, name: str = "value") -> float:
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


def max_norm(values: Sequence[Any]) -> float:
    """
    Max-norm of a vector of floats or differentiable scalars (by value).
    """
    return max((abs(value_of(v)) for v in values), default=0.0)
