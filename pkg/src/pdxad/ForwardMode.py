from typing import Any, Callable, Sequence

import numpy as np

from .Dual import Dual
from .admath import value_of
from .utils import as_float_vector, get_as_tuple


def tangent_of(x: Any) -> float:
    """
    Tangent of a dual number; outputs that are plain numbers do not depend on the input.
    """
    if isinstance(x, Dual):
        return x.tangent
    return 0.0


def directional_derivative(f: Callable[[list[Dual]], Any], x: Sequence[float],
                           u: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """
    One forward sweep: evaluates f at x on dual numbers seeded with the direction u.

    Args:
        f: Program over a list of scalars, returning a scalar or a sequence of scalars.
        x: Evaluation point.
        u: Seed direction, same length as x.

    Returns:
        (f(x), J·u) as float arrays.
    """
    x = as_float_vector(x, "x")
    u = as_float_vector(u, "u", len(x))
    outputs = get_as_tuple(f([Dual(value, tangent) for value, tangent in zip(x, u)]))
    values = np.array([value_of(out) for out in outputs], dtype=float)
    tangents = np.array([tangent_of(out) for out in outputs], dtype=float)
    return values, tangents
