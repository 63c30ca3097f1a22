from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np

from . import admath
from .AdErrors import DimensionMismatchError, DomainError
from .Tape import Tape
from .admath import value_of


@dataclass(frozen=True)
class Mat2:
    """
    Row-major 2x2 matrix [[a, b], [c, d]] over any scalar type.
    """
    a: Any
    b: Any
    c: Any
    d: Any

    @classmethod
    def from_sequence(cls, values: Sequence[Any]) -> "Mat2":
        flat = np.asarray(values, dtype=object).ravel().tolist()
        if len(flat) != 4:
            raise DimensionMismatchError(f"A 2x2 matrix needs 4 entries, got {len(flat)}")
        return cls(*flat)

    @property
    def entries(self) -> tuple[Any, Any, Any, Any]:
        return self.a, self.b, self.c, self.d

    def to_array(self) -> np.ndarray:
        return np.array([[value_of(self.a), value_of(self.b)], [value_of(self.c), value_of(self.d)]])


def _check_delta_squared(a: Any, b: Any, c: Any, d: Any):
    a, b, c, d = value_of(a), value_of(b), value_of(c), value_of(d)
    delta_squared = (a - d) ** 2 + 4.0 * b * c
    if delta_squared < 0.0:
        raise DomainError(f"Complex eigenvalues: (a - d)^2 + 4bc = {delta_squared!r} < 0")
    if delta_squared == 0.0:
        raise DomainError("Repeated eigenvalue: (a - d)^2 + 4bc = 0")


def matexp_standard(matrix: Mat2) -> Mat2:
    """
    Closed-form exponential of a 2x2 matrix with real distinct eigenvalues, written term by term, so the
    shared subexpressions are recomputed in every entry.

    Raises:
        DomainError: if (a - d)^2 + 4bc is not positive.
    """
    a, b, c, d = matrix.entries
    _check_delta_squared(a, b, c, d)
    delta = admath.sqrt(admath.square(a - d) + 4 * b * c)

    b00 = admath.exp(0.5 * (a + d)) * (delta * admath.cosh(0.5 * delta) + (a - d) * admath.sinh(0.5 * delta))
    b01 = 2 * b * admath.exp(0.5 * (a + d)) * admath.sinh(0.5 * delta)
    b10 = 2 * c * admath.exp(0.5 * (a + d)) * admath.sinh(0.5 * delta)
    b11 = admath.exp(0.5 * (a + d)) * (delta * admath.cosh(0.5 * delta) + (d - a) * admath.sinh(0.5 * delta))

    return Mat2(b00 / delta, b01 / delta, b10 / delta, b11 / delta)


def matexp_optimized(matrix: Mat2) -> Mat2:
    """
    Same result as :func:`matexp_standard`, with every repeated subexpression computed once.
    """
    a, b, c, d = matrix.entries
    _check_delta_squared(a, b, c, d)
    delta = admath.sqrt(admath.square(a - d) + 4 * b * c)

    half_delta = 0.5 * delta
    cosh_half_delta = admath.cosh(half_delta)
    sinh_half_delta = admath.sinh(half_delta)
    exp_half_a_plus_d = admath.exp(0.5 * (a + d))
    two_exp_sinh = 2 * exp_half_a_plus_d * sinh_half_delta
    delta_cosh = delta * cosh_half_delta
    ad_sinh_half_delta = (a - d) * sinh_half_delta

    b00 = exp_half_a_plus_d * (delta_cosh + ad_sinh_half_delta)
    b01 = b * two_exp_sinh
    b10 = c * two_exp_sinh
    b11 = exp_half_a_plus_d * (delta_cosh - ad_sinh_half_delta)

    return Mat2(b00 / delta, b01 / delta, b10 / delta, b11 / delta)


def matexp_sensitivities(implementation: Callable[[Mat2], Mat2], values: Sequence[float] | np.ndarray,
                         tape: Tape | None = None) -> tuple[np.ndarray, np.ndarray, int]:
    """
    Evaluates exp(A) on a tape and computes its 16 partial derivatives with four reverse sweeps over the
    one recording.

    Returns:
        (exp(A) as a 2x2 array, sensitivities S with S[2i + j, 2k + l] = d exp(A)_ij / d A_kl,
        number of recorded nodes including the four inputs)
    """
    tape = tape if tape is not None else Tape()
    start = len(tape)
    flat = np.asarray(values, dtype=float).ravel()
    if flat.shape[0] != 4:
        raise DimensionMismatchError(f"A 2x2 matrix needs 4 entries, got {flat.shape[0]}")
    inputs = [tape.new_input(v) for v in flat]
    result = implementation(Mat2(*inputs))
    node_count = len(tape) - start
    sensitivities = np.zeros((4, 4))
    for row, entry in enumerate(result.entries):
        adjoints = tape.reverse_sweep(entry)
        sensitivities[row] = [adjoints[ref.id] for ref in inputs]
    return result.to_array(), sensitivities, node_count
