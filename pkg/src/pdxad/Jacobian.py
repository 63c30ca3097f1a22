import logging
from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np

from .AdEnums import JacobianMode, SeedRole
from .AdErrors import DimensionMismatchError
from .ForwardMode import directional_derivative
from .Tape import Tape
from .VarRef import VarRef
from .logger import AD_LOGGER_NAME
from .utils import as_float_vector, get_as_tuple

ad_logger = logging.getLogger(AD_LOGGER_NAME)

type JacobianMatrix = np.ndarray


@dataclass(frozen=True)
class SeedVector:
    """
    Seed of a sweep: a tangent u for forward mode or a cotangent w for reverse mode.
    """
    entries: np.ndarray
    role: SeedRole

    @classmethod
    def basis(cls, size: int, index: int, role: SeedRole) -> "SeedVector":
        if not 0 <= index < size:
            raise DimensionMismatchError(f"Basis index {index} out of range for size {size}")
        entries = np.zeros(size)
        entries[index] = 1.0
        return cls(entries, role)


def select_mode(n: int, m: int) -> JacobianMode:
    """
    Reverse mode needs m sweeps and forward mode n; reverse wins only when n > m.
    """
    return JacobianMode.REVERSE if n > m else JacobianMode.FORWARD


def jacobian_forward(f: Callable[[list[Any]], Any], x: Sequence[float], m: int) -> JacobianMatrix:
    """
    Builds the m x n Jacobian column by column with n forward sweeps.
    """
    x = as_float_vector(x, "x")
    n = len(x)
    jacobian = np.zeros((m, n))
    for j in range(n):
        _, column = directional_derivative(f, x, SeedVector.basis(n, j, SeedRole.TANGENT).entries)
        if len(column) != m:
            raise DimensionMismatchError(f"f returned {len(column)} outputs, expected {m}")
        jacobian[:, j] = column
    return jacobian


def jacobian_reverse(f: Callable[[list[Any]], Any], x: Sequence[float], tape: Tape | None = None) -> JacobianMatrix:
    """
    Records f once, then builds the Jacobian row by row with one reverse sweep per output over that
    same recording. Each sweep only visits the nodes its output depends on.

    Args:
        f: Program over a list of scalars.
        x: Evaluation point.
        tape (Tape | None): Tape to record on. A tape created here is cleared afterwards; a caller's
            tape keeps the recording.
    """
    x = as_float_vector(x, "x")
    owns_tape = tape is None
    tape = Tape() if owns_tape else tape
    try:
        inputs = [tape.new_input(value) for value in x]
        outputs = get_as_tuple(f(inputs))
        m = len(outputs)
        jacobian = np.zeros((m, len(x)))
        for i, output in enumerate(outputs):
            if isinstance(output, VarRef):
                jacobian[i] = tape.reverse_sweep_reachable(output, inputs)
        return jacobian
    finally:
        if owns_tape:
            tape.clear()


def jacobian_auto(f: Callable[[list[Any]], Any], x: Sequence[float], m: int,
                  tape: Tape | None = None) -> JacobianMatrix:
    n = len(x)
    mode = select_mode(n, m)
    ad_logger.debug("Jacobian %dx%d in %s mode", m, n, mode.value)
    if mode is JacobianMode.REVERSE:
        jacobian = jacobian_reverse(f, x, tape)
        if jacobian.shape[0] != m:
            raise DimensionMismatchError(f"f returned {jacobian.shape[0]} outputs, expected {m}")
        return jacobian
    return jacobian_forward(f, x, m)


def sweep_count(n: int, m: int) -> int:
    """
    Number of sweeps jacobian_auto performs for an m x n Jacobian.
    """
    return m if select_mode(n, m) is JacobianMode.REVERSE else n
