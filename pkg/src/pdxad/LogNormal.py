import math
from typing import Any

from . import admath
from .Tape import Tape
from .VarRef import VarRef

HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)


def log_normal_density(y: Any, mu: Any, sigma: Any) -> Any:
    """
    log N(y | mu, sigma) = -0.5 ((y - mu) / sigma)^2 - log(sigma) - 0.5 log(2 pi)

    On tape handles this records seven operations after the three inputs.
    """
    z = (y - mu) / sigma
    return -0.5 * admath.square(z) - admath.log(sigma) - HALF_LOG_TWO_PI


def log_normal_graph(y: float = 10.0, mu: float = 5.0, sigma: float = 2.0,
                     tape: Tape | None = None) -> tuple[Tape, VarRef]:
    """
    Records the log-normal density on a tape, inputs first.

    Returns:
        The tape and the handle of the density.
    """
    tape = tape if tape is not None else Tape()
    y_ref, mu_ref, sigma_ref = tape.new_input(y), tape.new_input(mu), tape.new_input(sigma)
    return tape, log_normal_density(y_ref, mu_ref, sigma_ref)
