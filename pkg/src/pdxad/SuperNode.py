import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, NamedTuple, Sequence

import numpy as np

from . import settings
from .AdErrors import DimensionMismatchError, NonConvergenceError
from .Jacobian import jacobian_auto, sweep_count
from .LinearSolve import solve_dense, solve_float
from .Tape import Tape
from .VarRef import VarRef
from .logger import AD_LOGGER_NAME
from .utils import as_float_vector, get_as_tuple, max_norm

ad_logger = logging.getLogger(AD_LOGGER_NAME)

type Residual = Callable[[list[Any], list[Any]], Any]
type JacobianY = Callable[[list[Any], list[Any]], Sequence[Sequence[Any]]]


@dataclass
class AlgebraicProblem:
    """
    The system f(y, theta) = 0 with y of dimension N and theta of dimension K.

    Attributes:
        residual: (y, theta) -> N residuals. Written over generic scalars so it can run on floats,
            tape handles and dual numbers.
        n_states (int): N.
        n_params (int): K.
        jac_y_analytic: Optional (y, theta) -> N x N partials of the residual in y, also generic.
    """
    residual: Residual
    n_states: int
    n_params: int
    jac_y_analytic: JacobianY | None = None

    def evaluate(self, y: Sequence[Any], theta: Sequence[Any]) -> list[Any]:
        if len(y) != self.n_states:
            raise DimensionMismatchError(f"y has length {len(y)}, expected {self.n_states}")
        if len(theta) != self.n_params:
            raise DimensionMismatchError(f"theta has length {len(theta)}, expected {self.n_params}")
        out = list(get_as_tuple(self.residual(list(y), list(theta))))
        if len(out) != self.n_states:
            raise DimensionMismatchError(f"Residual has length {len(out)}, expected {self.n_states}")
        return out


@dataclass
class SolverConfig:
    """
    Attributes:
        tol (float): Convergence when the max-norm of the residual is at most tol.
        max_iter (int): Newton steps allowed before giving up.
        y0 (Sequence[float] | None): Initial guess, zeros if None.
        step_size (float): Fixed step size alpha in (0, 1]; 1 is the plain Newton step.
    """
    tol: float = field(default_factory=lambda: settings.NEWTON_TOL)
    max_iter: int = field(default_factory=lambda: settings.NEWTON_MAX_ITER)
    y0: Sequence[float] | None = None
    step_size: float = field(default_factory=lambda: settings.NEWTON_STEP_SIZE)

    def __post_init__(self):
        if not self.tol > 0.0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be at least 1, got {self.max_iter}")
        if not 0.0 < self.step_size <= 1.0:
            raise ValueError(f"step_size must lie in (0, 1], got {self.step_size}")

    def initial_guess(self, n_states: int) -> list[float]:
        if self.y0 is None:
            return [0.0] * n_states
        return as_float_vector(self.y0, "y0", n_states).tolist()


class SensitivityResult(NamedTuple):
    solution: np.ndarray
    jacobian: np.ndarray
    tape_nodes: int
    iterations: int
    jy_ad_sweeps: int


def _newton_iterations(problem: AlgebraicProblem, y: list[Any], theta: Sequence[Any], config: SolverConfig,
                       jacobian_y: JacobianY, solve: Callable[[Any, Any], Sequence[Any]],
                       min_steps: int = 0) -> tuple[list[Any], int]:
    norm = math.inf
    for iteration in range(config.max_iter + 1):
        residual = problem.evaluate(y, theta)
        norm = max_norm(residual)
        ad_logger.debug("Newton iteration %d: residual max-norm %.3e", iteration, norm)
        if not math.isfinite(norm):
            break
        if norm <= config.tol and iteration >= min_steps:
            return y, iteration
        if iteration == config.max_iter:
            break
        step = solve(jacobian_y(y, theta), residual)
        if config.step_size == 1.0:
            y = [yi - si for yi, si in zip(y, step)]
        else:
            y = [yi - config.step_size * si for yi, si in zip(y, step)]
    ad_logger.warning("Convergence could not be reached after %d iterations", config.max_iter)
    raise NonConvergenceError(config.max_iter, norm)


def _ad_jacobian_y(problem: AlgebraicProblem) -> JacobianY:
    def jacobian_y(y: Sequence[float], theta: Sequence[float]) -> np.ndarray:
        return jacobian_auto(lambda states: problem.evaluate(states, theta), y, problem.n_states)
    return jacobian_y


def _float_newton(problem: AlgebraicProblem, theta: np.ndarray,
                  config: SolverConfig) -> tuple[np.ndarray, int, int]:
    if problem.jac_y_analytic is not None:
        jacobian_y = problem.jac_y_analytic
        sweeps_per_jacobian = 0
    else:
        jacobian_y = _ad_jacobian_y(problem)
        sweeps_per_jacobian = sweep_count(problem.n_states, problem.n_states)
    y, iterations = _newton_iterations(problem, config.initial_guess(problem.n_states), theta.tolist(), config,
                                       jacobian_y, lambda matrix, rhs: solve_float(matrix, rhs).tolist())
    ad_logger.info("Newton converged in %d iterations", iterations)
    return np.asarray(y, dtype=float), iterations, iterations * sweeps_per_jacobian


def newton_solve(problem: AlgebraicProblem, theta: Sequence[float],
                 config: SolverConfig | None = None) -> np.ndarray:
    """
    Newton's method with a fixed step size on float values.

    J^y is the analytic one when the problem provides it, otherwise it is computed by AD on the residual.

    Raises:
        NonConvergenceError: if the residual max-norm is still above tol after max_iter steps.
        SingularJacobianError: if J^y is singular at an iterate.
    """
    theta = as_float_vector(theta, "theta", problem.n_params)
    y, _, _ = _float_newton(problem, theta, config or SolverConfig())
    return y


def solve_and_diff_naive(problem: AlgebraicProblem, theta: Sequence[float],
                         config: SolverConfig | None = None) -> SensitivityResult:
    """
    Differentiates the solver by recording every Newton iteration on one tape, then sweeping each
    solution component back to theta.

    The analytic J^y is recorded along with the residual. At least one Newton step is always recorded,
    so an initial guess that is already a root still carries the dependence on theta.
    """
    if problem.jac_y_analytic is None:
        raise ValueError("Differentiating through the iterations needs an analytic J^y")
    config = config or SolverConfig()
    theta = as_float_vector(theta, "theta", problem.n_params)
    tape = Tape()
    params = [tape.new_input(value) for value in theta]
    y, iterations = _newton_iterations(problem, config.initial_guess(problem.n_states), params, config,
                                       problem.jac_y_analytic, solve_dense, min_steps=1)
    jacobian = np.zeros((problem.n_states, problem.n_params))
    for i, yi in enumerate(y):
        if isinstance(yi, VarRef):
            jacobian[i] = tape.reverse_sweep_reachable(yi, params)
    solution = np.array([yi.value if isinstance(yi, VarRef) else float(yi) for yi in y])
    tape_nodes = len(tape)
    ad_logger.info("Naive differentiation: %d iterations recorded in %d nodes", iterations, tape_nodes)
    tape.clear()
    return SensitivityResult(solution, jacobian, tape_nodes, iterations, 0)


def solve_and_diff_ift(problem: AlgebraicProblem, theta: Sequence[float], config: SolverConfig | None = None,
                       tape: Tape | None = None) -> SensitivityResult:
    """
    Treats the solver as a super node: solves on floats, then applies the implicit function theorem

        J = -[J^y(y*, theta)]^-1 J^theta(y*, theta)

    J^theta is computed by AD on the residual at the solution only, so the tape footprint does not depend
    on the number of iterations.

    Args:
        tape (Tape | None): Tape used for J^theta when reverse mode is selected.

    Raises:
        SingularJacobianError: if J^y is singular at the solution.
        NonConvergenceError: if the solver does not converge.
    """
    config = config or SolverConfig()
    theta = as_float_vector(theta, "theta", problem.n_params)
    y_star, iterations, sweeps = _float_newton(problem, theta, config)
    states = y_star.tolist()
    if problem.jac_y_analytic is not None:
        jac_y = np.asarray(problem.jac_y_analytic(states, theta.tolist()), dtype=float)
    else:
        jac_y = _ad_jacobian_y(problem)(states, theta.tolist())
        sweeps += sweep_count(problem.n_states, problem.n_states)
    tape = tape if tape is not None else Tape()
    start = len(tape)
    jac_theta = jacobian_auto(lambda params: problem.evaluate(states, params), theta, problem.n_states, tape)
    tape_nodes = tape.high_water_mark - start
    jacobian = -solve_float(jac_y, jac_theta)
    return SensitivityResult(y_star, jacobian, tape_nodes, iterations, sweeps)
