"""
Two-compartment oral dosing model at steady state, one block of two states per patient.

The gut amount y1 and the central amount y2 follow

    dy1/dt = -k1 y1
    dy2/dt = k1 y1 - k2 y2

and a dose of mass m is added to the gut at the start of every dosing interval. The pre-dose state
is steady when one interval of evolution brings it back to itself.
"""
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .. import admath, settings
from ..AdErrors import DimensionMismatchError, DomainError
from ..SuperNode import AlgebraicProblem
from ..admath import value_of


def evolve(y0: Sequence[Any], k1: Any, k2: Any, dt: float) -> tuple[Any, Any]:
    """
    Closed-form evolution of the two-compartment system over ``dt``.

    Raises:
        DomainError: if a rate is not positive or the two rates coincide.
        ValueError: if dt is negative.
    """
    if dt < 0.0:
        raise ValueError(f"dt must be non-negative, got {dt}")
    rate1, rate2 = value_of(k1), value_of(k2)
    if rate1 <= 0.0 or rate2 <= 0.0:
        raise DomainError(f"Rates must be positive, got k1={rate1}, k2={rate2}")
    if abs(rate1 - rate2) <= settings.RATE_SEPARATION:
        raise DomainError(f"Rates k1={rate1} and k2={rate2} are not distinct")
    gut, central = y0
    e1 = admath.exp(k1 * -dt)
    e2 = admath.exp(k2 * -dt)
    return gut * e1, central * e2 + k1 * gut / (k2 - k1) * (e1 - e2)


@dataclass(frozen=True)
class SteadyStateProblem:
    """
    Population of patients sharing rates ``k_pop``, each scaled by a per-patient factor per rate:
    k1_i = phi_i1 * k1 and k2_i = phi_i2 * k2.

    The sensitivity parameters are theta = (k1, k2, phi_11, phi_12, ..., phi_n1, phi_n2).
    """
    n_patients: int
    k_pop: tuple[float, float]
    phi: tuple[tuple[float, float], ...]
    dose_mass: float
    delta_t: float
    seed: int | None = None

    def __post_init__(self):
        if self.n_patients < 1:
            raise ValueError(f"At least one patient is needed, got {self.n_patients}")
        if len(self.phi) != self.n_patients:
            raise DimensionMismatchError(f"{len(self.phi)} scale factor pairs for {self.n_patients} patients")
        if self.delta_t < 0.0:
            raise ValueError(f"delta_t must be non-negative, got {self.delta_t}")
        for i, (k1, k2) in enumerate(patient_rates(self.theta.tolist(), self.n_patients)):
            if k1 <= 0.0 or k2 <= 0.0:
                raise DomainError(f"Patient {i} has non-positive rates ({k1}, {k2})")
            if abs(k1 - k2) <= settings.RATE_SEPARATION:
                raise DomainError(f"Patient {i} has coinciding rates ({k1}, {k2})")

    @property
    def n_states(self) -> int:
        return 2 * self.n_patients

    @property
    def n_params(self) -> int:
        return 2 * self.n_patients + 2

    @property
    def theta(self) -> np.ndarray:
        return np.array([*self.k_pop, *(factor for pair in self.phi for factor in pair)], dtype=float)

    def as_algebraic(self, analytic_jy: bool = True) -> AlgebraicProblem:
        return AlgebraicProblem(
            residual=lambda y, theta: steady_state_residual(self, y, theta),
            n_states=self.n_states,
            n_params=self.n_params,
            jac_y_analytic=(lambda y, theta: steady_state_jacobian_y(self, y, theta)) if analytic_jy else None,
        )


def patient_rates(theta: Sequence[Any], n_patients: int) -> list[tuple[Any, Any]]:
    return [(theta[0] * theta[2 + 2 * i], theta[1] * theta[3 + 2 * i]) for i in range(n_patients)]


def _check_dimensions(problem: SteadyStateProblem, y: Sequence[Any], theta: Sequence[Any]):
    if len(y) != problem.n_states:
        raise DimensionMismatchError(f"y has length {len(y)}, expected {problem.n_states}")
    if len(theta) != problem.n_params:
        raise DimensionMismatchError(f"theta has length {len(theta)}, expected {problem.n_params}")


def steady_state_residual(problem: SteadyStateProblem, y: Sequence[Any],
                          theta: Sequence[Any] | None = None) -> list[Any]:
    """
    Per patient: dose the gut state, evolve one interval and subtract the pre-dose state.
    """
    theta = problem.theta.tolist() if theta is None else list(theta)
    _check_dimensions(problem, y, theta)
    residual = []
    for i, (k1, k2) in enumerate(patient_rates(theta, problem.n_patients)):
        gut, central = y[2 * i], y[2 * i + 1]
        next_gut, next_central = evolve((gut + problem.dose_mass, central), k1, k2, problem.delta_t)
        residual.extend((next_gut - gut, next_central - central))
    return residual


def steady_state_jacobian_y(problem: SteadyStateProblem, y: Sequence[Any],
                            theta: Sequence[Any] | None = None) -> list[list[Any]]:
    """
    Analytic partials of the residual in y. Block diagonal, one 2x2 block per patient; the blocks do not
    depend on y since the system is linear.
    """
    theta = problem.theta.tolist() if theta is None else list(theta)
    _check_dimensions(problem, y, theta)
    n = problem.n_states
    jacobian: list[list[Any]] = [[0.0] * n for _ in range(n)]
    for i, (k1, k2) in enumerate(patient_rates(theta, problem.n_patients)):
        e1 = admath.exp(k1 * -problem.delta_t)
        e2 = admath.exp(k2 * -problem.delta_t)
        jacobian[2 * i][2 * i] = e1 - 1.0
        jacobian[2 * i + 1][2 * i] = k1 / (k2 - k1) * (e1 - e2)
        jacobian[2 * i + 1][2 * i + 1] = e2 - 1.0
    return jacobian


def iterate_cycles(problem: SteadyStateProblem, n_cycles: int, theta: Sequence[float] | None = None,
                   y0: Sequence[float] | None = None) -> np.ndarray:
    """
    Applies dose-then-evolve ``n_cycles`` times; converges to the pre-dose steady state.
    """
    theta = problem.theta.tolist() if theta is None else [float(t) for t in theta]
    y = [0.0] * problem.n_states if y0 is None else [float(v) for v in y0]
    _check_dimensions(problem, y, theta)
    rates = patient_rates(theta, problem.n_patients)
    for _ in range(n_cycles):
        for i, (k1, k2) in enumerate(rates):
            y[2 * i], y[2 * i + 1] = evolve((y[2 * i] + problem.dose_mass, y[2 * i + 1]), k1, k2,
                                            problem.delta_t)
    return np.array(y)


def build_problem(n_patients: int, seed: int, k_pop: tuple[float, float] | None = None,
                  dose_mass: float | None = None, delta_t: float | None = None) -> SteadyStateProblem:
    """
    Draws the per-patient scale factors uniformly from ``PHI_BOUNDS`` with a PCG64 generator, so the same
    seed always gives the same problem.
    """
    if n_patients < 1:
        raise ValueError(f"At least one patient is needed, got {n_patients}")
    generator = np.random.Generator(np.random.PCG64(seed))
    low, high = settings.PHI_BOUNDS
    phi = generator.uniform(low, high, size=(n_patients, 2))
    return SteadyStateProblem(
        n_patients=n_patients,
        k_pop=tuple(float(k) for k in (k_pop or settings.K_POP)),
        phi=tuple((float(row[0]), float(row[1])) for row in phi),
        dose_mass=float(settings.DOSE_MASS if dose_mass is None else dose_mass),
        delta_t=float(settings.DELTA_T if delta_t is None else delta_t),
        seed=seed,
    )
