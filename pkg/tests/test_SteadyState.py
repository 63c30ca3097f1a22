import math
import unittest

import numpy as np

from pdxad.AdErrors import DimensionMismatchError, DomainError
from pdxad.Jacobian import jacobian_forward
from pdxad.bench.SteadyState import (
    SteadyStateProblem,
    build_problem,
    evolve,
    iterate_cycles,
    patient_rates,
    steady_state_jacobian_y,
    steady_state_residual,
)


def rk4(y: np.ndarray, k1: float, k2: float, dt: float, steps: int = 2000) -> np.ndarray:
    def rhs(state):
        return np.array([-k1 * state[0], k1 * state[0] - k2 * state[1]])

    h = dt / steps
    for _ in range(steps):
        s1 = rhs(y)
        s2 = rhs(y + 0.5 * h * s1)
        s3 = rhs(y + 0.5 * h * s2)
        s4 = rhs(y + h * s3)
        y = y + h / 6.0 * (s1 + 2.0 * s2 + 2.0 * s3 + s4)
    return y


class EvolveTest(unittest.TestCase):
    def test_matches_numerical_integration(self):
        for y0, k1, k2, dt in (((1000.0, 0.0), 1.0, 0.5, 1.0), ((300.0, 250.0), 0.8, 1.7, 2.5)):
            np.testing.assert_allclose(evolve(y0, k1, k2, dt), rk4(np.array(y0), k1, k2, dt), rtol=1e-10)

    def test_zero_interval_is_identity(self):
        self.assertEqual(evolve((3.0, 4.0), 1.0, 0.5, 0.0), (3.0, 4.0))

    def test_long_interval_empties_both_compartments(self):
        gut, central = evolve((1000.0, 500.0), 1.0, 0.5, 100.0)

        self.assertLess(gut, 1e-30)
        self.assertLess(central, 1e-15)

    def test_invalid_arguments(self):
        with self.assertRaises(ValueError):
            evolve((1.0, 1.0), 1.0, 0.5, -1.0)
        with self.assertRaises(DomainError):
            evolve((1.0, 1.0), 0.0, 0.5, 1.0)
        with self.assertRaises(DomainError):
            evolve((1.0, 1.0), 0.5, 0.5, 1.0)


class SteadyStateProblemTest(unittest.TestCase):
    def test_parameter_layout(self):
        problem = SteadyStateProblem(2, (1.0, 0.5), ((0.9, 1.1), (1.2, 0.8)), 1000.0, 1.0)

        self.assertEqual(problem.n_states, 4)
        self.assertEqual(problem.n_params, 6)
        np.testing.assert_array_equal(problem.theta, [1.0, 0.5, 0.9, 1.1, 1.2, 0.8])
        rates = patient_rates(problem.theta.tolist(), 2)
        self.assertAlmostEqual(rates[0][0], 0.9)
        self.assertAlmostEqual(rates[1][1], 0.4)

    def test_validation(self):
        with self.assertRaises(ValueError):
            SteadyStateProblem(0, (1.0, 0.5), (), 1000.0, 1.0)
        with self.assertRaises(DimensionMismatchError):
            SteadyStateProblem(2, (1.0, 0.5), ((1.0, 1.0),), 1000.0, 1.0)
        with self.assertRaises(DomainError):
            SteadyStateProblem(1, (1.0, 0.5), ((0.5, 1.0),), 1000.0, 1.0)
        with self.assertRaises(ValueError):
            SteadyStateProblem(1, (1.0, 0.5), ((1.0, 1.0),), 1000.0, -1.0)

    def test_build_problem_is_deterministic(self):
        first, second = build_problem(5, seed=42), build_problem(5, seed=42)

        self.assertEqual(first, second)
        self.assertNotEqual(first.phi, build_problem(5, seed=43).phi)
        self.assertTrue(all(0.7 <= factor <= 1.3 for pair in first.phi for factor in pair))
        self.assertEqual(first.seed, 42)

    def test_residual_vanishes_at_the_cycle_limit(self):
        problem = build_problem(3, seed=1)

        residual = steady_state_residual(problem, iterate_cycles(problem, 500).tolist())

        self.assertLess(max(abs(r) for r in residual), 1e-9)

    def test_single_patient_closed_form(self):
        problem = SteadyStateProblem(1, (1.0, 0.5), ((1.0, 1.0),), 1000.0, 1.0)

        gut, _ = iterate_cycles(problem, 500)

        self.assertAlmostEqual(gut, 1000.0 * math.exp(-1.0) / (1.0 - math.exp(-1.0)), delta=1e-9)

    def test_analytic_jacobian_matches_forward_mode(self):
        problem = build_problem(2, seed=3)
        y = [100.0, 200.0, 300.0, 400.0]

        expected = jacobian_forward(lambda states: steady_state_residual(problem, states), y, 4)

        np.testing.assert_allclose(np.array(steady_state_jacobian_y(problem, y)), expected, rtol=1e-12, atol=1e-14)

    def test_dimensions_are_checked(self):
        problem = build_problem(2, seed=3)

        with self.assertRaises(DimensionMismatchError):
            steady_state_residual(problem, [1.0, 2.0])
        with self.assertRaises(DimensionMismatchError):
            steady_state_jacobian_y(problem, [1.0] * 4, [1.0, 0.5])
