import statistics
import time
import unittest

import numpy as np

from pdxad import settings
from pdxad.AdErrors import DimensionMismatchError, NonConvergenceError, SingularJacobianError
from pdxad.SuperNode import (
    AlgebraicProblem,
    SolverConfig,
    newton_solve,
    solve_and_diff_ift,
    solve_and_diff_naive,
)
from pdxad.Tape import Tape
from pdxad.bench.SteadyState import build_problem, iterate_cycles

SQUARE_ROOT = AlgebraicProblem(
    residual=lambda y, theta: [y[0] * y[0] - theta[0]],
    n_states=1,
    n_params=1,
    jac_y_analytic=lambda y, theta: [[2.0 * y[0]]],
)

LINEAR = AlgebraicProblem(
    residual=lambda y, theta: [2.0 * y[0] + y[1] - theta[0], y[0] + 3.0 * y[1] - theta[1]],
    n_states=2,
    n_params=2,
    jac_y_analytic=lambda y, theta: [[2.0, 1.0], [1.0, 3.0]],
)


class SolverConfigTest(unittest.TestCase):
    def test_defaults(self):
        config = SolverConfig()

        self.assertEqual(config.tol, 1e-10)
        self.assertEqual(config.step_size, 1.0)
        self.assertEqual(config.initial_guess(3), [0.0, 0.0, 0.0])

    def test_rejects_invalid_values(self):
        with self.assertRaises(ValueError):
            SolverConfig(tol=0.0)
        with self.assertRaises(ValueError):
            SolverConfig(max_iter=0)
        with self.assertRaises(ValueError):
            SolverConfig(step_size=1.5)
        with self.assertRaises(DimensionMismatchError):
            SolverConfig(y0=[1.0]).initial_guess(2)


class NewtonSolveTest(unittest.TestCase):
    def test_square_root(self):
        y = newton_solve(SQUARE_ROOT, [4.0], SolverConfig(y0=[1.0]))

        self.assertAlmostEqual(y[0], 2.0, delta=1e-10)

    def test_linear_residual_takes_one_step(self):
        result = solve_and_diff_ift(LINEAR, [3.0, 5.0])

        self.assertEqual(result.iterations, 1)
        np.testing.assert_allclose(result.solution, [0.8, 1.4], rtol=1e-12)
        np.testing.assert_allclose(result.jacobian, np.array([[3.0, -1.0], [-1.0, 2.0]]) / 5.0, rtol=1e-12)

    def test_without_analytic_jacobian(self):
        problem = AlgebraicProblem(SQUARE_ROOT.residual, 1, 1)

        y = newton_solve(problem, [9.0], SolverConfig(y0=[1.0]))

        self.assertAlmostEqual(y[0], 3.0, delta=1e-10)

    def test_non_convergence(self):
        with self.assertRaises(NonConvergenceError) as context:
            newton_solve(SQUARE_ROOT, [4.0], SolverConfig(y0=[1.0], max_iter=1))
        self.assertEqual(context.exception.iterations, 1)
        self.assertAlmostEqual(context.exception.residual_norm, 2.25)

    def test_singular_start(self):
        with self.assertRaises(SingularJacobianError):
            newton_solve(SQUARE_ROOT, [4.0])

    def test_residual_dimension_is_checked(self):
        problem = AlgebraicProblem(lambda y, theta: [y[0]], 2, 1, lambda y, theta: [[1.0, 0.0], [0.0, 1.0]])

        with self.assertRaises(DimensionMismatchError):
            newton_solve(problem, [1.0])
        with self.assertRaises(DimensionMismatchError):
            newton_solve(LINEAR, [1.0])


class SensitivityTest(unittest.TestCase):
    def test_square_root_sensitivity(self):
        config = SolverConfig(y0=[1.0])

        ift = solve_and_diff_ift(SQUARE_ROOT, [4.0], config)
        naive = solve_and_diff_naive(SQUARE_ROOT, [4.0], config)

        self.assertAlmostEqual(ift.jacobian[0, 0], 0.25, delta=1e-12)
        self.assertAlmostEqual(naive.jacobian[0, 0], 0.25, delta=1e-8)
        self.assertAlmostEqual(naive.solution[0], 2.0, delta=1e-10)

    def test_naive_needs_analytic_jacobian(self):
        with self.assertRaises(ValueError):
            solve_and_diff_naive(AlgebraicProblem(SQUARE_ROOT.residual, 1, 1), [4.0])

    def test_steady_state_matches_repeated_dosing(self):
        problem = build_problem(1, seed=7)

        y = newton_solve(problem.as_algebraic(), problem.theta)

        np.testing.assert_allclose(y, iterate_cycles(problem, 500), rtol=1e-10, atol=1e-8)

    def test_methods_agree(self):
        for n_patients in range(1, 5):
            problem = build_problem(n_patients, seed=n_patients)
            theta = problem.theta

            naive = solve_and_diff_naive(problem.as_algebraic(True), theta)
            analytic = solve_and_diff_ift(problem.as_algebraic(True), theta)
            automatic = solve_and_diff_ift(problem.as_algebraic(False), theta)

            self.assertEqual(analytic.jacobian.shape, (2 * n_patients, 2 * n_patients + 2))
            np.testing.assert_allclose(naive.jacobian, analytic.jacobian, rtol=1e-8, atol=1e-8)
            np.testing.assert_allclose(automatic.jacobian, analytic.jacobian, rtol=1e-10, atol=1e-10)
            np.testing.assert_allclose(naive.solution, analytic.solution, rtol=1e-10)

    def test_methods_agree_at_bench_sizes(self):
        for n_states in (12, 20, 28):
            problem = build_problem(n_states // 2, seed=n_states)
            config = SolverConfig(step_size=settings.BENCH_STEP_SIZE)

            reference = solve_and_diff_ift(problem.as_algebraic(True), problem.theta, config).jacobian
            for result in (solve_and_diff_naive(problem.as_algebraic(True), problem.theta, config),
                           solve_and_diff_ift(problem.as_algebraic(False), problem.theta, config)):
                self.assertEqual(result.jacobian.shape, (n_states, n_states + 2))
                self.assertLess(np.abs(result.jacobian - reference).max(), 1e-6 * np.abs(reference).max(),
                                msg=f"{n_states} states")

    def test_sensitivities_agree_with_finite_differences(self):
        problem = build_problem(2, seed=11)
        algebraic = problem.as_algebraic()
        theta = problem.theta
        step = 1e-6

        jacobian = solve_and_diff_ift(algebraic, theta).jacobian

        for k in range(len(theta)):
            up, down = theta.copy(), theta.copy()
            up[k] += step
            down[k] -= step
            column = (newton_solve(algebraic, up) - newton_solve(algebraic, down)) / (2 * step)
            np.testing.assert_allclose(jacobian[:, k], column, rtol=1e-5, atol=1e-3)

    def test_patients_do_not_interact(self):
        problem = build_problem(3, seed=2)

        for result in (solve_and_diff_ift(problem.as_algebraic(), problem.theta),
                       solve_and_diff_naive(problem.as_algebraic(), problem.theta)):
            for i in range(3):
                for j in range(3):
                    if i != j:
                        block = result.jacobian[2 * i:2 * i + 2, 2 + 2 * j:4 + 2 * j]
                        self.assertTrue(np.all(block == 0.0))

    def test_super_node_footprint_does_not_depend_on_iterations(self):
        problem = build_problem(2, seed=5)
        loose = SolverConfig(tol=1e-6, step_size=0.5)
        tight = SolverConfig(tol=1e-10, step_size=0.5)

        ift_loose = solve_and_diff_ift(problem.as_algebraic(), problem.theta, loose)
        ift_tight = solve_and_diff_ift(problem.as_algebraic(), problem.theta, tight)
        naive_loose = solve_and_diff_naive(problem.as_algebraic(), problem.theta, loose)
        naive_tight = solve_and_diff_naive(problem.as_algebraic(), problem.theta, tight)

        self.assertGreater(ift_tight.iterations, ift_loose.iterations)
        self.assertEqual(ift_loose.tape_nodes, ift_tight.tape_nodes)
        self.assertGreater(naive_tight.tape_nodes, naive_loose.tape_nodes)
        self.assertLess(ift_tight.tape_nodes, naive_loose.tape_nodes)

    def test_caller_tape_holds_the_parameter_recording(self):
        problem = build_problem(1, seed=0)
        tape = Tape()

        result = solve_and_diff_ift(problem.as_algebraic(), problem.theta, tape=tape)

        self.assertEqual(result.tape_nodes, len(tape))
        self.assertGreater(len(tape), problem.n_params)

    def test_ad_jacobian_sweeps_are_counted(self):
        problem = build_problem(1, seed=0)

        analytic = solve_and_diff_ift(problem.as_algebraic(True), problem.theta)
        automatic = solve_and_diff_ift(problem.as_algebraic(False), problem.theta)

        self.assertEqual(analytic.jy_ad_sweeps, 0)
        self.assertEqual(automatic.jy_ad_sweeps, 2 * (automatic.iterations + 1))


def median_runtime_ns(run, repeats: int = 20) -> float:
    run()
    runtimes = []
    for _ in range(repeats):
        start = time.perf_counter_ns()
        run()
        runtimes.append(time.perf_counter_ns() - start)
    return statistics.median(runtimes)


class SuperNodeTimingTest(unittest.TestCase):
    def test_super_node_is_faster_than_taping_the_iterations(self):
        config = SolverConfig(step_size=settings.BENCH_STEP_SIZE)
        speedups = {}

        for n_states in (4, 12, 20, 28):
            problem = build_problem(n_states // 2, seed=0)
            algebraic, theta = problem.as_algebraic(True), problem.theta
            naive = median_runtime_ns(lambda: solve_and_diff_naive(algebraic, theta, config))
            ift = median_runtime_ns(lambda: solve_and_diff_ift(algebraic, theta, config))
            speedups[n_states] = naive / ift

        for n_states, speedup in speedups.items():
            self.assertGreater(speedup, 1.0, msg=f"{n_states} states")
        self.assertGreaterEqual(speedups[28], 5.0)
