import unittest

import numpy as np

from pdxad import admath
from pdxad.AdErrors import DimensionMismatchError
from pdxad.HigherOrder import HvpSeed, hessian, hvp, second_order_form
from pdxad.LogNormal import log_normal_density
from pdxad.Tape import Tape

QUADRATIC = [[2.0, 1.0, 0.0], [1.0, 3.0, 0.5], [0.0, 0.5, 1.0]]


def sum_of_squares(x):
    return sum(admath.square(v) for v in x)


def quadratic_form(x):
    return 0.5 * sum(QUADRATIC[i][j] * x[i] * x[j] for i in range(3) for j in range(3))


def log_normal(x):
    return log_normal_density(x[0], x[1], x[2])


def composite(x):
    return admath.sin(x[0] * x[1]) + admath.exp(0.5 * x[2]) * x[0] + admath.log(1.0 + admath.square(x[1] - x[2]))


def random_quadratic_form(rng: np.random.Generator, size: int = 4):
    """
    Draws a symmetric matrix A and returns it with x -> 1/2 x^T A x.
    """
    draw = rng.uniform(-2.0, 2.0, (size, size))
    matrix = 0.5 * (draw + draw.T)
    entries = matrix.tolist()

    def form(x):
        return 0.5 * sum(entries[i][j] * x[i] * x[j] for i in range(size) for j in range(size))

    return matrix, form


class HigherOrderTest(unittest.TestCase):
    def test_sum_of_squares_is_exact(self):
        np.testing.assert_array_equal(hessian(sum_of_squares, [0.3, -1.2, 4.0]), 2.0 * np.eye(3))

    def test_quadratic_form(self):
        v = np.array([0.5, -1.0, 2.0])

        result = hvp(quadratic_form, [1.0, 2.0, 3.0], v)

        np.testing.assert_allclose(result, np.array(QUADRATIC) @ v, rtol=1e-14, atol=1e-14)

    def test_random_symmetric_quadratic_forms(self):
        rng = np.random.default_rng(31)
        for _ in range(10):
            matrix, form = random_quadratic_form(rng)
            x, v = rng.uniform(-1.0, 1.0, 4), rng.uniform(-1.0, 1.0, 4)

            np.testing.assert_allclose(hvp(form, x, v), matrix @ v, rtol=1e-10, atol=1e-12)
            np.testing.assert_allclose(hessian(form, x), matrix, rtol=1e-10, atol=1e-12)

    def test_cube(self):
        self.assertEqual(hessian(lambda x: x[0] ** 3, [2.0])[0, 0], 12.0)

    def test_log_normal(self):
        column = hvp(log_normal, [10.0, 5.0, 2.0], [0.0, 1.0, 0.0])

        np.testing.assert_allclose(column, [0.25, -0.25, -1.25], rtol=1e-12)

    def test_log_normal_against_finite_differences_of_the_gradient(self):
        point = np.array([10.0, 5.0, 2.0])
        step = 1e-5

        def gradient(x):
            tape = Tape()
            inputs = [tape.new_input(v) for v in x]
            adjoints = tape.reverse_sweep(log_normal(inputs))
            return np.array([adjoints[ref.id] for ref in inputs])

        expected = np.zeros((3, 3))
        for j in range(3):
            up, down = point.copy(), point.copy()
            up[j] += step
            down[j] -= step
            expected[:, j] = (gradient(up.tolist()) - gradient(down.tolist())) / (2 * step)

        np.testing.assert_allclose(hessian(log_normal, point), expected, rtol=1e-6, atol=1e-8)

    def test_hessian_is_symmetric(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            result = hessian(composite, rng.uniform(-1.0, 1.0, 3))
            np.testing.assert_allclose(result, result.T, rtol=1e-12, atol=1e-12)

    def test_hvp_is_a_hessian_column_combination(self):
        x, v = [0.4, -0.7, 0.2], np.array([1.0, 2.0, -0.5])

        np.testing.assert_allclose(hvp(composite, x, v), hessian(composite, x) @ v, rtol=1e-12, atol=1e-12)

    def test_second_order_form(self):
        x, v = [10.0, 5.0, 2.0], [0.0, 1.0, 0.0]

        result = second_order_form(log_normal, x, HvpSeed(2.0, 3.0, np.array(v)))

        np.testing.assert_allclose(result, 2.0 * np.array([-1.25, 1.25, 2.625]) + 3.0 * np.array([0.25, -0.25, -1.25]),
                                   rtol=1e-12)

    def test_constant_function(self):
        np.testing.assert_array_equal(hessian(lambda x: 4.0, [1.0, 2.0]), np.zeros((2, 2)))

    def test_caller_tape_keeps_the_recording(self):
        tape = Tape()

        hvp(sum_of_squares, [1.0, 2.0], [1.0, 0.0], tape)

        self.assertGreater(len(tape), 2)

    def test_needs_a_scalar_function(self):
        with self.assertRaises(DimensionMismatchError):
            hessian(lambda x: [x[0], x[1]], [1.0, 2.0])
        with self.assertRaises(DimensionMismatchError):
            hvp(sum_of_squares, [1.0, 2.0], [1.0])
