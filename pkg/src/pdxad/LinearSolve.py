import warnings
from typing import Any, Sequence

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from . import settings
from .AbstractScalar import AbstractScalar
from .AdErrors import DimensionMismatchError, SingularJacobianError
from .admath import value_of


def _is_structural_zero(x: Any) -> bool:
    return not isinstance(x, AbstractScalar) and x == 0.0


def _check_pivot(column: int, pivot: float, row_scale: float):
    if row_scale == 0.0 or abs(pivot) < settings.PIVOT_RTOL * row_scale:
        raise SingularJacobianError(column, pivot)


def _check_square(n_rows: int, rows: Sequence[Sequence[Any]], n_rhs: int):
    if any(len(row) != n_rows for row in rows):
        raise DimensionMismatchError(f"Matrix must be {n_rows}x{n_rows}")
    if n_rhs != n_rows:
        raise DimensionMismatchError(f"Right-hand side has {n_rhs} rows, expected {n_rows}")


def solve_dense(matrix: Sequence[Sequence[Any]], rhs: Sequence[Any]) -> list[Any]:
    """
    Gaussian elimination with partial pivoting over any scalar type, so a solve on tape handles is
    recorded like every other operation. Pivots are chosen by value.

    Entries that are plain zeros are skipped, which keeps sparse systems small on the tape.

    Raises:
        SingularJacobianError: if a pivot is below ``PIVOT_RTOL`` times the magnitude of its row.
    """
    n = len(matrix)
    _check_square(n, matrix, len(rhs))
    a = [list(row) for row in matrix]
    b = list(rhs)
    scales = [max((abs(value_of(entry)) for entry in row), default=0.0) for row in a]

    for k in range(n):
        pivot_row = max(range(k, n), key=lambda i: abs(value_of(a[i][k])))
        if pivot_row != k:
            a[k], a[pivot_row] = a[pivot_row], a[k]
            b[k], b[pivot_row] = b[pivot_row], b[k]
            scales[k], scales[pivot_row] = scales[pivot_row], scales[k]
        _check_pivot(k, value_of(a[k][k]), scales[k])
        for i in range(k + 1, n):
            if _is_structural_zero(a[i][k]):
                continue
            factor = a[i][k] / a[k][k]
            for j in range(k + 1, n):
                if not _is_structural_zero(a[k][j]):
                    a[i][j] = a[i][j] - factor * a[k][j]
            if not _is_structural_zero(b[k]):
                b[i] = b[i] - factor * b[k]
            a[i][k] = 0.0

    x: list[Any] = [0.0] * n
    for i in range(n - 1, -1, -1):
        acc = b[i]
        for j in range(i + 1, n):
            if not _is_structural_zero(a[i][j]) and not _is_structural_zero(x[j]):
                acc = acc - a[i][j] * x[j]
        if not _is_structural_zero(acc):
            x[i] = acc / a[i][i]
    return x


def solve_float(matrix: np.ndarray | Sequence[Sequence[float]],
                rhs: np.ndarray | Sequence[float]) -> np.ndarray:
    """
    Solves A X = B for float arrays with an LU factorization, for one or several right-hand sides.

    Raises:
        SingularJacobianError: under the same pivot rule as :func:`solve_dense`.
    """
    a = np.asarray(matrix, dtype=float)
    b = np.asarray(rhs, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"Matrix must be square, got shape {a.shape}")
    _check_square(a.shape[0], a, b.shape[0])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(a)
    order = np.arange(a.shape[0])
    for k, p in enumerate(piv):
        order[k], order[p] = order[p], order[k]
    scales = np.max(np.abs(a), axis=1)
    for k in range(a.shape[0]):
        _check_pivot(k, float(lu[k, k]), float(scales[order[k]]))
    return lu_solve((lu, piv), b)
