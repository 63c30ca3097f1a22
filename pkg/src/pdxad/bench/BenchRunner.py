import csv
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from .. import settings
from ..AdEnums import BenchName, MatExpMethod, SolveMethod
from ..AdErrors import DomainError, NonConvergenceError, SingularJacobianError
from ..MatExp2x2 import matexp_optimized, matexp_sensitivities, matexp_standard
from ..SuperNode import SolverConfig, solve_and_diff_ift, solve_and_diff_naive
from ..Tape import Tape
from ..logger import AD_LOGGER_NAME
from .BenchRecord import CSV_HEADER, BenchRecord
from .SteadyState import build_problem

ad_logger = logging.getLogger(AD_LOGGER_NAME)

CROSS_CHECK_RTOL = 1e-6

MATEXP_IMPLEMENTATIONS = {
    MatExpMethod.STANDARD: matexp_standard,
    MatExpMethod.OPTIMIZED: matexp_optimized,
}


@dataclass
class BenchParams:
    """
    Problem constants of a benchmark run. Defaults are read from ``settings`` at construction time.

    The steady-state residual is linear in y, so a full Newton step lands on the root at once. The
    algebra bench defaults to the damped ``BENCH_STEP_SIZE`` so the solver takes a few dozen iterations.
    """
    states: tuple[int, ...] = field(default_factory=lambda: settings.BENCH_STATES)
    tol: float = field(default_factory=lambda: settings.NEWTON_TOL)
    step_size: float = field(default_factory=lambda: settings.BENCH_STEP_SIZE)
    k_pop: tuple[float, float] = field(default_factory=lambda: settings.K_POP)
    dose_mass: float = field(default_factory=lambda: settings.DOSE_MASS)
    delta_t: float = field(default_factory=lambda: settings.DELTA_T)
    matexp_samples: int = field(default_factory=lambda: settings.MATEXP_SAMPLES)

    def __post_init__(self):
        if not self.states or any(n < 2 or n % 2 for n in self.states):
            raise ValueError(f"State counts must be positive and even (two per patient), got {self.states}")
        if not 0.0 < self.step_size <= 1.0:
            raise ValueError(f"step_size must lie in (0, 1], got {self.step_size}")
        if self.matexp_samples < 1:
            raise ValueError(f"matexp_samples must be at least 1, got {self.matexp_samples}")


@dataclass
class BenchReport:
    """
    Attributes:
        records (list[BenchRecord]): Rows in output order.
        failed (bool): Whether any row recorded a solver failure.
        values (dict): Result of the last repetition per (method, n_states), for cross-checks.
    """
    records: list[BenchRecord]
    failed: bool = False
    values: dict[tuple[str, int], np.ndarray] = field(default_factory=dict)


def _timed(fn: Callable[[], Any]) -> tuple[Any, int]:
    start = time.perf_counter_ns()
    result = fn()
    return result, max(1, time.perf_counter_ns() - start)


def _relative_difference(a: np.ndarray, b: np.ndarray) -> float:
    scale = max(float(np.max(np.abs(a), initial=0.0)), float(np.max(np.abs(b), initial=0.0)), 1e-300)
    return float(np.max(np.abs(a - b), initial=0.0)) / scale


def _cross_check(values: dict[tuple[str, int], np.ndarray], reference: str, size: int, bench: str):
    if (reference, size) not in values:
        return
    for (method, n_states), result in values.items():
        if n_states != size or method == reference:
            continue
        difference = _relative_difference(values[(reference, size)], result)
        if difference > CROSS_CHECK_RTOL:
            ad_logger.warning("%s: %s and %s disagree at %d states (relative difference %.3e)",
                              bench, reference, method, size, difference)


def _run_matexp(params: BenchParams, repeats: int, seed: int, report: BenchReport):
    generator = np.random.Generator(np.random.PCG64(seed))
    matrices = generator.uniform(1.0, 10.0, size=(params.matexp_samples, 2, 2))
    tape = Tape()

    for method, implementation in MATEXP_IMPLEMENTATIONS.items():
        def evaluate_all() -> np.ndarray:
            sensitivities = np.empty((len(matrices), 4, 4))
            for k, matrix in enumerate(matrices):
                _, sensitivities[k], _ = matexp_sensitivities(implementation, matrix, tape)
                tape.clear()
            return sensitivities

        evaluate_all()
        for rep in range(1, repeats + 1):
            result, runtime = _timed(evaluate_all)
            report.records.append(BenchRecord(BenchName.MATEXP.value, method.value, 2, rep, runtime))
        report.values[(method.value, 2)] = result
        ad_logger.info("matexp %s: %d repeats over %d matrices", method.value, repeats, len(matrices))
    _cross_check(report.values, MatExpMethod.STANDARD.value, 2, BenchName.MATEXP.value)


def _run_algebra(params: BenchParams, repeats: int, seed: int, report: BenchReport):
    config = SolverConfig(tol=params.tol, step_size=params.step_size)
    for n_states in params.states:
        problem = build_problem(n_states // 2, seed, params.k_pop, params.dose_mass, params.delta_t)
        theta = problem.theta
        runs: dict[SolveMethod, Callable[[], Any]] = {
            SolveMethod.NAIVE: lambda: solve_and_diff_naive(problem.as_algebraic(True), theta, config),
            SolveMethod.IFT_ANALYTIC: lambda: solve_and_diff_ift(problem.as_algebraic(True), theta, config),
            SolveMethod.IFT_AD: lambda: solve_and_diff_ift(problem.as_algebraic(False), theta, config),
        }
        for method, run in runs.items():
            try:
                run()
                for rep in range(1, repeats + 1):
                    result, runtime = _timed(run)
                    report.records.append(BenchRecord(BenchName.ALGEBRA.value, method.value, n_states, rep, runtime))
                report.values[(method.value, n_states)] = result.jacobian
            except (NonConvergenceError, SingularJacobianError, DomainError) as e:
                ad_logger.warning("algebra %s failed at %d states: %s", method.value, n_states, e)
                report.failed = True
                done = {r.rep for r in report.records
                        if r.method == method.value and r.n_states == n_states}
                for rep in range(1, repeats + 1):
                    if rep not in done:
                        report.records.append(BenchRecord(BenchName.ALGEBRA.value, f"{method.value}_failed",
                                                          n_states, rep, 1))
        ad_logger.info("algebra: %d states done", n_states)
        _cross_check(report.values, SolveMethod.IFT_ANALYTIC.value, n_states, BenchName.ALGEBRA.value)


def write_csv(records: list[BenchRecord], out_path: Path | str, bench: BenchName, seed: int):
    """
    Writes the rows under a ``# bench=... seed=...`` comment line and the header, with LF line endings.
    """
    with open(out_path, "w", encoding="utf-8", newline="") as f:
        f.write(f"# bench={bench.value} seed={seed}\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        writer.writerows(record.as_row() for record in records)


def run_bench(bench: BenchName | str, params: BenchParams | None = None, repeats: int = 1, seed: int = 0,
              out_path: Path | str | None = None) -> BenchReport:
    """
    Runs one benchmark and writes its rows as CSV.

    matexp times value and 16 sensitivities of both implementations over random U(1, 10) matrices.
    algebra times the solve and the N x K sensitivities of the steady-state problem with every
    differentiation method at each state count. A solver failure is written as a ``<method>_failed``
    row instead of aborting the run.

    Raises:
        ValueError: if repeats < 1 or the bench name is unknown.
        OSError: if the output file cannot be written.
    """
    bench = BenchName(bench)
    if repeats < 1:
        raise ValueError(f"repeats must be at least 1, got {repeats}")
    params = params or BenchParams()
    report = BenchReport(records=[])
    ad_logger.info("Running %s bench with %d repeats, seed %d", bench.value, repeats, seed)
    match bench:
        case BenchName.MATEXP:
            _run_matexp(params, repeats, seed, report)
        case BenchName.ALGEBRA:
            _run_algebra(params, repeats, seed, report)
    report.records.sort(key=lambda record: record.sort_key)
    if out_path is not None:
        write_csv(report.records, out_path, bench, seed)
    return report
