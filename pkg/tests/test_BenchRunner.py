import csv
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

import numpy as np

from pdxad.AdErrors import DomainError, NonConvergenceError
from pdxad.LogNormal import log_normal_graph
from pdxad.bench.BenchRecord import CSV_HEADER, BenchRecord
from pdxad.bench.BenchRunner import BenchParams, run_bench
from pdxad.bench.cli import main


def read_rows(path: Path) -> tuple[str, list[str], list[list[str]]]:
    with open(path, encoding="utf-8", newline="") as f:
        comment = f.readline().rstrip("\n")
        reader = csv.reader(f)
        header = next(reader)
        return comment, header, list(reader)


class BenchRecordTest(unittest.TestCase):
    def test_row(self):
        record = BenchRecord("algebra", "naive", 4, 1, 1500)

        self.assertEqual(record.as_row(), ("algebra", "naive", 4, 1, 1500))
        self.assertFalse(record.failed)
        self.assertTrue(BenchRecord("algebra", "naive_failed", 4, 1, 1).failed)

    def test_validation(self):
        with self.assertRaises(ValueError):
            BenchRecord("algebra", "naive", 4, 1, 0)
        with self.assertRaises(ValueError):
            BenchRecord("algebra", "naive", 4, 0, 10)


class RunBenchTest(unittest.TestCase):
    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.out = Path(self.directory.name) / "r.csv"

    def tearDown(self):
        self.directory.cleanup()

    def test_algebra_rows(self):
        report = run_bench("algebra", BenchParams(), repeats=3, seed=7, out_path=self.out)

        comment, header, rows = read_rows(self.out)
        self.assertEqual(comment, "# bench=algebra seed=7")
        self.assertEqual(tuple(header), CSV_HEADER)
        self.assertEqual(len(rows), 36)
        self.assertFalse(report.failed)
        self.assertEqual([row[1] for row in rows[::12]], ["ift_ad_Jy", "ift_analytic_Jy", "naive"])
        self.assertEqual([int(row[2]) for row in rows[:12:3]], [4, 12, 20, 28])
        self.assertEqual([int(row[3]) for row in rows[:3]], [1, 2, 3])
        self.assertTrue(all(int(row[4]) > 0 for row in rows))
        for n_states in (4, 12, 20, 28):
            reference = report.values[("ift_analytic_Jy", n_states)]
            for method in ("naive", "ift_ad_Jy"):
                difference = np.abs(report.values[(method, n_states)] - reference).max()
                self.assertLess(difference, 1e-6 * np.abs(reference).max(), msg=f"{method} at {n_states} states")

    def test_algebra_is_deterministic(self):
        params = BenchParams(states=(2, 4))

        first = run_bench("algebra", params, repeats=2, seed=3)
        second = run_bench("algebra", params, repeats=2, seed=3)

        self.assertEqual([r.sort_key for r in first.records], [r.sort_key for r in second.records])
        self.assertEqual(first.values.keys(), second.values.keys())
        for key, value in first.values.items():
            self.assertTrue((value == second.values[key]).all(), msg=str(key))

    def test_algebra_methods_agree(self):
        report = run_bench("algebra", BenchParams(states=(6,)), seed=1)

        reference = report.values[("ift_analytic_Jy", 6)]
        for method in ("naive", "ift_ad_Jy"):
            difference = abs(report.values[(method, 6)] - reference).max() / abs(reference).max()
            self.assertLess(difference, 1e-6)

    def test_matexp_rows(self):
        report = run_bench("matexp", BenchParams(matexp_samples=5), repeats=2, seed=1, out_path=self.out)

        comment, _, rows = read_rows(self.out)
        self.assertEqual(comment, "# bench=matexp seed=1")
        self.assertEqual([tuple(row[:4]) for row in rows], [
            ("matexp", "optimized", "2", "1"), ("matexp", "optimized", "2", "2"),
            ("matexp", "standard", "2", "1"), ("matexp", "standard", "2", "2"),
        ])
        self.assertEqual(report.values[("standard", 2)].shape, (5, 4, 4))

    def test_solver_failure_gives_failed_rows(self):
        with patch("pdxad.bench.BenchRunner.solve_and_diff_naive", side_effect=NonConvergenceError(100, 1.0)):
            report = run_bench("algebra", BenchParams(states=(2,)), repeats=2, seed=0, out_path=self.out)

        _, _, rows = read_rows(self.out)
        self.assertTrue(report.failed)
        self.assertEqual([(row[1], row[3], row[4]) for row in rows if row[1].endswith("_failed")],
                         [("naive_failed", "1", "1"), ("naive_failed", "2", "1")])
        self.assertEqual(len(rows), 6)

    def test_domain_error_gives_failed_rows(self):
        with patch("pdxad.bench.BenchRunner.solve_and_diff_ift", side_effect=DomainError("exp overflow")):
            report = run_bench("algebra", BenchParams(states=(2,)), repeats=2, seed=0, out_path=self.out)

        _, _, rows = read_rows(self.out)
        self.assertTrue(report.failed)
        self.assertEqual([row[1] for row in rows], ["ift_ad_Jy_failed"] * 2 + ["ift_analytic_Jy_failed"] * 2
                         + ["naive"] * 2)
        self.assertIn(("naive", 2), report.values)


    def test_invalid_arguments(self):
        with self.assertRaises(ValueError):
            run_bench("algebra", repeats=0)
        with self.assertRaises(ValueError):
            run_bench("bogus")
        with self.assertRaises(ValueError):
            BenchParams(states=(3,))


class CliTest(unittest.TestCase):
    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.path = Path(self.directory.name)

    def tearDown(self):
        self.directory.cleanup()

    def test_algebra_run(self):
        out = self.path / "r.csv"

        code = main(["--name", "algebra", "--repeats", "2", "--seed", "7", "--states", "2,4", "--out", str(out)])

        self.assertEqual(code, 0)
        self.assertEqual(len(read_rows(out)[2]), 12)

    def test_solver_failure_exit_code(self):
        out = self.path / "r.csv"

        with patch("pdxad.bench.BenchRunner.solve_and_diff_naive", side_effect=NonConvergenceError(100, 1.0)):
            code = main(["--name", "algebra", "--states", "2", "--out", str(out)])

        self.assertEqual(code, 2)

    def test_usage_errors(self):
        for argv in ([], ["--name", "algebra"], ["--name", "bogus", "--out", "r.csv"],
                     ["--name", "algebra", "--out", "r.csv", "--repeats", "0"],
                     ["--name", "algebra", "--out", "r.csv", "--states", "2,x"]):
            with self.assertRaises(SystemExit) as context:
                main(argv)
            self.assertEqual(context.exception.code, 1, msg=str(argv))

    def test_invalid_values_exit_code(self):
        self.assertEqual(main(["--name", "algebra", "--states", "3", "--out", str(self.path / "r.csv")]), 1)
        self.assertEqual(main(["--name", "algebra", "--step-size", "2", "--states", "2",
                               "--out", str(self.path / "r.csv")]), 1)

    def test_unwritable_output(self):
        out = self.path / "missing" / "r.csv"

        self.assertEqual(main(["--name", "algebra", "--states", "2", "--out", str(out)]), 1)

    def test_dot_export(self):
        out = self.path / "graph.dot"

        self.assertEqual(main(["--dot", str(out)]), 0)

        tape, density = log_normal_graph()
        self.assertEqual(out.read_text(encoding="utf-8"), tape.export_dot(density))
