import argparse
import logging
import sys
from pathlib import Path

from .. import settings
from ..AdEnums import BenchName
from ..LogNormal import log_normal_graph
from ..logger import AD_LOGGER_NAME
from .BenchRunner import BenchParams, run_bench

ad_logger = logging.getLogger(AD_LOGGER_NAME)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_SOLVER_FAILURE = 2


class BenchArgumentParser(argparse.ArgumentParser):
    """
    Usage errors exit with status 1 instead of argparse's 2, which is reserved for solver failures.
    """

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _state_list(text: str) -> tuple[int, ...]:
    try:
        states = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid state list {text!r}") from e
    if not states:
        raise argparse.ArgumentTypeError("state list is empty")
    return states


def build_parser() -> BenchArgumentParser:
    parser = BenchArgumentParser(prog="bench", description="Timing experiments for the AD engine.")
    parser.add_argument("--name", choices=[b.value for b in BenchName],
                        help="Benchmark to run: the 2x2 matrix exponential or the steady-state solver.")
    parser.add_argument("--repeats", type=int, default=1, help="Timed repetitions per method and size.")
    parser.add_argument("--seed", type=int, default=0, help="Seed of the PCG64 generator.")
    parser.add_argument("--out", type=Path, help="CSV output path.")
    parser.add_argument("--states", type=_state_list, default=None,
                        help=f"Comma separated state counts (default: {','.join(map(str, settings.BENCH_STATES))}).")
    parser.add_argument("--tol", type=float, default=None, help="Newton tolerance on the residual max-norm.")
    parser.add_argument("--step-size", type=float, default=None,
                        help=f"Fixed Newton step size in (0, 1] (default: {settings.BENCH_STEP_SIZE}).")
    parser.add_argument("--k1", type=float, default=None, help="Population absorption rate.")
    parser.add_argument("--k2", type=float, default=None, help="Population elimination rate.")
    parser.add_argument("--dose", type=float, default=None, help="Dose mass added every interval.")
    parser.add_argument("--dt", type=float, default=None, help="Dosing interval.")
    parser.add_argument("--dot", type=Path, default=None, help="Write the log-normal expression graph as DOT.")
    parser.add_argument("--log-level", default="WARNING",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="Logging level.")
    return parser


def _params(args: argparse.Namespace) -> BenchParams:
    overrides = {}
    if args.states is not None:
        overrides["states"] = args.states
    if args.tol is not None:
        overrides["tol"] = args.tol
    if args.step_size is not None:
        overrides["step_size"] = args.step_size
    if args.k1 is not None or args.k2 is not None:
        k1, k2 = settings.K_POP
        overrides["k_pop"] = (args.k1 if args.k1 is not None else k1, args.k2 if args.k2 is not None else k2)
    if args.dose is not None:
        overrides["dose_mass"] = args.dose
    if args.dt is not None:
        overrides["delta_t"] = args.dt
    return BenchParams(**overrides)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=args.log_level, format="%(asctime)s %(name)s %(levelname)s %(message)s")

    if args.name is None and args.dot is None:
        parser.error("one of --name or --dot is required")
    if args.name is not None and args.out is None:
        parser.error("--out is required with --name")
    if args.repeats < 1:
        parser.error("--repeats must be at least 1")

    try:
        if args.dot is not None:
            tape, density = log_normal_graph()
            args.dot.write_text(tape.export_dot(density), encoding="utf-8")
            ad_logger.info("Wrote log-normal graph to %s", args.dot)
        if args.name is None:
            return EXIT_OK
        report = run_bench(args.name, _params(args), args.repeats, args.seed, args.out)
    except ValueError as e:
        print(f"bench: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        ad_logger.error("Cannot write output: %s", e, exc_info=True)
        print(f"bench: error: {e}", file=sys.stderr)
        return EXIT_USAGE

    if report.failed:
        return EXIT_SOLVER_FAILURE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
