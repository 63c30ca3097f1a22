import logging
from dataclasses import dataclass, field
from typing import Any, Callable, NamedTuple, Sequence

import numpy as np

from .AdEnums import CheckpointStrategy
from .AdErrors import DimensionMismatchError
from .Tape import Tape
from .admath import value_of
from .logger import AD_LOGGER_NAME
from .utils import as_float_vector, get_as_tuple

ad_logger = logging.getLogger(AD_LOGGER_NAME)

type Stage = Callable[[list[Any]], Any]


class SegmentedProgram:
    """
    A composite function f = f^L o ... o f^1 given as its stages.

    Args:
        stages (Sequence[Stage]): Stage functions, each mapping a list of scalars to a sequence of scalars.
        dims (Sequence[int]): Boundary dimensions, ``dims[l]`` is the input dimension of stage l and
            ``dims[L]`` the output dimension of the program.
    """

    def __init__(self, stages: Sequence[Stage], dims: Sequence[int]):
        if len(stages) == 0:
            raise ValueError("A segmented program needs at least one stage")
        if len(dims) != len(stages) + 1:
            raise DimensionMismatchError(f"{len(stages)} stages need {len(stages) + 1} boundary dimensions, "
                                         f"got {len(dims)}")
        if any(d < 1 for d in dims):
            raise DimensionMismatchError(f"Boundary dimensions must be positive, got {list(dims)}")
        self.stages = tuple(stages)
        self.dims = tuple(int(d) for d in dims)
        self.stage_executions = 0

    @property
    def n_stages(self) -> int:
        return len(self.stages)

    def reset_counter(self):
        self.stage_executions = 0

    def run_stage(self, index: int, state: Sequence[Any]) -> list[Any]:
        self.stage_executions += 1
        out = list(get_as_tuple(self.stages[index](list(state))))
        if len(out) != self.dims[index + 1]:
            raise DimensionMismatchError(f"Stage {index} returned {len(out)} values, "
                                         f"expected {self.dims[index + 1]}")
        return out

    def run(self, start: int, stop: int, state: Sequence[Any]) -> list[Any]:
        """
        Runs stages ``start`` up to (excluding) ``stop`` on the given boundary state.
        """
        state = list(state)
        for index in range(start, stop):
            state = self.run_stage(index, state)
        return state


@dataclass(frozen=True)
class CheckpointPlan:
    """
    Attributes:
        splits (tuple[int, ...]): Strictly increasing stage indices in 1..L-1 where the recording is cut.
        snapshots (frozenset[int]): The splits whose boundary states are stored under the snapshot strategy.
    """
    splits: tuple[int, ...] = ()
    snapshots: frozenset[int] = field(default_factory=frozenset)

    def validate(self, n_stages: int):
        if any(b <= a for a, b in zip(self.splits, self.splits[1:])):
            raise ValueError(f"Splits must be strictly increasing, got {self.splits}")
        if any(not 1 <= s <= n_stages - 1 for s in self.splits):
            raise ValueError(f"Splits must lie in 1..{n_stages - 1}, got {self.splits}")
        if not set(self.snapshots) <= set(self.splits):
            raise ValueError(f"Snapshots {sorted(self.snapshots)} are not a subset of the splits {self.splits}")

    def boundaries(self, n_stages: int) -> list[int]:
        return [0, *self.splits, n_stages]


def equispaced_plan(n_stages: int, n_segments: int) -> CheckpointPlan:
    """
    Splits L stages into K segments at floor(i * L / K), i = 1..K-1. Every split is a snapshot.
    """
    if not 1 <= n_segments <= n_stages:
        raise ValueError(f"Number of segments must be between 1 and {n_stages}, got {n_segments}")
    splits = tuple(i * n_stages // n_segments for i in range(1, n_segments))
    return CheckpointPlan(splits, frozenset(splits))


class CheckpointResult(NamedTuple):
    value: np.ndarray
    gradient: np.ndarray
    peak_nodes: int
    stage_executions: int


def _stored_boundaries(plan: CheckpointPlan, strategy: CheckpointStrategy) -> set[int]:
    match strategy:
        case CheckpointStrategy.STORE_ALL:
            return {0, *plan.splits}
        case CheckpointStrategy.SNAPSHOTS:
            return {0, *plan.snapshots}
        case CheckpointStrategy.RECOMPUTE_ALL:
            return {0}
    raise ValueError(f"Unsupported checkpoint strategy {strategy!r}")


def _record_segment(program: SegmentedProgram, start: int, stop: int, state: Sequence[float],
                    cotangent: Sequence[float], tape: Tape) -> tuple[list[float], list[float]]:
    inputs = [tape.new_input(value) for value in state]
    outputs = program.run(start, stop, inputs)
    adjoints = tape.reverse_sweep_cotangent(outputs, cotangent)
    ad_logger.debug("Segment [%d, %d) recorded with %d nodes", start, stop, len(tape))
    values = [value_of(out) for out in outputs]
    upstream = [adjoints[ref.id] for ref in inputs]
    tape.clear()
    return values, upstream


def grad_checkpointed(program: SegmentedProgram, x: Sequence[float], w: Sequence[float],
                      plan: CheckpointPlan | None = None,
                      strategy: CheckpointStrategy = CheckpointStrategy.RECOMPUTE_ALL) -> CheckpointResult:
    """
    Computes f(x) and J^T w one segment at a time, so the tape never holds more than one segment.

    The program runs passively up to the start of the last segment, storing the boundary states the
    strategy keeps. Segments are then recorded and swept from last to first. Each earlier segment is
    reached again by a passive run from the nearest stored boundary at or before its start: the input
    under recompute_all, the segment's own start under store_all.

    Args:
        program (SegmentedProgram): The composite function.
        x (Sequence[float]): Input, of length ``dims[0]``.
        w (Sequence[float]): Cotangent, of length ``dims[L]``.
        plan (CheckpointPlan | None): Where to cut; no splits by default.
        strategy (CheckpointStrategy): Which boundary states are kept.

    Returns:
        CheckpointResult: value, gradient, tape high-water mark and the number of stage executions.
    """
    plan = plan or CheckpointPlan()
    n_stages = program.n_stages
    plan.validate(n_stages)
    x = as_float_vector(x, "x", program.dims[0])
    w = as_float_vector(w, "w", program.dims[-1])
    bounds = plan.boundaries(n_stages)
    keep = _stored_boundaries(plan, strategy)
    executions_before = program.stage_executions

    stored: dict[int, list[float]] = {0: x.tolist()}
    state = x.tolist()
    for start, stop in zip(bounds[:-2], bounds[1:-1]):
        state = program.run(start, stop, state)
        if stop in keep:
            stored[stop] = state

    tape = Tape()
    value, cotangent = _record_segment(program, bounds[-2], bounds[-1], state, w, tape)
    for segment in range(len(bounds) - 3, -1, -1):
        start, stop = bounds[segment], bounds[segment + 1]
        origin = max(b for b in stored if b <= start)
        state = program.run(origin, start, stored[origin])
        _, cotangent = _record_segment(program, start, stop, state, cotangent, tape)

    return CheckpointResult(np.array(value), np.array(cotangent), tape.high_water_mark,
                            program.stage_executions - executions_before)
