from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np

from . import admath
from .AdEnums import OpKind
from .AdErrors import DimensionMismatchError
from .Dual import Dual, dual_primitive
from .Primitives import primitive_partials
from .Tape import Tape
from .VarRef import VarRef
from .utils import as_float_vector, get_as_tuple

type ScalarFunction = Callable[[list[Any]], Any]


@dataclass(frozen=True)
class HvpSeed:
    """
    Seed (u, w, v) of a forward-over-reverse sweep, which yields u * grad f + w * Hess f . v.
    """
    u: float
    w: float
    v: np.ndarray

    @classmethod
    def hessian_vector(cls, v: Sequence[float]) -> "HvpSeed":
        return cls(0.0, 1.0, as_float_vector(v, "v"))


def _record(f: ScalarFunction, x: np.ndarray, tape: Tape) -> tuple[list[VarRef], VarRef | None]:
    inputs = [tape.new_input(value) for value in x]
    outputs = get_as_tuple(f(inputs))
    if len(outputs) != 1:
        raise DimensionMismatchError(f"Second-order sweeps need a scalar function, got {len(outputs)} outputs")
    output = outputs[0]
    return inputs, output if isinstance(output, VarRef) else None


def _dual_sweep(tape: Tape, inputs: list[VarRef], output: VarRef | None,
                direction: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Replays the recording on dual numbers whose tangents are seeded with ``direction``, then runs the
    reverse sweep with dual-valued partials and adjoints. The adjoint values form the gradient, their
    tangents the Hessian-vector product.
    """
    n = len(inputs)
    if output is None:
        return np.zeros(n), np.zeros(n)
    seeds = {ref.id: float(t) for ref, t in zip(inputs, direction)}
    top = output.id
    values: list[Dual | None] = [None] * (top + 1)
    partials: list[tuple[Any, ...]] = [()] * (top + 1)
    parents: list[tuple[int, ...]] = [()] * (top + 1)
    for node in tape.nodes(0, top + 1):
        if node.op is OpKind.INPUT:
            values[node.id] = Dual(node.value, seeds.get(node.id, 0.0))
        elif node.op is OpKind.CONSTANT:
            values[node.id] = Dual(node.value, 0.0)
        else:
            args = tuple(values[p] for p in node.parents)
            value = dual_primitive(node.primitive, *args, const=node.const)
            values[node.id] = value
            partials[node.id] = primitive_partials(node.primitive, args, node.const, value, admath)
            parents[node.id] = node.parents

    adjoints: list[Dual | None] = [None] * (top + 1)
    adjoints[top] = Dual(1.0, 0.0)
    for node_id in range(top, -1, -1):
        adjoint = adjoints[node_id]
        if adjoint is None:
            continue
        for parent, partial in zip(parents[node_id], partials[node_id]):
            contribution = partial * adjoint
            adjoints[parent] = contribution if adjoints[parent] is None else adjoints[parent] + contribution

    gradient = np.array([adjoints[ref.id].value if adjoints[ref.id] is not None else 0.0 for ref in inputs])
    hv = np.array([adjoints[ref.id].tangent if adjoints[ref.id] is not None else 0.0 for ref in inputs])
    return gradient, hv


def second_order_form(f: ScalarFunction, x: Sequence[float], seed: HvpSeed) -> np.ndarray:
    """
    Computes u * grad f(x) + w * Hess f(x) . v with one recording and one forward-over-reverse sweep.
    """
    x = as_float_vector(x, "x")
    direction = as_float_vector(seed.v, "v", len(x))
    tape = Tape()
    inputs, output = _record(f, x, tape)
    gradient, hv = _dual_sweep(tape, inputs, output, direction)
    tape.clear()
    return seed.u * gradient + seed.w * hv


def hvp(f: ScalarFunction, x: Sequence[float], v: Sequence[float], tape: Tape | None = None) -> np.ndarray:
    """
    Hessian-vector product Hess f(x) . v of a scalar function by forward-over-reverse.

    Args:
        f: Scalar program over a list of scalars, written with ``admath`` functions.
        x: Evaluation point.
        v: Direction.
        tape (Tape | None): Tape to record on; a tape created here is cleared afterwards.
    """
    x = as_float_vector(x, "x")
    seed = HvpSeed.hessian_vector(v)
    if len(seed.v) != len(x):
        raise DimensionMismatchError(f"v has length {len(seed.v)}, expected {len(x)}")
    owns_tape = tape is None
    tape = Tape() if owns_tape else tape
    inputs, output = _record(f, x, tape)
    _, hv = _dual_sweep(tape, inputs, output, seed.v)
    if owns_tape:
        tape.clear()
    return seed.w * hv


def hessian(f: ScalarFunction, x: Sequence[float]) -> np.ndarray:
    """
    Dense Hessian: f is recorded once and the recording is swept n times with basis directions.
    """
    x = as_float_vector(x, "x")
    n = len(x)
    tape = Tape()
    inputs, output = _record(f, x, tape)
    result = np.zeros((n, n))
    for i in range(n):
        _, result[:, i] = _dual_sweep(tape, inputs, output, np.eye(n)[i])
    tape.clear()
    return result
