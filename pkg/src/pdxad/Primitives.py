import math
from dataclasses import dataclass
from enum import Enum
from types import ModuleType
from typing import Any, Callable

from .AdErrors import DomainError


class Primitive(Enum):
    ADD = "add"
    SUB = "sub"
    MUL = "mul"
    DIV = "div"
    NEG = "neg"
    LOG = "log"
    EXP = "exp"
    SQRT = "sqrt"
    SQUARE = "square"
    POW = "pow"
    COSH = "cosh"
    SINH = "sinh"
    SIN = "sin"
    COS = "cos"
    SCALE = "scale"
    ADD_CONST = "add_const"


@dataclass(frozen=True, slots=True)
class PrimitiveRule:
    """
    Evaluation and derivative formulas of one primitive.

    Attributes:
        arity (int): Number of differentiable arguments (1 or 2).
        takes_const (bool): Whether the primitive carries a constant argument (pow, scale, add_const).
        evaluate (Callable): (args, const) -> value, on plain floats.
        partials (Callable): (args, const, value, fn) -> local partials. ``fn`` provides exp/log/sin/...
            for the scalar type of ``args``, so the same formula yields float partials for the tape and
            dual-valued partials for forward-over-reverse.
        domain (Callable): (args, const) -> error message, or None when the arguments are admissible.
        evaluation_cost (int): Fused-multiply-add equivalents of the primal evaluation.
        partial_cost (int): Fused-multiply-add equivalents of computing the local partials.
    """
    arity: int
    takes_const: bool
    evaluate: Callable[[tuple[float, ...], float | None], float]
    partials: Callable[[tuple[Any, ...], float | None, Any, Any], tuple[Any, ...]]
    domain: Callable[[tuple[float, ...], float | None], str | None]
    evaluation_cost: int = 1
    partial_cost: int = 0


def _admissible(args: tuple[float, ...], const: float | None) -> str | None:
    return None


def _positive(args: tuple[float, ...], const: float | None) -> str | None:
    if args[0] <= 0.0:
        return f"argument must be positive, got {args[0]!r}"
    return None


def _nonzero_denominator(args: tuple[float, ...], const: float | None) -> str | None:
    if args[1] == 0.0:
        return "division by zero"
    return None


def _power_domain(args: tuple[float, ...], const: float | None) -> str | None:
    base = args[0]
    if base < 0.0 and not float(const).is_integer():
        return f"negative base {base!r} with non-integer exponent {const!r}"
    if base == 0.0 and const < 1.0:
        return f"zero base with exponent {const!r} has no finite derivative"
    return None


def _divide_partials(args, const, value, fn):
    inverse = 1.0 / args[1]
    return inverse, -value * inverse


RULES: dict[Primitive, PrimitiveRule] = {
    Primitive.ADD: PrimitiveRule(2, False, lambda a, c: a[0] + a[1], lambda a, c, v, fn: (1.0, 1.0), _admissible),
    Primitive.SUB: PrimitiveRule(2, False, lambda a, c: a[0] - a[1], lambda a, c, v, fn: (1.0, -1.0), _admissible),
    Primitive.MUL: PrimitiveRule(2, False, lambda a, c: a[0] * a[1], lambda a, c, v, fn: (a[1], a[0]), _admissible),
    Primitive.DIV: PrimitiveRule(2, False, lambda a, c: a[0] / a[1], _divide_partials, _nonzero_denominator,
                                 partial_cost=2),
    Primitive.NEG: PrimitiveRule(1, False, lambda a, c: -a[0], lambda a, c, v, fn: (-1.0,), _admissible),
    Primitive.LOG: PrimitiveRule(1, False, lambda a, c: math.log(a[0]), lambda a, c, v, fn: (1.0 / a[0],),
                                 _positive, partial_cost=1),
    Primitive.EXP: PrimitiveRule(1, False, lambda a, c: math.exp(a[0]), lambda a, c, v, fn: (v,), _admissible),
    Primitive.SQRT: PrimitiveRule(1, False, lambda a, c: math.sqrt(a[0]), lambda a, c, v, fn: (0.5 / v,),
                                  _positive, partial_cost=1),
    Primitive.SQUARE: PrimitiveRule(1, False, lambda a, c: a[0] * a[0], lambda a, c, v, fn: (2.0 * a[0],),
                                    _admissible, partial_cost=1),
    Primitive.POW: PrimitiveRule(1, True, lambda a, c: a[0] ** c, lambda a, c, v, fn: (c * a[0] ** (c - 1.0),),
                                 _power_domain, partial_cost=2),
    Primitive.COSH: PrimitiveRule(1, False, lambda a, c: math.cosh(a[0]), lambda a, c, v, fn: (fn.sinh(a[0]),),
                                  _admissible, partial_cost=1),
    Primitive.SINH: PrimitiveRule(1, False, lambda a, c: math.sinh(a[0]), lambda a, c, v, fn: (fn.cosh(a[0]),),
                                  _admissible, partial_cost=1),
    Primitive.SIN: PrimitiveRule(1, False, lambda a, c: math.sin(a[0]), lambda a, c, v, fn: (fn.cos(a[0]),),
                                 _admissible, partial_cost=1),
    Primitive.COS: PrimitiveRule(1, False, lambda a, c: math.cos(a[0]), lambda a, c, v, fn: (-fn.sin(a[0]),),
                                 _admissible, partial_cost=1),
    Primitive.SCALE: PrimitiveRule(1, True, lambda a, c: c * a[0], lambda a, c, v, fn: (c,), _admissible),
    Primitive.ADD_CONST: PrimitiveRule(1, True, lambda a, c: a[0] + c, lambda a, c, v, fn: (1.0,), _admissible),
}


def primitive_rule(kind: Primitive) -> PrimitiveRule:
    return RULES[kind]


def _check_signature(kind: Primitive, rule: PrimitiveRule, n_args: int, const: float | None):
    if n_args != rule.arity:
        raise TypeError(f"{kind.value} takes {rule.arity} differentiable argument(s), got {n_args}")
    if rule.takes_const:
        if const is None or not math.isfinite(const):
            raise DomainError(f"{kind.value} needs a finite constant argument, got {const!r}")
    elif const is not None:
        raise TypeError(f"{kind.value} takes no constant argument")


def evaluate_primitive(kind: Primitive, args: tuple[float, ...],
                       const: float | None = None) -> tuple[float, tuple[float, ...]]:
    """
    Applies a primitive to float arguments.

    Returns:
        The value and the local partials (one per argument), all finite.

    Raises:
        DomainError: if the arguments violate the primitive's domain or the result is not finite.
    """
    rule = RULES[kind]
    _check_signature(kind, rule, len(args), const)
    message = rule.domain(args, const)
    if message is not None:
        raise DomainError(f"{kind.value}: {message}")
    try:
        value = rule.evaluate(args, const)
        partials = rule.partials(args, const, value, math)
    except (OverflowError, ValueError, ZeroDivisionError) as e:
        raise DomainError(f"{kind.value}{args}: {e}") from e
    if not math.isfinite(value) or not all(math.isfinite(p) for p in partials):
        raise DomainError(f"{kind.value}{args} produced a non-finite result")
    return value, tuple(float(p) for p in partials)


def primitive_partials(kind: Primitive, args: tuple[Any, ...], const: float | None, value: Any,
                       fn: ModuleType) -> tuple[Any, ...]:
    """
    Local partials for non-float scalar types, e.g. dual numbers in forward-over-reverse.
    """
    return RULES[kind].partials(args, const, value, fn)


def evaluate_value(kind: Primitive, args: tuple[float, ...], const: float | None = None) -> float:
    """
    Passive evaluation: the same domain checks as :func:`evaluate_primitive`, no partials.
    """
    rule = RULES[kind]
    _check_signature(kind, rule, len(args), const)
    message = rule.domain(args, const)
    if message is not None:
        raise DomainError(f"{kind.value}: {message}")
    try:
        value = rule.evaluate(args, const)
    except (OverflowError, ValueError, ZeroDivisionError) as e:
        raise DomainError(f"{kind.value}{args}: {e}") from e
    if not math.isfinite(value):
        raise DomainError(f"{kind.value}{args} produced a non-finite result")
    return float(value)
