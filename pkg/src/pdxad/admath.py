"""
Elementary functions that accept plain floats as well as tape handles and dual numbers.

A function body written against this module runs passively, taped or dual-valued depending on
the scalars it receives.
"""
from typing import Any

from .AbstractScalar import AbstractScalar
from .Primitives import Primitive, evaluate_value


def value_of(x: Any) -> float:
    if isinstance(x, AbstractScalar):
        return x.value
    return float(x)


def _unary(kind: Primitive, x: Any, const: float | None = None) -> Any:
    if isinstance(x, AbstractScalar):
        return x.apply(kind, const=const)
    return evaluate_value(kind, (float(x),), const)


def exp(x):
    return _unary(Primitive.EXP, x)


def log(x):
    return _unary(Primitive.LOG, x)


def sqrt(x):
    return _unary(Primitive.SQRT, x)


def square(x):
    return _unary(Primitive.SQUARE, x)


def power(x, exponent: float):
    return _unary(Primitive.POW, x, float(exponent))


def sin(x):
    return _unary(Primitive.SIN, x)


def cos(x):
    return _unary(Primitive.COS, x)


def cosh(x):
    return _unary(Primitive.COSH, x)


def sinh(x):
    return _unary(Primitive.SINH, x)
