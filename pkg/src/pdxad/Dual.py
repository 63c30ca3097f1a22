import math
from typing import Self

from .AbstractScalar import AbstractScalar
from .AdErrors import DomainError
from .OpCounter import active_counter
from .Primitives import Primitive, evaluate_primitive, primitive_rule


class Dual(AbstractScalar):
    """
    A value paired with its directed partial along one seed direction.
    """
    __slots__ = ("_value", "tangent")

    def __init__(self, value: float, tangent: float = 0.0):
        self._value = float(value)
        self.tangent = float(tangent)

    @property
    def value(self) -> float:
        return self._value

    def apply(self, kind: Primitive, *others: Self, const: float | None = None) -> Self:
        return dual_primitive(kind, self, *others, const=const)

    def lift(self, constant: float) -> Self:
        return Dual(constant, 0.0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dual):
            return NotImplemented
        return self._value == other._value and self.tangent == other.tangent

    def __hash__(self):
        return hash((self._value, self.tangent))

    def __repr__(self):
        return f"Dual({self._value!r}, {self.tangent!r})"


def dual_primitive(kind: Primitive, *args: Dual, const: float | None = None) -> Dual:
    """
    Applies a primitive to dual numbers: the value is the primitive of the values, the tangent the sum of
    local partials times argument tangents.

    Raises:
        DomainError: if the arguments are outside the primitive's domain, or the tangent is not finite.
    """
    value, partials = evaluate_primitive(kind, tuple(arg.value for arg in args), const)
    tangent = 0.0
    for partial, arg in zip(partials, args):
        tangent += partial * arg.tangent
    if not math.isfinite(tangent):
        raise DomainError(f"{kind.value} produced a non-finite tangent")
    counter = active_counter()
    if counter is not None:
        rule = primitive_rule(kind)
        counter.add(rule.evaluation_cost, rule.partial_cost + rule.arity)
    return Dual(value, tangent)
