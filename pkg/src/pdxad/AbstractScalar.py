from abc import ABC, abstractmethod
from numbers import Real
from typing import Self

from .Primitives import Primitive


class AbstractScalar(ABC):
    """
    Operator overloading shared by the differentiable scalar types (tape handles and dual numbers).

    A plain number as partner of ``+``/``*`` (or subtrahend of ``-``) becomes the constant of an
    add_const/scale primitive. Elsewhere it is lifted to a constant operand of the binary primitive.
    """
    __slots__ = ()

    @property
    @abstractmethod
    def value(self) -> float:
        ...

    @abstractmethod
    def apply(self, kind: Primitive, *others: Self, const: float | None = None) -> Self:
        ...

    @abstractmethod
    def lift(self, constant: float) -> Self:
        ...

    def _binary(self, kind: Primitive, other: object, reflected: bool = False) -> Self:
        if isinstance(other, AbstractScalar):
            if type(other) is not type(self):
                raise TypeError(f"Cannot combine {type(self).__name__} with {type(other).__name__}")
            return other.apply(kind, self) if reflected else self.apply(kind, other)
        if not isinstance(other, Real):
            return NotImplemented
        constant = self.lift(float(other))
        return constant.apply(kind, self) if reflected else self.apply(kind, constant)

    def __add__(self, other: object) -> Self:
        if isinstance(other, Real):
            return self.apply(Primitive.ADD_CONST, const=float(other))
        return self._binary(Primitive.ADD, other)

    def __radd__(self, other: object) -> Self:
        return self.__add__(other)

    def __sub__(self, other: object) -> Self:
        if isinstance(other, Real):
            return self.apply(Primitive.ADD_CONST, const=-float(other))
        return self._binary(Primitive.SUB, other)

    def __rsub__(self, other: object) -> Self:
        return self._binary(Primitive.SUB, other, reflected=True)

    def __mul__(self, other: object) -> Self:
        if isinstance(other, Real):
            return self.apply(Primitive.SCALE, const=float(other))
        return self._binary(Primitive.MUL, other)

    def __rmul__(self, other: object) -> Self:
        return self.__mul__(other)

    def __truediv__(self, other: object) -> Self:
        return self._binary(Primitive.DIV, other)

    def __rtruediv__(self, other: object) -> Self:
        return self._binary(Primitive.DIV, other, reflected=True)

    def __neg__(self) -> Self:
        return self.apply(Primitive.NEG)

    def __pos__(self) -> Self:
        return self

    def __pow__(self, exponent: object) -> Self:
        if isinstance(exponent, AbstractScalar):
            raise TypeError("Only constant exponents are supported")
        if not isinstance(exponent, Real):
            return NotImplemented
        return self.apply(Primitive.POW, const=float(exponent))
