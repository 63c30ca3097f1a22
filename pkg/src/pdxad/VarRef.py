from typing import TYPE_CHECKING, Self

from .AbstractScalar import AbstractScalar
from .Primitives import Primitive

if TYPE_CHECKING:
    from .Tape import NodeId, Tape


class VarRef(AbstractScalar):
    """
    Handle on one node of a tape. Arithmetic on handles records new nodes on that tape.

    Attributes:
        tape (Tape): The tape holding the node.
        id (NodeId): Position of the node in recording order.
    """
    __slots__ = ("tape", "id")

    def __init__(self, tape: "Tape", id: "NodeId"):
        self.tape = tape
        self.id = id

    @property
    def value(self) -> float:
        return self.tape.value(self.id)

    @property
    def adjoint(self) -> float:
        return self.tape.adjoint(self.id)

    def apply(self, kind: Primitive, *others: Self, const: float | None = None) -> Self:
        return self.tape.apply_primitive(kind, self, *others, const=const)

    def lift(self, constant: float) -> Self:
        return self.tape.new_constant(constant)

    def __repr__(self):
        return f"VarRef(id={self.id}, value={self.value!r})"
