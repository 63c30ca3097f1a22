import contextvars
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Iterator

_active_counter_var: contextvars.ContextVar["OpCounter | None"] = contextvars.ContextVar("active_op_counter",
                                                                                        default=None)


@dataclass(slots=True)
class OpCounter:
    """
    Fused-multiply-add proxy counts.

    Attributes:
        n_nodes (int): Tape nodes at the time of the snapshot (nodes recorded, for a context counter).
        n_fma_equivalent (int): All work: primal evaluation, local partials and sweep accumulation.
        n_fma_evaluation (int): Primal evaluation alone.
    """
    n_nodes: int = 0
    n_fma_equivalent: int = 0
    n_fma_evaluation: int = 0

    def add(self, evaluation: int, derivative: int, nodes: int = 0):
        self.n_fma_evaluation += evaluation
        self.n_fma_equivalent += evaluation + derivative
        self.n_nodes += nodes

    @property
    def overhead_ratio(self) -> float:
        """
        Total work relative to evaluation alone.
        """
        if self.n_fma_evaluation == 0:
            return 0.0
        return self.n_fma_equivalent / self.n_fma_evaluation


def active_counter() -> OpCounter | None:
    return _active_counter_var.get()


@contextmanager
def count_operations() -> Iterator[OpCounter]:
    """
    Accumulates the cost of every primitive applied in this context, on tapes and on dual numbers alike.
    Nested contexts shadow the outer one.
    """
    counter = OpCounter()
    token = _active_counter_var.set(counter)
    try:
        yield counter
    finally:
        _active_counter_var.reset(token)
