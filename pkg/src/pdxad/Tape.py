import heapq
import logging
from dataclasses import dataclass
from typing import Iterator, Sequence

from . import settings
from .AdEnums import OpKind
from .AdErrors import DimensionMismatchError, TapeMismatchError
from .OpCounter import OpCounter, active_counter
from .Primitives import Primitive, evaluate_primitive, primitive_rule
from .VarRef import VarRef
from .logger import AD_LOGGER_NAME
from .utils import check_finite

ad_logger = logging.getLogger(AD_LOGGER_NAME)

type NodeId = int


@dataclass(frozen=True, slots=True)
class Node:
    """
    Read-only view of one recorded node.

    Attributes:
        id (NodeId): Position in recording order; every parent id is smaller.
        op (OpKind): input, constant, unary or binary.
        primitive (Primitive | None): The primitive of an operation node, None for inputs and constants.
        parents (tuple[NodeId, ...]): Up to two parent ids, empty for inputs and constants.
        local_partials (tuple[float, ...]): d(node)/d(parent) at the recorded values, one per parent.
        value (float): Recorded value.
        adjoint (float): Adjoint left by the latest reverse sweep.
        const (float | None): Constant argument of pow/scale/add_const.
    """
    id: NodeId
    op: OpKind
    primitive: Primitive | None
    parents: tuple[NodeId, ...]
    local_partials: tuple[float, ...]
    value: float
    adjoint: float
    const: float | None = None

    @property
    def label(self) -> str:
        return self.primitive.value if self.primitive is not None else self.op.value


class Tape:
    """
    Region-allocated expression graph for reverse mode.

    Nodes are stored column-wise in parallel lists. ``clear`` only resets the node count, so
    the slots of a previous recording are overwritten in place by the next one.
    """

    def __init__(self):
        self._ops: list[OpKind] = []
        self._primitives: list[Primitive | None] = []
        self._parents: list[tuple[NodeId, ...]] = []
        self._partials: list[tuple[float, ...]] = []
        self._values: list[float] = []
        self._adjoints: list[float] = []
        self._consts: list[float | None] = []
        self._size = 0
        self._high_water_mark = 0
        self._swept = 0
        self._fma_evaluation = 0
        self._fma_equivalent = 0

    def __len__(self) -> int:
        return self._size

    def __repr__(self):
        return f"Tape(nodes={self._size}, high_water_mark={self._high_water_mark})"

    @property
    def high_water_mark(self) -> int:
        return self._high_water_mark

    @property
    def capacity(self) -> int:
        return len(self._values)

    def _append(self, op: OpKind, primitive: Primitive | None, parents: tuple[NodeId, ...],
                partials: tuple[float, ...], value: float, const: float | None) -> NodeId:
        node_id = self._size
        if node_id < len(self._values):
            self._ops[node_id] = op
            self._primitives[node_id] = primitive
            self._parents[node_id] = parents
            self._partials[node_id] = partials
            self._values[node_id] = value
            self._adjoints[node_id] = 0.0
            self._consts[node_id] = const
        else:
            self._ops.append(op)
            self._primitives.append(primitive)
            self._parents.append(parents)
            self._partials.append(partials)
            self._values.append(value)
            self._adjoints.append(0.0)
            self._consts.append(const)
        self._size += 1
        if self._size > self._high_water_mark:
            self._high_water_mark = self._size
        return node_id

    def _check_handle(self, ref: VarRef):
        if not settings.CHECK_TAPE_IDENTITY:
            return
        if not isinstance(ref, VarRef):
            raise TypeError(f"Expected a VarRef, got {type(ref).__name__}")
        if ref.tape is not self:
            raise TapeMismatchError(f"Node {ref.id} belongs to a different tape")
        if ref.id >= self._size:
            raise TapeMismatchError(f"Node {ref.id} is not on the tape (tape holds {self._size} nodes)")

    def _charge(self, evaluation: int, derivative: int, nodes: int = 0):
        self._fma_evaluation += evaluation
        self._fma_equivalent += evaluation + derivative
        counter = active_counter()
        if counter is not None:
            counter.add(evaluation, derivative, nodes)

    def new_input(self, value: float) -> VarRef:
        """
        Records an independent variable.

        Raises:
            DomainError: if the value is NaN or infinite.
        """
        value = check_finite(value, "input value")
        self._charge(0, 0, 1)
        return VarRef(self, self._append(OpKind.INPUT, None, (), (), value, None))

    def new_constant(self, value: float) -> VarRef:
        value = check_finite(value, "constant")
        self._charge(0, 0, 1)
        return VarRef(self, self._append(OpKind.CONSTANT, None, (), (), value, None))

    def apply_primitive(self, kind: Primitive, *args: VarRef, const: float | None = None) -> VarRef:
        """
        Records one primitive applied to nodes of this tape, with its local partials evaluated eagerly.

        Args:
            kind (Primitive): The primitive.
            *args (VarRef): One or two differentiable arguments, all on this tape.
            const (float | None): The constant argument of pow, scale and add_const.

        Raises:
            TapeMismatchError: if an argument lives on another tape.
            DomainError: if the arguments are outside the primitive's domain.
        """
        for arg in args:
            self._check_handle(arg)
        parents = tuple(arg.id for arg in args)
        value, partials = evaluate_primitive(kind, tuple(self._values[i] for i in parents), const)
        rule = primitive_rule(kind)
        self._charge(rule.evaluation_cost, rule.partial_cost, 1)
        op = OpKind.UNARY if rule.arity == 1 else OpKind.BINARY
        return VarRef(self, self._append(op, kind, parents, partials, value, const))

    def value(self, node_id: NodeId) -> float:
        return self._values[node_id]

    def adjoint(self, node_id: NodeId) -> float:
        return self._adjoints[node_id]

    def node(self, node_id: NodeId) -> Node:
        if not 0 <= node_id < self._size:
            raise IndexError(f"Node {node_id} is not on the tape")
        return Node(node_id, self._ops[node_id], self._primitives[node_id], self._parents[node_id],
                    self._partials[node_id], self._values[node_id], self._adjoints[node_id],
                    self._consts[node_id])

    def nodes(self, start: int = 0, stop: int | None = None) -> Iterator[Node]:
        stop = self._size if stop is None else min(stop, self._size)
        for node_id in range(start, stop):
            yield self.node(node_id)

    def _sweep(self, top: NodeId) -> list[float]:
        adjoints = self._adjoints
        parents = self._parents
        partials = self._partials
        edges = 0
        for node_id in range(top, -1, -1):
            node_parents = parents[node_id]
            edges += len(node_parents)
            adjoint = adjoints[node_id]
            if adjoint == 0.0:
                continue
            for parent, partial in zip(node_parents, partials[node_id]):
                adjoints[parent] += partial * adjoint
        self._swept = top + 1
        self._charge(0, edges)
        return adjoints[:self._size]

    def _zero_adjoints(self):
        # slots above the last sweep's top are still zero
        self._adjoints[:self._swept] = [0.0] * self._swept
        self._swept = 0

    def reverse_sweep(self, output: VarRef, seed: float = 1.0) -> list[float]:
        """
        Propagates adjoints from one output back to every node, visiting ids in decreasing order.

        Adjoints of a previous sweep are zeroed first, so repeated sweeps over the same recording are
        independent.

        Returns:
            list[float]: The adjoint of every node, indexed by NodeId.
        """
        self._check_handle(output)
        seed = check_finite(seed, "seed")
        self._zero_adjoints()
        self._adjoints[output.id] = seed
        return self._sweep(output.id)

    def reverse_sweep_cotangent(self, outputs: Sequence[VarRef | float], cotangent: Sequence[float]) -> list[float]:
        """
        One reverse sweep seeded with a cotangent over several outputs, computing J^T w.
        Outputs that are plain floats do not depend on the tape and are skipped. The sweep starts at the
        latest output with a non-zero weight.
        """
        if len(outputs) != len(cotangent):
            raise DimensionMismatchError(f"{len(outputs)} outputs but a cotangent of length {len(cotangent)}")
        self._zero_adjoints()
        top = -1
        for output, weight in zip(outputs, cotangent):
            weight = check_finite(weight, "cotangent entry")
            if not isinstance(output, VarRef):
                continue
            self._check_handle(output)
            if weight == 0.0:
                continue
            self._adjoints[output.id] += weight
            top = max(top, output.id)
        if top < 0:
            return [0.0] * self._size
        return self._sweep(top)

    def reverse_sweep_reachable(self, output: VarRef, wrt: Sequence[VarRef], seed: float = 1.0) -> list[float]:
        """
        Reverse sweep over the nodes ``output`` depends on, in decreasing id order, skipping the rest of
        the recording. Gives the same adjoints as :meth:`reverse_sweep` at a cost that follows the size
        of that subgraph.

        Args:
            output (VarRef): Node to seed.
            wrt (Sequence[VarRef]): Nodes whose adjoints are returned, typically the inputs.
            seed (float): Adjoint of ``output``.

        Returns:
            list[float]: The adjoint of every node of ``wrt``, in order.
        """
        self._check_handle(output)
        for ref in wrt:
            self._check_handle(ref)
        seed = check_finite(seed, "seed")
        self._zero_adjoints()
        adjoints = self._adjoints
        parents = self._parents
        partials = self._partials
        adjoints[output.id] = seed
        pending = [-output.id]
        queued = {output.id}
        edges = 0
        while pending:
            node_id = -heapq.heappop(pending)
            node_parents = parents[node_id]
            edges += len(node_parents)
            adjoint = adjoints[node_id]
            if adjoint == 0.0:
                continue
            for parent, partial in zip(node_parents, partials[node_id]):
                adjoints[parent] += partial * adjoint
                if parent not in queued:
                    queued.add(parent)
                    heapq.heappush(pending, -parent)
        self._swept = output.id + 1
        self._charge(0, edges)
        return [adjoints[ref.id] for ref in wrt]

    def clear(self):
        """
        Drops every node in one step. Capacity and the high-water mark are kept.
        """
        self._size = 0
        self._swept = 0
        self._fma_evaluation = 0
        self._fma_equivalent = 0

    def op_counter(self) -> OpCounter:
        return OpCounter(self._size, self._fma_equivalent, self._fma_evaluation)

    def export_dot(self, output: VarRef) -> str:
        """
        Graphviz description of the nodes reachable from ``output``, labelled v1, v2, ... in recording order.
        Edges run from parent to child.
        """
        self._check_handle(output)
        reachable = {output.id}
        pending = [output.id]
        while pending:
            for parent in self._parents[pending.pop()]:
                if parent not in reachable:
                    reachable.add(parent)
                    pending.append(parent)
        ordered = sorted(reachable)
        lines = ["digraph tape {"]
        for node_id in ordered:
            lines.append(f'  v{node_id + 1} [label="v{node_id + 1}: {self.node(node_id).label}"];')
        for node_id in ordered:
            for parent in self._parents[node_id]:
                lines.append(f"  v{parent + 1} -> v{node_id + 1};")
        lines.append("}")
        ad_logger.debug("Exported %d nodes reachable from v%d", len(ordered), output.id + 1)
        return "\n".join(lines) + "\n"
