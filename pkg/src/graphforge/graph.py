"""In-memory computation graph model: validation, shape inference, counting.

A GraphSpec is the player-editable artifact: a DAG of tensor operations
over declared inputs and trainable parameters, with one designated
output node and a cross-entropy loss attached to a softmax node.
Validation collects *all* detectable errors rather than stopping at the
first one, so an editor can show the complete list.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

# The batch wildcard: permitted only as the first dimension of a shape.
WILDCARD = None

Dim = Optional[int]


@dataclass(frozen=True)
class Shape:
    """Tensor shape; dims are positive ints, or None (wildcard) first."""

    dims: tuple[Dim, ...]

    def __post_init__(self):
        if len(self.dims) < 1:
            raise ValueError("shape needs at least one dimension")
        for i, d in enumerate(self.dims):
            if d is WILDCARD:
                if i != 0:
                    raise ValueError("wildcard only allowed as the first dimension")
            elif not isinstance(d, int) or d < 1:
                raise ValueError(f"dimension {d!r} must be a positive integer")

    @property
    def rank(self) -> int:
        return len(self.dims)

    @property
    def has_wildcard(self) -> bool:
        return self.dims[0] is WILDCARD

    def with_batch(self, m: int) -> tuple[int, ...]:
        """Concrete dims with the wildcard bound to batch size m."""
        return tuple(m if d is WILDCARD else d for d in self.dims)

    def __str__(self) -> str:
        return "[" + ",".join("?" if d is WILDCARD else str(d) for d in self.dims) + "]"


class OpKind(Enum):
    MATMUL = "matmul"
    ADDBIAS = "addbias"
    RELU = "relu"
    SOFTMAX = "softmax"

    @property
    def arity(self) -> int:
        return 2 if self in (OpKind.MATMUL, OpKind.ADDBIAS) else 1


OP_NAMES = {op.value: op for op in OpKind}


@dataclass(frozen=True)
class InputDecl:
    name: str
    shape: Shape


@dataclass(frozen=True)
class ParamDecl:
    name: str
    shape: Shape
    init: str  # "zeros" | "glorot"


@dataclass(frozen=True)
class NodeDecl:
    name: str
    op: OpKind
    operands: tuple[str, ...]


@dataclass(frozen=True)
class LossDecl:
    kind: str  # only "cross_entropy"
    target: str


@dataclass(frozen=True)
class GraphSpec:
    """Declarative computation graph, the unit players author and trade.

    `positions` maps declared names to (line, column) in the source the
    spec was parsed from; it is editor metadata and excluded from
    equality, so structural identity survives reformatting.
    """

    name: str
    inputs: tuple[InputDecl, ...]
    params: tuple[ParamDecl, ...]
    nodes: tuple[NodeDecl, ...]
    output: Optional[str]
    loss: Optional[LossDecl]
    positions: dict = field(default_factory=dict, compare=False, repr=False)

    def declared_names(self) -> list[str]:
        return (
            [d.name for d in self.inputs]
            + [p.name for p in self.params]
            + [n.name for n in self.nodes]
        )


@dataclass(frozen=True)
class GraphError:
    category: str  # cycle | unresolved-reference | duplicate-name | shape-mismatch | missing-output | bad-loss-target
    name: str
    message: str

    def __str__(self) -> str:
        return f"{self.category}({self.name}): {self.message}"


class ValidationFailure(ValueError):
    """Raised by validate(); carries every detected GraphError."""

    def __init__(self, errors: list[GraphError]):
        super().__init__("; ".join(str(e) for e in errors))
        self.errors = errors


@dataclass(frozen=True, eq=False)
class ValidatedGraph:
    """A GraphSpec plus its topological node order and full shape table.

    Immutable after construction; safe to share across threads.
    """

    spec: GraphSpec
    topo_nodes: tuple[NodeDecl, ...]
    shapes: dict  # name -> Shape, for every input/param/node

    @property
    def output_shape(self) -> Shape:
        return self.shapes[self.spec.output]

    def node(self, name: str) -> NodeDecl:
        for n in self.spec.nodes:
            if n.name == name:
                return n
        raise KeyError(name)


def node_count(spec: GraphSpec) -> int:
    """Declarations in the graph: inputs + params + nodes."""
    return len(spec.inputs) + len(spec.params) + len(spec.nodes)


def _infer_node_shape(node: NodeDecl, operand_shapes: list[Shape]) -> Shape:
    """Shape rule for one node; raises ValueError with a mismatch message."""
    op = node.op
    if op is OpKind.MATMUL:
        a, b = operand_shapes
        if a.rank != 2 or b.rank != 2:
            raise ValueError(
                f"matmul needs two rank-2 operands, got {a} and {b}"
            )
        if b.has_wildcard:
            raise ValueError(f"matmul right operand {b} may not have a wildcard dimension")
        if a.dims[1] != b.dims[0]:
            raise ValueError(
                f"matmul inner dimensions disagree: {node.operands[0]} is {a}, "
                f"{node.operands[1]} is {b}"
            )
        return Shape((a.dims[0], b.dims[1]))
    if op is OpKind.ADDBIAS:
        x, v = operand_shapes
        if x.rank != 2 or v.rank != 1:
            raise ValueError(f"addbias needs a matrix and a vector, got {x} and {v}")
        if v.has_wildcard:
            raise ValueError(f"addbias bias {v} may not have a wildcard dimension")
        if x.dims[1] != v.dims[0]:
            raise ValueError(
                f"addbias widths disagree: {node.operands[0]} is {x}, "
                f"{node.operands[1]} is {v}"
            )
        return x
    if op is OpKind.RELU:
        return operand_shapes[0]
    if op is OpKind.SOFTMAX:
        x = operand_shapes[0]
        if x.rank != 2:
            raise ValueError(f"softmax needs a rank-2 operand, got {x}")
        return x
    raise AssertionError(f"unhandled op {op}")


def _toposort(spec: GraphSpec) -> tuple[list[NodeDecl], set[str]]:
    """Kahn's algorithm over node->node dependencies.

    Returns (ordered nodes, names of nodes stuck on cycles). Operands
    pointing at inputs/params/undeclared names impose no ordering.
    """
    node_names = {n.name for n in spec.nodes}
    pending = {n.name: sum(1 for o in n.operands if o in node_names) for n in spec.nodes}
    consumers: dict[str, list[str]] = {name: [] for name in node_names}
    by_name = {n.name: n for n in spec.nodes}
    for n in spec.nodes:
        for o in n.operands:
            if o in node_names:
                consumers[o].append(n.name)
    ready = [n.name for n in spec.nodes if pending[n.name] == 0]
    order: list[NodeDecl] = []
    while ready:
        name = ready.pop(0)
        order.append(by_name[name])
        for c in consumers[name]:
            pending[c] -= 1
            if pending[c] == 0:
                ready.append(c)
    stuck = {name for name, k in pending.items() if k > 0}
    return order, stuck


def validate(spec: GraphSpec) -> ValidatedGraph:
    """Check every graph invariant, collecting all errors before raising.

    On success returns the spec with a topological node order and a
    complete shape table; on failure raises ValidationFailure carrying
    one GraphError per problem found.
    """
    errors: list[GraphError] = []

    seen: set[str] = set()
    for name in spec.declared_names():
        if name in seen:
            errors.append(GraphError("duplicate-name", name, f"'{name}' declared more than once"))
        seen.add(name)

    known = set(spec.declared_names())
    for n in spec.nodes:
        for o in n.operands:
            if o not in known:
                errors.append(
                    GraphError("unresolved-reference", o, f"node '{n.name}' references undeclared '{o}'")
                )

    order, stuck = _toposort(spec)
    if stuck:
        joined = ",".join(sorted(stuck))
        errors.append(GraphError("cycle", joined, f"nodes {{{joined}}} form or depend on a cycle"))

    shapes: dict[str, Shape] = {}
    for d in spec.inputs:
        shapes[d.name] = d.shape
    for p in spec.params:
        if p.shape.has_wildcard:
            errors.append(
                GraphError("shape-mismatch", p.name, f"param '{p.name}' may not use the batch wildcard")
            )
        shapes[p.name] = p.shape
    for n in order:
        operand_shapes = [shapes.get(o) for o in n.operands]
        if len(n.operands) != n.op.arity:
            errors.append(
                GraphError(
                    "shape-mismatch",
                    n.name,
                    f"{n.op.value} takes {n.op.arity} operand(s), got {len(n.operands)}",
                )
            )
            continue
        if any(s is None for s in operand_shapes):
            continue  # unresolved operand already reported
        try:
            shapes[n.name] = _infer_node_shape(n, operand_shapes)
        except ValueError as e:
            errors.append(GraphError("shape-mismatch", n.name, str(e)))

    node_names = {n.name for n in spec.nodes}
    if not spec.output:
        errors.append(GraphError("missing-output", spec.name, "graph declares no output"))
    elif spec.output not in node_names:
        errors.append(
            GraphError("missing-output", spec.output, f"output '{spec.output}' is not a node")
        )

    if spec.loss is None:
        errors.append(GraphError("bad-loss-target", spec.name, "graph declares no loss"))
    else:
        target = spec.loss.target
        by_name = {n.name: n for n in spec.nodes}
        if target not in by_name:
            errors.append(
                GraphError("bad-loss-target", target, f"loss target '{target}' is not a node")
            )
        elif by_name[target].op is not OpKind.SOFTMAX:
            errors.append(
                GraphError(
                    "bad-loss-target",
                    target,
                    f"loss target '{target}' must be a softmax node, found {by_name[target].op.value}",
                )
            )

    if errors:
        raise ValidationFailure(errors)
    return ValidatedGraph(spec=spec, topo_nodes=tuple(order), shapes=shapes)


def infer_shapes(spec: GraphSpec) -> dict:
    """Shape table for a spec whose references resolve and that is acyclic.

    Raises ValidationFailure with shape-mismatch errors on any rule
    violation (standalone variant of the inference validate() runs).
    """
    graph = validate(spec)
    return dict(graph.shapes)
