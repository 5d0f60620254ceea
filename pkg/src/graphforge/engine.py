"""Graph execution: forward pass, reverse-mode gradients, init, SGD.

Tensors are C-contiguous float64 numpy arrays throughout; the desk
scale makes 64-bit everywhere cheap and keeps every tolerance honest.
All functions are pure: they never mutate their argument arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import NodeDecl, OpKind, Shape, ValidatedGraph
from .rng import SplitMix64, derive_seed

ParamSet = dict  # param name -> np.ndarray


class NumericOverflowError(ArithmeticError):
    """A forward value or the loss left the finite float64 range."""


class GraphDataError(ValueError):
    """Bound data does not fit the graph's declared shapes."""


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int
    learning_rate: float
    steps: int
    seed: int
    eval_interval: int
    eval_batch_size: int

    def __post_init__(self):
        for name in ("batch_size", "steps", "eval_interval", "eval_batch_size"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative 64-bit integer")
        if self.eval_interval > self.steps:
            raise ValueError("eval_interval must not exceed steps")


def glorot_bound(shape: Shape) -> float:
    """Uniform bound sqrt(6/(fan_in+fan_out)); rank-1 uses fan=dim twice."""
    dims = shape.dims
    if len(dims) >= 2:
        fan_in, fan_out = dims[0], dims[1]
    else:
        fan_in = fan_out = dims[0]
    return math.sqrt(6.0 / (fan_in + fan_out))


def init_params(graph: ValidatedGraph, seed: int) -> ParamSet:
    """Fresh parameter tensors for a validated graph.

    Glorot draws come from one SplitMix64 stream (derived from the seed)
    consumed in param-name-sorted order, so the result is bit-identical
    across runs and platforms for a given seed.
    """
    stream = SplitMix64(derive_seed(seed, "init"))
    params: ParamSet = {}
    for decl in sorted(graph.spec.params, key=lambda p: p.name):
        dims = decl.shape.dims
        if decl.init == "zeros":
            params[decl.name] = np.zeros(dims, dtype=np.float64)
        else:
            r = glorot_bound(decl.shape)
            n = int(np.prod(dims))
            flat = np.fromiter((stream.next_float() for _ in range(n)), dtype=np.float64, count=n)
            params[decl.name] = (-r + flat * (2.0 * r)).reshape(dims)
    return params


def _check_finite(name: str, arr: np.ndarray):
    if not np.isfinite(arr).all():
        raise NumericOverflowError(f"non-finite values in '{name}'")


def _softmax(x: np.ndarray) -> np.ndarray:
    shifted = x - x.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def _apply(node: NodeDecl, args: list) -> np.ndarray:
    if node.op is OpKind.MATMUL:
        return args[0] @ args[1]
    if node.op is OpKind.ADDBIAS:
        return args[0] + args[1][None, :]
    if node.op is OpKind.RELU:
        return np.maximum(args[0], 0.0)
    return _softmax(args[0])


def bind_inputs(graph: ValidatedGraph, inputs) -> dict:
    """Resolve `inputs` (array for a single-input graph, or a name map)
    against the declared input shapes, binding each batch wildcard."""
    decls = graph.spec.inputs
    if isinstance(inputs, np.ndarray) or not isinstance(inputs, dict):
        if len(decls) != 1:
            raise GraphDataError(
                f"graph declares {len(decls)} inputs; pass a name->array mapping"
            )
        inputs = {decls[0].name: inputs}
    bound = {}
    for decl in decls:
        if decl.name not in inputs:
            raise GraphDataError(f"missing value for input '{decl.name}'")
        arr = np.ascontiguousarray(inputs[decl.name], dtype=np.float64)
        want = decl.shape
        if arr.ndim != want.rank:
            raise GraphDataError(
                f"input '{decl.name}' expects rank {want.rank}, got rank {arr.ndim}"
            )
        for axis, d in enumerate(want.dims):
            if d is not None and arr.shape[axis] != d:
                raise GraphDataError(
                    f"input '{decl.name}' expects shape {want}, got {arr.shape}"
                )
        bound[decl.name] = arr
    return bound


def forward(graph: ValidatedGraph, params: ParamSet, inputs) -> dict:
    """Evaluate every node in topological order; returns name -> tensor.

    Softmax rows are computed with max subtraction and sum to 1 within
    1e-9. Any non-finite intermediate raises NumericOverflowError.
    """
    values = bind_inputs(graph, inputs)
    for decl in graph.spec.params:
        if decl.name not in params:
            raise GraphDataError(f"missing parameter '{decl.name}'")
        arr = np.asarray(params[decl.name], dtype=np.float64)
        if arr.shape != decl.shape.dims:
            raise GraphDataError(
                f"param '{decl.name}' expects shape {decl.shape}, got {arr.shape}"
            )
        values[decl.name] = arr
    with np.errstate(over="ignore", invalid="ignore"):
        for node in graph.topo_nodes:
            out = _apply(node, [values[o] for o in node.operands])
            _check_finite(node.name, out)
            values[node.name] = out
    return values


def _loss_from_values(graph: ValidatedGraph, values: dict, labels: np.ndarray) -> float:
    """Mean cross-entropy against one-hot labels, from the logits.

    Computed as logsumexp(logits) - true_logit per row, which equals
    -log softmax(logits)[true] exactly but stays finite even when the
    materialized probability underflows.
    """
    target = graph.node(graph.spec.loss.target)
    logits = values[target.operands[0]]
    m = logits.shape[0]
    if labels.shape != logits.shape:
        raise GraphDataError(
            f"labels shape {labels.shape} does not match predictions {logits.shape}"
        )
    mx = logits.max(axis=1, keepdims=True)
    lse = mx[:, 0] + np.log(np.exp(logits - mx).sum(axis=1))
    true_logit = (logits * labels).sum(axis=1)
    loss = float(np.mean(lse - true_logit))
    if not math.isfinite(loss):
        raise NumericOverflowError("non-finite loss")
    return loss


def loss_and_grads(graph: ValidatedGraph, params: ParamSet, images, labels) -> tuple:
    """Cross-entropy loss and its gradient for every parameter.

    The softmax/cross-entropy pair is fused: the gradient is seeded at
    the prediction node's logits as (probs - labels)/m, then accumulated
    backwards through the DAG. Parameters the loss never reaches get
    zero gradients.
    """
    values = forward(graph, params, images)
    labels = np.asarray(labels, dtype=np.float64)
    loss = _loss_from_values(graph, values, labels)

    target = graph.node(graph.spec.loss.target)
    m = labels.shape[0]
    grads: dict = {target.operands[0]: (values[target.name] - labels) / m}

    for node in reversed(graph.topo_nodes):
        g = grads.pop(node.name, None)
        if g is None:
            continue
        a = [values[o] for o in node.operands]
        if node.op is OpKind.MATMUL:
            contribs = [g @ a[1].T, a[0].T @ g]
        elif node.op is OpKind.ADDBIAS:
            contribs = [g, g.sum(axis=0)]
        elif node.op is OpKind.RELU:
            contribs = [g * (a[0] > 0)]
        else:  # softmax Jacobian for a non-fused occurrence
            p = values[node.name]
            contribs = [p * (g - (g * p).sum(axis=1, keepdims=True))]
        for operand, contrib in zip(node.operands, contribs):
            if operand in grads:
                grads[operand] = grads[operand] + contrib
            else:
                grads[operand] = contrib

    param_grads: ParamSet = {}
    for decl in graph.spec.params:
        g = grads.get(decl.name)
        param_grads[decl.name] = np.zeros(decl.shape.dims) if g is None else g
    return loss, param_grads


def sgd_step(params: ParamSet, grads: ParamSet, learning_rate: float) -> ParamSet:
    """One vanilla SGD update, p' = p - lr * g, as a new ParamSet."""
    return {name: params[name] - learning_rate * grads[name] for name in params}


def grad_check(graph: ValidatedGraph, params: ParamSet, images, labels, epsilon: float = 1e-5) -> float:
    """Max relative error between analytic and central-difference grads.

    Every parameter coordinate is perturbed by +/- epsilon; the relative
    error uses denominator max(|analytic|, |numeric|, 1e-8). Intended
    for small graphs (<= ~1e4 parameters).
    """
    _, analytic = loss_and_grads(graph, params, images, labels)
    work = {name: arr.copy() for name, arr in params.items()}
    worst = 0.0
    for name in sorted(work):
        arr = work[name]
        a_arr = analytic[name]
        for idx in np.ndindex(arr.shape):
            orig = arr[idx]
            arr[idx] = orig + epsilon
            up = _loss_from_values(graph, forward(graph, work, images), np.asarray(labels, dtype=np.float64))
            arr[idx] = orig - epsilon
            down = _loss_from_values(graph, forward(graph, work, images), np.asarray(labels, dtype=np.float64))
            arr[idx] = orig
            numeric = (up - down) / (2.0 * epsilon)
            a = float(a_arr[idx])
            rel = abs(a - numeric) / max(abs(a), abs(numeric), 1e-8)
            if rel > worst:
                worst = rel
    return worst
