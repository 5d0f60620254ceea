"""Accuracy and information accuracy (signed prediction entropy, in bits).

Each classified example contributes its prediction entropy with a sign:
positive when the argmax matches the label, negative otherwise. The
batch mean of those signed entropies is the information accuracy; it
lives in [-log2 n, +log2 n] for n classes. The un-normalized sum is
kept as a variant. Logs are base 2 throughout, with 0*log2(0) := 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .engine import forward
from .graph import ValidatedGraph

_ROW_SUM_TOL = 1e-9


class ContractViolation(ValueError):
    """Input violates a metric precondition (bad distribution or labels)."""


@dataclass(frozen=True)
class MetricPoint:
    step: int
    split: str  # "train" | "eval"
    accuracy: float
    infoacc: float  # bits
    batch_size: int


def _as_prob_matrix(probs) -> np.ndarray:
    p = np.asarray(probs, dtype=np.float64)
    if p.ndim == 1:
        p = p[None, :]
    if p.ndim != 2:
        raise ContractViolation(f"probabilities must be rank 1 or 2, got rank {p.ndim}")
    if (p < 0).any():
        raise ContractViolation("negative probability entry")
    sums = p.sum(axis=1)
    if np.abs(sums - 1.0).max() > _ROW_SUM_TOL:
        worst = float(np.abs(sums - 1.0).max())
        raise ContractViolation(f"probability rows must sum to 1 (off by {worst:.3g})")
    return p


def _as_onehot_matrix(labels, n: int, m: int) -> np.ndarray:
    y = np.asarray(labels, dtype=np.float64)
    if y.ndim == 1:
        y = y[None, :]
    if y.shape != (m, n):
        raise ContractViolation(f"labels shape {y.shape} does not match predictions ({m}, {n})")
    if not (np.isin(y, (0.0, 1.0)).all() and (y.sum(axis=1) == 1.0).all()):
        raise ContractViolation("labels must be one-hot rows")
    return y


@dataclass(frozen=True)
class PredictionBatch:
    """Classifier output rows paired with their one-hot labels."""

    probs: np.ndarray  # [m, n], rows sum to 1
    labels: np.ndarray  # [m, n], one-hot

    def __post_init__(self):
        p = _as_prob_matrix(self.probs)
        y = _as_onehot_matrix(self.labels, p.shape[1], p.shape[0])
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "labels", y)

    @property
    def size(self) -> int:
        return self.probs.shape[0]

    @property
    def n_classes(self) -> int:
        return self.probs.shape[1]


def _row_entropies(p: np.ndarray) -> np.ndarray:
    logs = np.zeros_like(p)
    np.log2(p, out=logs, where=p > 0)
    return -(p * logs).sum(axis=1)


def entropy_bits(p) -> float:
    """Base-2 Shannon entropy of one probability vector.

    Zero entries contribute zero; the result lies in [0, log2 n].
    """
    mat = _as_prob_matrix(p)
    if mat.shape[0] != 1:
        raise ContractViolation("entropy_bits takes a single probability vector")
    return float(_row_entropies(mat)[0])


def _signs(p: np.ndarray, y: np.ndarray) -> np.ndarray:
    # np.argmax resolves ties toward the lowest index, the documented rule.
    correct = p.argmax(axis=1) == y.argmax(axis=1)
    return np.where(correct, 1.0, -1.0)


def prediction_sign(p, y_) -> int:
    """+1 when argmax(p) hits the hot label index, else -1."""
    mat = _as_prob_matrix(p)
    y = _as_onehot_matrix(y_, mat.shape[1], mat.shape[0])
    if mat.shape[0] != 1:
        raise ContractViolation("prediction_sign takes a single example")
    return int(_signs(mat, y)[0])


def information_accuracy(batch: PredictionBatch) -> float:
    """Mean signed prediction entropy over the batch, in bits."""
    e = _row_entropies(batch.probs)
    return float((_signs(batch.probs, batch.labels) * e).mean())


def information_accuracy_sum(batch: PredictionBatch) -> float:
    """Un-normalized variant: the plain sum of signed entropies."""
    e = _row_entropies(batch.probs)
    return float((_signs(batch.probs, batch.labels) * e).sum())


def accuracy(batch: PredictionBatch) -> float:
    """Fraction of rows whose argmax matches the label."""
    return float((_signs(batch.probs, batch.labels) > 0).mean())


def evaluate(graph: ValidatedGraph, params, batch, step: int, split: str) -> MetricPoint:
    """Run the graph on a labeled batch and score both metrics at `step`."""
    values = forward(graph, params, batch.images)
    pb = PredictionBatch(values[graph.spec.output], batch.labels)
    return MetricPoint(
        step=step,
        split=split,
        accuracy=accuracy(pb),
        infoacc=information_accuracy(pb),
        batch_size=pb.size,
    )


def chip_rating(infoacc: float) -> str:
    """One-decimal bits badge, e.g. "2.6 bits".

    Rounds half away from zero; negative values keep their sign, except
    exact-zero results which display as "0.0 bits".
    """
    scaled = math.floor(abs(infoacc) * 10.0 + 0.5) / 10.0
    value = math.copysign(scaled, infoacc) if scaled != 0.0 else 0.0
    return f"{value:.1f} bits"


CSV_HEADER = "step,split,batch_size,accuracy,infoacc"


def export_csv(points) -> str:
    """Metric points as CSV text, 6 decimal places, rows in input order."""
    lines = [CSV_HEADER]
    for p in points:
        lines.append(f"{p.step},{p.split},{p.batch_size},{p.accuracy:.6f},{p.infoacc:.6f}")
    return "\n".join(lines) + "\n"
