"""Stepwise training driver shared by the CLI, the arena and the service.

A TrainingSession owns one graph's parameters and advances them through
SGD in resumable chunks. Every source of randomness is pinned by the
config seed (init and batch order use independent derived streams), so
two sessions built from the same graph/config/dataset produce identical
parameter trajectories and identical metric streams, regardless of how
the steps are chunked across run_steps calls.
"""

from __future__ import annotations

from .data import Dataset, batch_iter
from .engine import GraphDataError, TrainConfig, init_params, loss_and_grads, sgd_step
from .graph import ValidatedGraph
from .metrics import MetricPoint, evaluate


class TrainingSession:
    """Single-writer training loop with periodic eval-split metric points.

    Evaluation happens after step i whenever i is a multiple of
    config.eval_interval, on the first eval_batch_size rows of the test
    split (clamped to the split size). The recorded points list is
    append-only; snapshot() returns a copy safe to hand across threads.
    """

    def __init__(self, graph: ValidatedGraph, config: TrainConfig, dataset: Dataset):
        if len(graph.spec.inputs) != 1:
            raise GraphDataError("training requires a graph with exactly one input")
        want = graph.spec.inputs[0].shape
        if want.rank != 2 or (want.dims[1] not in (None, dataset.dim)):
            raise GraphDataError(
                f"graph input {want} does not accept {dataset.dim}-dimensional rows"
            )
        self.graph = graph
        self.config = config
        self.dataset = dataset
        self.params = init_params(graph, config.seed)
        self.step = 0
        self.last_loss: float | None = None
        self._batches = batch_iter(dataset.train, config.batch_size, config.seed)
        self._eval_batch = dataset.test.take(config.eval_batch_size)
        self._points: list[MetricPoint] = []

    @property
    def finished(self) -> bool:
        return self.step >= self.config.steps

    def snapshot(self) -> list[MetricPoint]:
        return list(self._points)

    def latest_point(self) -> MetricPoint | None:
        return self._points[-1] if self._points else None

    def run_steps(self, n: int) -> int:
        """Advance up to n steps (clamped at the configured total).

        Returns the number of steps actually executed.
        """
        n = min(n, self.config.steps - self.step)
        for _ in range(n):
            batch = next(self._batches)
            loss, grads = loss_and_grads(self.graph, self.params, batch.images, batch.labels)
            self.params = sgd_step(self.params, grads, self.config.learning_rate)
            self.step += 1
            self.last_loss = loss
            if self.step % self.config.eval_interval == 0:
                self._points.append(
                    evaluate(self.graph, self.params, self._eval_batch, self.step, "eval")
                )
        return n

    def run_all(self) -> None:
        self.run_steps(self.config.steps - self.step)

    def final_eval(self) -> MetricPoint:
        """Score the current parameters on the full test split."""
        return evaluate(self.graph, self.params, self.dataset.test, self.step, "eval")
