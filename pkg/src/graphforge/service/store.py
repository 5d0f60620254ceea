"""In-memory graph and session stores.

Graphs are append-only by id. Each session owns one lock: its step
executor is the single writer, metric reads take the lock just long
enough to copy a snapshot, so pollers never observe a torn point.
Nothing persists across restarts by design; export goes through the
CSV/DSL file formats.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field

from ..data import Dataset, load_idx_batch
from ..dsl import serialize
from ..engine import TrainConfig
from ..graph import ValidatedGraph
from ..metrics import MetricPoint
from ..training import TrainingSession

IDLE, RUNNING, FINISHED, FAILED = "idle", "running", "finished", "failed"


@dataclass(frozen=True)
class StoredGraph:
    id: str
    dsl: str
    graph: ValidatedGraph


class GraphStore:
    def __init__(self):
        self._lock = threading.Lock()
        self._items: dict[str, StoredGraph] = {}
        self._ids = itertools.count(1)

    def add(self, dsl: str, graph: ValidatedGraph) -> StoredGraph:
        with self._lock:
            gid = f"g{next(self._ids)}"
            stored = StoredGraph(id=gid, dsl=dsl, graph=graph)
            self._items[gid] = stored
            return stored

    def get(self, gid: str) -> StoredGraph | None:
        with self._lock:
            return self._items.get(gid)


class SessionStateError(RuntimeError):
    """Stepping a session that already finished or failed."""

    def __init__(self, state: str):
        super().__init__(f"session is {state}")
        self.state = state


class ServiceSession:
    """One training session with locked, single-writer stepping."""

    def __init__(self, sid: str, graph_id: str, graph: ValidatedGraph, config: TrainConfig, dataset: Dataset):
        self.id = sid
        self.graph_id = graph_id
        self.state = IDLE
        self._lock = threading.Lock()
        self._runner = TrainingSession(graph, config, dataset)

    @property
    def step(self) -> int:
        return self._runner.step

    def run_steps(self, n: int) -> tuple[int, MetricPoint | None]:
        with self._lock:
            if self.state in (FINISHED, FAILED):
                raise SessionStateError(self.state)
            self.state = RUNNING
            try:
                self._runner.run_steps(n)
            except Exception:
                self.state = FAILED
                raise
            if self._runner.finished:
                self.state = FINISHED
            return self._runner.step, self._runner.latest_point()

    def metrics_since(self, since_step: int) -> list[MetricPoint]:
        with self._lock:
            return [p for p in self._runner.snapshot() if p.step > since_step]


class SessionStore:
    def __init__(self):
        self._lock = threading.Lock()
        self._items: dict[str, ServiceSession] = {}
        self._ids = itertools.count(1)

    def add(self, graph_id: str, graph: ValidatedGraph, config: TrainConfig, dataset: Dataset) -> ServiceSession:
        with self._lock:
            sid = f"s{next(self._ids)}"
            session = ServiceSession(sid, graph_id, graph, config, dataset)
            self._items[sid] = session
            return session

    def get(self, sid: str) -> ServiceSession | None:
        with self._lock:
            return self._items.get(sid)


def build_dataset(spec) -> Dataset:
    """Materialize a dataset from its wire description."""
    from ..data import synthetic_blobs

    if spec.kind == "synthetic":
        return synthetic_blobs(
            n_classes=spec.n_classes,
            dim=spec.dim,
            m_per_class=spec.m_per_class,
            seed=spec.seed,
            spread=spec.spread,
        )
    train = load_idx_batch(spec.train_images, spec.train_labels, spec.n_classes)
    test = load_idx_batch(spec.test_images, spec.test_labels, spec.n_classes)
    return Dataset(train=train, test=test, n_classes=spec.n_classes, dim=train.images.shape[1])


def dataset_id(spec) -> str:
    if spec.kind == "synthetic":
        return (
            f"synthetic:n={spec.n_classes},dim={spec.dim},m={spec.m_per_class},"
            f"seed={spec.seed},spread={spec.spread}"
        )
    return f"idx:{spec.train_images}"
