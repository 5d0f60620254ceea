"""Head-to-head battles: two graphs, one budget, a deterministic winner.

Both contenders train from the same seed and see the identical batch
sequence, so the only difference between their runs is the architecture
itself. Finals are scored on the full test split; the winner is decided
by accuracy, then information accuracy, with exact-equality ties (under
shared determinism a near-tie is a real difference).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

from .data import Dataset
from .engine import TrainConfig
from .graph import ValidatedGraph
from .metrics import MetricPoint
from .training import TrainingSession

DEFAULT_PRIORITY = ("accuracy", "infoacc")


@dataclass(frozen=True)
class BattleConfig:
    train_config: TrainConfig
    dataset_id: str = "synthetic"
    priority: tuple = DEFAULT_PRIORITY

    def __post_init__(self):
        for metric in self.priority:
            if metric not in ("accuracy", "infoacc"):
                raise ValueError(f"unknown metric '{metric}' in priority")


@dataclass(frozen=True)
class BattleResult:
    contender_a: str
    contender_b: str
    final_a: MetricPoint
    final_b: MetricPoint
    curve_a: tuple
    curve_b: tuple
    winner: str  # "A" | "B" | "draw"
    config: BattleConfig
    seed: int

    def to_dict(self) -> dict:
        return asdict(self)


def compare_finals(a: MetricPoint, b: MetricPoint, priority=DEFAULT_PRIORITY) -> str:
    """Lexicographic comparison over the metric priority list."""
    for metric in priority:
        va, vb = getattr(a, metric), getattr(b, metric)
        if va > vb:
            return "A"
        if vb > va:
            return "B"
    return "draw"


def run_battle(
    spec_a: ValidatedGraph,
    spec_b: ValidatedGraph,
    dataset: Dataset,
    config: BattleConfig,
) -> BattleResult:
    """Train both contenders under the shared budget and pick the winner.

    Deterministic: rerunning with the same specs, dataset and config
    reproduces the result bit for bit.
    """
    curves = []
    finals = []
    for graph in (spec_a, spec_b):
        session = TrainingSession(graph, config.train_config, dataset)
        session.run_all()
        curves.append(tuple(session.snapshot()))
        finals.append(session.final_eval())
    return BattleResult(
        contender_a=spec_a.spec.name,
        contender_b=spec_b.spec.name,
        final_a=finals[0],
        final_b=finals[1],
        curve_a=curves[0],
        curve_b=curves[1],
        winner=compare_finals(finals[0], finals[1], config.priority),
        config=config,
        seed=config.train_config.seed,
    )
