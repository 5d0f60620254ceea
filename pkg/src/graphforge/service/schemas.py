"""Pydantic request/response models for the HTTP control plane.

Field names are the wire contract; metric points always carry
step/split/accuracy/infoacc/batch_size exactly as the CSV export does.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

from ..engine import TrainConfig
from ..metrics import MetricPoint


class ErrorItem(BaseModel):
    line: int
    col: int
    message: str
    category: str


class ErrorList(BaseModel):
    errors: list[ErrorItem]


class GraphCreateRequest(BaseModel):
    dsl: str


class GraphCreateResponse(BaseModel):
    id: str
    node_count: int
    # dims use null for the batch wildcard, e.g. [null, 784]
    shapes: dict[str, list[Optional[int]]]


class MetricPointModel(BaseModel):
    step: int
    split: str
    accuracy: float
    infoacc: float
    batch_size: int

    @classmethod
    def from_point(cls, p: MetricPoint) -> "MetricPointModel":
        return cls(step=p.step, split=p.split, accuracy=p.accuracy, infoacc=p.infoacc, batch_size=p.batch_size)


class ComplexityModel(BaseModel):
    description_bits: int
    compressed_bits: int
    node_count: int
    ncd_to_reference: Optional[float]
    pagerank: dict[str, float]
    compressor: str


class GraphGetResponse(BaseModel):
    dsl: str
    node_count: int
    complexity: ComplexityModel


class TrainConfigModel(BaseModel):
    batch_size: int = Field(ge=1)
    learning_rate: float = Field(gt=0)
    steps: int = Field(ge=1)
    seed: int = Field(ge=0)
    eval_interval: int = Field(ge=1)
    eval_batch_size: int = Field(ge=1)

    def to_config(self) -> TrainConfig:
        return TrainConfig(
            batch_size=self.batch_size,
            learning_rate=self.learning_rate,
            steps=self.steps,
            seed=self.seed,
            eval_interval=self.eval_interval,
            eval_batch_size=self.eval_batch_size,
        )


class SyntheticDataset(BaseModel):
    kind: Literal["synthetic"] = "synthetic"
    n_classes: int = 10
    dim: int = 64
    m_per_class: int = 100
    seed: int = 42
    spread: float = 0.15


class IdxDataset(BaseModel):
    kind: Literal["idx"] = "idx"
    train_images: str
    train_labels: str
    test_images: str
    test_labels: str
    n_classes: int = 10


DatasetSpec = SyntheticDataset | IdxDataset


class SessionCreateRequest(BaseModel):
    graph_id: str
    train_config: TrainConfigModel
    dataset: DatasetSpec = Field(discriminator="kind")


class SessionCreateResponse(BaseModel):
    session_id: str


class StepRequest(BaseModel):
    n: int = Field(ge=1, le=10_000)


class StepResponse(BaseModel):
    step: int
    latest: Optional[MetricPointModel]


class MetricsResponse(BaseModel):
    points: list[MetricPointModel]


class BattleConfigModel(BaseModel):
    train_config: TrainConfigModel
    dataset: DatasetSpec = Field(discriminator="kind")
    priority: tuple[str, ...] = ("accuracy", "infoacc")


class BattleRequest(BaseModel):
    graph_a: str
    graph_b: str
    config: BattleConfigModel


class BattleFinal(BaseModel):
    final: MetricPointModel
    curve: list[MetricPointModel]


class BattleResultModel(BaseModel):
    contender_a: str
    contender_b: str
    final_a: MetricPointModel
    final_b: MetricPointModel
    curve_a: list[MetricPointModel]
    curve_b: list[MetricPointModel]
    winner: str
    config: BattleConfigModel
    seed: int
