"""graphforge: trainable dataflow graphs as a competitive game.

Author graphs in a small DSL, train them with a deterministic SGD
engine, score them in bits with the information-accuracy metric, size
them with compression and PageRank measures, and battle them under
identical budgets — headless via the CLI or over the HTTP service.
"""

from .graph import (
    GraphError,
    GraphSpec,
    InputDecl,
    LossDecl,
    NodeDecl,
    OpKind,
    ParamDecl,
    Shape,
    ValidatedGraph,
    ValidationFailure,
    WILDCARD,
    infer_shapes,
    node_count,
    validate,
)
from .dsl import ParseError, ParseFailure, canonical_serialize, parse, parse_bytes, serialize
from .engine import (
    GraphDataError,
    NumericOverflowError,
    TrainConfig,
    forward,
    grad_check,
    init_params,
    loss_and_grads,
    sgd_step,
)
from .metrics import (
    ContractViolation,
    MetricPoint,
    PredictionBatch,
    accuracy,
    chip_rating,
    entropy_bits,
    evaluate,
    export_csv,
    information_accuracy,
    information_accuracy_sum,
    prediction_sign,
)
from .data import (
    DataError,
    Dataset,
    IdxFormatError,
    LabeledBatch,
    batch_iter,
    load_idx_batch,
    load_idx_images,
    load_idx_labels,
    split_80_20,
    synthetic_blobs,
)
from .complexity import ComplexityReport, build_report, compressed_bits, description_bits, ncd, pagerank
from .arena import BattleConfig, BattleResult, compare_finals, run_battle
from .training import TrainingSession

__version__ = "0.1.0"
