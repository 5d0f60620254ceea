import numpy as np
import pytest

from graphforge import GraphDataError, TrainConfig, TrainingSession, synthetic_blobs, validate, parse


@pytest.fixture()
def setup(blobs_softmax_graph):
    ds = synthetic_blobs(10, 64, 50, seed=5)
    cfg = TrainConfig(batch_size=40, learning_rate=0.5, steps=100, seed=5, eval_interval=10, eval_batch_size=50)
    return blobs_softmax_graph, cfg, ds


def test_points_appear_on_eval_interval(setup):
    g, cfg, ds = setup
    s = TrainingSession(g, cfg, ds)
    s.run_all()
    assert [p.step for p in s.snapshot()] == list(range(10, 101, 10))
    assert all(p.split == "eval" for p in s.snapshot())
    assert s.finished


def test_chunking_does_not_change_the_stream(setup):
    g, cfg, ds = setup
    whole = TrainingSession(g, cfg, ds)
    whole.run_all()
    chunked = TrainingSession(g, cfg, ds)
    while not chunked.finished:
        chunked.run_steps(7)
    assert whole.snapshot() == chunked.snapshot()
    assert all(np.array_equal(whole.params[k], chunked.params[k]) for k in whole.params)


def test_replay_is_identical(setup):
    g, cfg, ds = setup
    a = TrainingSession(g, cfg, ds)
    a.run_all()
    b = TrainingSession(g, cfg, ds)
    b.run_all()
    assert a.snapshot() == b.snapshot()
    assert a.final_eval() == b.final_eval()


def test_run_steps_clamps_at_total(setup):
    g, cfg, ds = setup
    s = TrainingSession(g, cfg, ds)
    assert s.run_steps(10_000) == cfg.steps
    assert s.run_steps(5) == 0


def test_learning_actually_happens(setup):
    g, cfg, ds = setup
    s = TrainingSession(g, cfg, ds)
    s.run_all()
    final = s.final_eval()
    assert final.accuracy > 0.9
    assert final.infoacc > 0.0  # separable data ends information-positive


def test_blob_pipeline_reaches_pinned_accuracy(blobs_softmax_graph):
    """Whole-pipeline check; observed 1.0 once, pinned with 0.03 slack."""
    ds = synthetic_blobs(n_classes=10, dim=64, m_per_class=100, seed=42, spread=0.15)
    cfg = TrainConfig(batch_size=100, learning_rate=0.5, steps=500, seed=42,
                      eval_interval=100, eval_batch_size=100)
    s = TrainingSession(blobs_softmax_graph, cfg, ds)
    s.run_all()
    assert s.final_eval().accuracy >= 0.97


def test_rejects_dimension_mismatch(mnist_softmax_graph):
    ds = synthetic_blobs(10, 64, 10, seed=0)
    cfg = TrainConfig(batch_size=8, learning_rate=0.1, steps=10, seed=0, eval_interval=10, eval_batch_size=8)
    with pytest.raises(GraphDataError):
        TrainingSession(mnist_softmax_graph, cfg, ds)


def test_rejects_multi_input_graph():
    g = validate(parse(
        'graph "two" { input x: [?,4]; input z: [?,4]; param W: [4,2] init=glorot; '
        "node y = matmul(x, W); node p = softmax(y); output p; loss cross_entropy(p); }"
    ))
    ds = synthetic_blobs(2, 4, 10, seed=0)
    cfg = TrainConfig(batch_size=4, learning_rate=0.1, steps=4, seed=0, eval_interval=4, eval_batch_size=4)
    with pytest.raises(GraphDataError):
        TrainingSession(g, cfg, ds)
