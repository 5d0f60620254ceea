import math
import random

import numpy as np
import pytest

from graphforge import (
    GraphDataError,
    NumericOverflowError,
    TrainConfig,
    forward,
    grad_check,
    init_params,
    loss_and_grads,
    parse,
    sgd_step,
    validate,
)
from graphforge.engine import glorot_bound
from graphforge.rng import SplitMix64, derive_seed, uniform_array

from genspec import random_spec


def _binary_batch(seed, m, d, n):
    """0/1 pixel rows keep every nonzero gradient coordinate well above
    the central-difference noise floor (see grad-check tests)."""
    x = (uniform_array(seed, m * d).reshape(m, d) > 0.5).astype(np.float64)
    picks = SplitMix64(derive_seed(seed, "labels"))
    y = np.zeros((m, n))
    y[np.arange(m), [picks.next_below(n) for _ in range(m)]] = 1.0
    return x, y


class TestTrainConfig:
    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            TrainConfig(0, 0.1, 10, 1, 1, 10)
        with pytest.raises(ValueError):
            TrainConfig(10, -0.1, 10, 1, 1, 10)

    def test_eval_interval_bounded_by_steps(self):
        with pytest.raises(ValueError):
            TrainConfig(10, 0.1, 10, 1, 20, 10)


class TestInitParams:
    def test_zeros(self, mnist_softmax_graph):
        params = init_params(mnist_softmax_graph, 0)
        assert not params["b"].any()

    def test_glorot_bound_value(self, mnist_softmax_graph):
        r = glorot_bound(mnist_softmax_graph.spec.params[0].shape)
        assert r == pytest.approx(math.sqrt(6 / 794))
        assert r == pytest.approx(0.08692, abs=1e-5)
        w = init_params(mnist_softmax_graph, 123)["W"]
        assert w.min() >= -r and w.max() <= r
        assert w.std() > r / 4  # actually spread out, not collapsed

    def test_same_seed_bitwise_identical(self, mlp_graph):
        a = init_params(mlp_graph, 7)
        b = init_params(mlp_graph, 7)
        assert all(np.array_equal(a[k], b[k]) for k in a)

    def test_different_seeds_differ(self, mnist_softmax_graph):
        a = init_params(mnist_softmax_graph, 1)
        b = init_params(mnist_softmax_graph, 2)
        assert not np.array_equal(a["W"], b["W"])


class TestForward:
    def test_softmax_symmetry(self):
        g = validate(parse('graph "s" { input x: [?,2]; node p = softmax(x); output p; loss cross_entropy(p); }'))
        out = forward(g, {}, np.array([[0.0, 0.0]]))
        assert out["p"][0] == pytest.approx([0.5, 0.5], abs=1e-12)

    def test_softmax_ln2(self):
        g = validate(parse('graph "s" { input x: [?,2]; node p = softmax(x); output p; loss cross_entropy(p); }'))
        out = forward(g, {}, np.array([[math.log(2), 0.0]]))
        assert out["p"][0] == pytest.approx([2 / 3, 1 / 3], abs=1e-12)

    def test_matmul_identity(self):
        src = 'graph "m" { input x: [?,2]; param I: [2,2] init=zeros; node y = matmul(x, I); node p = softmax(y); output p; loss cross_entropy(p); }'
        g = validate(parse(src))
        out = forward(g, {"I": np.eye(2)}, np.array([[1.0, 2.0]]))
        assert out["y"][0] == pytest.approx([1.0, 2.0], abs=0)

    def test_softmax_rows_sum_to_one(self, mnist_softmax_graph):
        params = init_params(mnist_softmax_graph, 3)
        x = uniform_array(9, 32 * 784).reshape(32, 784)
        out = forward(mnist_softmax_graph, params, x)
        assert np.abs(out["probs"].sum(axis=1) - 1.0).max() < 1e-9
        assert out["probs"].min() >= 0.0

    def test_deterministic(self, mnist_softmax_graph):
        params = init_params(mnist_softmax_graph, 3)
        x = uniform_array(9, 4 * 784).reshape(4, 784)
        a = forward(mnist_softmax_graph, params, x)
        b = forward(mnist_softmax_graph, params, x)
        assert all(np.array_equal(a[k], b[k]) for k in a)

    def test_shape_mismatch_at_bind(self, mnist_softmax_graph):
        with pytest.raises(GraphDataError):
            forward(mnist_softmax_graph, init_params(mnist_softmax_graph, 0), np.zeros((4, 783)))

    def test_overflow_detected(self, mnist_softmax_graph):
        params = init_params(mnist_softmax_graph, 0)
        params["W"] = params["W"] + 1e308
        with pytest.raises(NumericOverflowError):
            forward(mnist_softmax_graph, params, np.ones((2, 784)))


class TestLossAndGrads:
    def test_perfect_prediction_zero_loss_zero_gradient(self):
        src = (
            'graph "s" { input x: [?,2]; param W: [2,2] init=zeros; '
            "node y = matmul(x, W); node p = softmax(y); output p; loss cross_entropy(p); }"
        )
        g = validate(parse(src))
        # identity weights scaled so softmax is numerically one-hot
        x = np.array([[800.0, 0.0]])
        y = np.array([[1.0, 0.0]])
        loss, grads = loss_and_grads(g, {"W": np.eye(2)}, x, y)
        assert loss == pytest.approx(0.0, abs=1e-12)
        assert np.abs(grads["W"]).max() == pytest.approx(0.0, abs=1e-12)

    def test_ln2_anchor(self):
        src = 'graph "s" { input x: [?,2]; node p = softmax(x); output p; loss cross_entropy(p); }'
        g = validate(parse(src))
        loss, _ = loss_and_grads(g, {}, np.array([[0.0, 0.0]]), np.array([[1.0, 0.0]]))
        assert loss == pytest.approx(math.log(2), rel=1e-12)

    def test_zero_init_logits_gradient_is_uniform_minus_labels(self, mnist_softmax_graph):
        spec = mnist_softmax_graph
        params = {"W": np.zeros((784, 10)), "b": np.zeros(10)}
        x, y = _binary_batch(5, 4, 784, 10)
        _, grads = loss_and_grads(spec, params, x, y)
        # d loss / d b equals column sums of (uniform - y)/m
        expected = (np.full((4, 10), 0.1) - y).sum(axis=0) / 4
        assert grads["b"] == pytest.approx(expected, abs=1e-12)

    def test_relu_masks_gradient(self):
        src = (
            'graph "r" { input x: [?,2]; param W: [2,2] init=zeros; '
            'node h = relu(x); node y = matmul(h, W); node p = softmax(y); '
            "output p; loss cross_entropy(p); }"
        )
        g = validate(parse(src))
        x = np.array([[-1.0, 2.0]])
        y = np.array([[1.0, 0.0]])
        _, grads = loss_and_grads(g, {"W": np.zeros((2, 2))}, x, y)
        # relu kills the negative coordinate: first row of dW is zero
        assert not grads["W"][0].any()
        assert grads["W"][1].any()

    def test_unreached_param_gets_zero_grads(self):
        src = (
            'graph "u" { input x: [?,2]; param W: [2,2] init=glorot; param dead: [2,2] init=glorot; '
            'node y = matmul(x, W); node p = softmax(y); node z = matmul(x, dead); '
            "output p; loss cross_entropy(p); }"
        )
        g = validate(parse(src))
        params = init_params(g, 0)
        _, grads = loss_and_grads(g, params, np.array([[1.0, 2.0]]), np.array([[0.0, 1.0]]))
        assert grads["dead"].shape == (2, 2) and not grads["dead"].any()


class TestSgdStep:
    def test_zero_lr_is_identity(self):
        params = {"w": np.array([1.0, 2.0])}
        grads = {"w": np.array([3.0, 4.0])}
        out = sgd_step(params, grads, 0.0)
        assert np.array_equal(out["w"], params["w"])

    def test_point_update(self):
        out = sgd_step({"w": np.array([1.0])}, {"w": np.array([0.5])}, 0.5)
        assert out["w"][0] == pytest.approx(0.75)

    def test_two_steps_equal_double_lr(self):
        params = {"w": np.array([1.0, -2.0])}
        grads = {"w": np.array([0.3, 0.7])}
        twice = sgd_step(sgd_step(params, grads, 0.1), grads, 0.1)
        once = sgd_step(params, grads, 0.2)
        assert twice["w"] == pytest.approx(once["w"], abs=1e-15)

    def test_does_not_mutate_inputs(self):
        params = {"w": np.array([1.0])}
        sgd_step(params, {"w": np.array([1.0])}, 1.0)
        assert params["w"][0] == 1.0


class TestGradCheck:
    def test_softmax_regression(self, mnist_softmax_graph):
        x, y = _binary_batch(1, 4, 784, 10)
        err = grad_check(mnist_softmax_graph, init_params(mnist_softmax_graph, 1), x, y)
        assert err <= 1e-6

    @pytest.mark.parametrize("seed", [1, 2, 3, 4, 5, 6, 7, 8, 9])
    def test_random_small_graphs(self, seed):
        rnd = random.Random(seed)
        g = validate(random_spec(rnd))
        d = g.spec.inputs[0].shape.dims[1]
        n = g.shapes[g.spec.output].dims[1]
        x, y = _binary_batch(seed + 100, 3, d, n)
        err = grad_check(g, init_params(g, seed), x, y)
        assert err <= 1e-6

    def test_intermediate_softmax_uses_full_jacobian(self):
        """A softmax that is not the loss target goes through the general
        backward rule, not the fused shortcut."""
        src = (
            'graph "mid" { input x: [?,6]; param W1: [6,5] init=glorot; '
            "node h = matmul(x, W1); node s = softmax(h); "
            "param W2: [5,4] init=glorot; node logits = matmul(s, W2); "
            "node probs = softmax(logits); output probs; loss cross_entropy(probs); }"
        )
        g = validate(parse(src))
        x, y = _binary_batch(31, 3, 6, 4)
        err = grad_check(g, init_params(g, 31), x, y)
        assert err <= 1e-6


def test_training_loss_mostly_decreases_on_fixed_batch(blobs_softmax_graph):
    from graphforge import synthetic_blobs

    ds = synthetic_blobs(10, 64, 20, seed=3)
    g = blobs_softmax_graph
    params = init_params(g, 0)
    x, y = ds.train.images[:100], ds.train.labels[:100]
    losses = []
    for _ in range(11):
        loss, grads = loss_and_grads(g, params, x, y)
        losses.append(loss)
        params = sgd_step(params, grads, 1e-3)
    drops = sum(1 for a, b in zip(losses, losses[1:]) if b > a)
    assert drops <= 1  # smoke property: allow one non-monotone step
