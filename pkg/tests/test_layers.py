#!/usr/bin/env python3
"""
各层前向/反向: float64 下与中心差分比较
"""

import numpy as np
import numpy.testing as npt
import pytest

from loralab.errors import DomainError, NotFittedError
from loralab.nn import layers
from loralab.nn.layers import BatchNormState


def numeric_grad(f, x, eps=1e-6):
    """标量函数 f 对数组 x 的中心差分梯度 (原地扰动后恢复)"""
    grad = np.zeros_like(x)
    for idx in np.ndindex(x.shape):
        saved = x[idx]
        x[idx] = saved + eps
        plus = f()
        x[idx] = saved - eps
        minus = f()
        x[idx] = saved
        grad[idx] = (plus - minus) / (2 * eps)
    return grad


def _conv_case(rng):
    batch = int(rng.integers(1, 3))
    height = int(rng.integers(2, 7))
    width = int(rng.integers(1, 5))
    channels = int(rng.integers(1, 4))
    filters = int(rng.integers(1, 4))
    kh = int(rng.integers(1, 5))
    kw = int(rng.integers(1, 4))
    x = rng.standard_normal((batch, height, width, channels))
    w = rng.standard_normal((kh, kw, channels, filters))
    b = rng.standard_normal(filters)
    return x, w, b


@pytest.mark.parametrize("case", range(20))
def test_conv_gradients(case):
    rng = np.random.default_rng(1000 + case)
    x, w, b = _conv_case(rng)
    out, cache = layers.conv_forward(x, w, b)
    assert out.shape == x.shape[:3] + (w.shape[3],)
    g = rng.standard_normal(out.shape)
    dx, dw, db = layers.conv_backward(g, cache)

    def loss():
        return float(np.sum(layers.conv_forward(x, w, b)[0] * g))

    npt.assert_allclose(dx, numeric_grad(loss, x), rtol=1e-5, atol=1e-7)
    npt.assert_allclose(dw, numeric_grad(loss, w), rtol=1e-5, atol=1e-7)
    npt.assert_allclose(db, numeric_grad(loss, b), rtol=1e-5, atol=1e-7)


def test_conv_is_cross_correlation_with_same_padding():
    x = np.arange(5, dtype=float).reshape(1, 5, 1, 1)
    w = np.array([1.0, 0.0, -1.0]).reshape(3, 1, 1, 1)
    out, _ = layers.conv_forward(x, w, np.zeros(1))
    # out[h] = x[h-1] - x[h+1], 边界补零
    npt.assert_allclose(out.reshape(-1), [-1, -2, -2, -2, 3])


def test_even_kernel_padding():
    assert layers.same_padding(4) == (1, 2)
    assert layers.same_padding(19) == (9, 9)


def test_conv_channel_mismatch():
    with pytest.raises(DomainError):
        layers.conv_forward(np.zeros((1, 4, 1, 2)), np.zeros((3, 1, 1, 4)), np.zeros(4))


@pytest.mark.parametrize("case", range(5))
def test_batchnorm_gradients(case):
    rng = np.random.default_rng(2000 + case)
    x = rng.standard_normal((3, 4, 2, 3)) * 2 + 1
    gamma = rng.standard_normal(3)
    beta = rng.standard_normal(3)
    g = rng.standard_normal(x.shape)
    out, cache = layers.batchnorm_forward(x, gamma, beta, 'train', BatchNormState(3))
    dx, dgamma, dbeta = layers.batchnorm_backward(g, cache)

    def loss():
        y, _ = layers.batchnorm_forward(x, gamma, beta, 'train', BatchNormState(3))
        return float(np.sum(y * g))

    npt.assert_allclose(dx, numeric_grad(loss, x), rtol=1e-4, atol=1e-6)
    npt.assert_allclose(dgamma, numeric_grad(loss, gamma), rtol=1e-5, atol=1e-7)
    npt.assert_allclose(dbeta, numeric_grad(loss, beta), rtol=1e-5, atol=1e-7)


def test_batchnorm_running_statistics():
    state = BatchNormState(2)
    assert not state.ready
    x1 = np.ones((2, 2, 1, 2))
    layers.batchnorm_forward(x1, np.ones(2), np.zeros(2), 'train', state, decay=0.9)
    npt.assert_allclose(state.running_mean, [1.0, 1.0])
    npt.assert_allclose(state.running_var, [0.0, 0.0])
    layers.batchnorm_forward(3 * x1, np.ones(2), np.zeros(2), 'train', state, decay=0.9)
    npt.assert_allclose(state.running_mean, [1.2, 1.2])


def test_batchnorm_inference_needs_statistics():
    with pytest.raises(NotFittedError):
        layers.batchnorm_forward(np.zeros((1, 2, 1, 2)), np.ones(2), np.zeros(2), 'infer',
                                 BatchNormState(2))


def test_batchnorm_inference_uses_running_statistics():
    state = BatchNormState(1)
    state.running_mean = np.array([2.0])
    state.running_var = np.array([4.0])
    x = np.full((1, 1, 1, 1), 6.0)
    out, cache = layers.batchnorm_forward(x, np.array([1.0]), np.array([0.5]), 'infer', state,
                                          eps=0.0)
    assert cache is None
    assert out.item() == pytest.approx(2.5)


def test_relu_gradient():
    x = np.array([[-1.0, 0.5], [2.0, -0.1]])
    out, mask = layers.relu_forward(x)
    npt.assert_allclose(out, [[0, 0.5], [2.0, 0]])
    npt.assert_allclose(layers.relu_backward(np.ones_like(x), mask), [[0, 1], [1, 0]])


def test_maxpool_gradients():
    rng = np.random.default_rng(7)
    x = rng.standard_normal((2, 6, 2, 3))
    out, cache = layers.maxpool_forward(x, (2, 1))
    assert out.shape == (2, 3, 2, 3)
    g = rng.standard_normal(out.shape)
    dx = layers.maxpool_backward(g, cache)

    def loss():
        return float(np.sum(layers.maxpool_forward(x, (2, 1))[0] * g))

    npt.assert_allclose(dx, numeric_grad(loss, x), rtol=1e-6, atol=1e-8)


def test_maxpool_ties_go_to_first_position():
    x = np.array([1.0, 1.0, 3.0, 2.0]).reshape(1, 4, 1, 1)
    out, cache = layers.maxpool_forward(x, (2, 1))
    npt.assert_allclose(out.reshape(-1), [1.0, 3.0])
    dx = layers.maxpool_backward(np.array([5.0, 7.0]).reshape(1, 2, 1, 1), cache)
    npt.assert_allclose(dx.reshape(-1), [5.0, 0.0, 7.0, 0.0])


def test_maxpool_requires_divisible_height():
    with pytest.raises(DomainError):
        layers.maxpool_forward(np.zeros((1, 5, 1, 1)), (2, 1))


def test_dropout_modes():
    rng = np.random.default_rng(3)
    x = np.ones((1000, 10, 1, 1))
    same, mask = layers.dropout_forward(x, 0.3, 'infer')
    assert same is x and mask is None

    out, mask = layers.dropout_forward(x, 0.3, 'train', rng)
    values = set(np.unique(out).round(6))
    assert values <= {0.0, round(1 / 0.7, 6)}
    assert np.mean(out == 0) == pytest.approx(0.3, abs=0.03)
    npt.assert_allclose(layers.dropout_backward(np.ones_like(x), mask), out)


@pytest.mark.parametrize("rate", [0.24, 0.3])
def test_dropout_keep_fraction_and_scaling(rate):
    x = np.ones((10_000, 100, 1, 1))
    out, _ = layers.dropout_forward(x, rate, 'train', np.random.default_rng(8))
    assert np.mean(out != 0) == pytest.approx(1 - rate, abs=0.002)
    # 反向缩放后期望不变
    assert np.mean(out) == pytest.approx(1.0, abs=0.003)


def test_dropout_validation():
    with pytest.raises(DomainError):
        layers.dropout_forward(np.ones((1, 1, 1, 1)), 1.0, 'train', np.random.default_rng(0))
    with pytest.raises(DomainError):
        layers.dropout_forward(np.ones((1, 1, 1, 1)), 0.5, 'train')


def test_dense_softmax_xent_gradients():
    rng = np.random.default_rng(11)
    x = rng.standard_normal((4, 3, 1, 2))
    w = rng.standard_normal((6, 5)) * 0.5
    b = rng.standard_normal(5) * 0.1
    labels = np.array([0, 4, 2, 2])
    dx, dw, db = layers.dense_softmax_xent_backward(x, w, b, labels)

    def loss():
        return layers.dense_softmax_xent(x, w, b, labels)[0]

    npt.assert_allclose(dx, numeric_grad(loss, x), rtol=1e-5, atol=1e-8)
    npt.assert_allclose(dw, numeric_grad(loss, w), rtol=1e-5, atol=1e-8)
    npt.assert_allclose(db, numeric_grad(loss, b), rtol=1e-5, atol=1e-8)


def test_softmax_cross_entropy_values():
    logits = np.log(np.array([[0.25, 0.75], [0.5, 0.5]]))
    loss, probs, _ = layers.softmax_cross_entropy(logits, np.array([1, 0]))
    npt.assert_allclose(probs, [[0.25, 0.75], [0.5, 0.5]])
    assert loss == pytest.approx(-(np.log(0.75) + np.log(0.5)) / 2)
    npt.assert_allclose(layers.softmax(np.array([[1000.0, 1000.0]])), [[0.5, 0.5]])


def test_cross_entropy_label_range():
    with pytest.raises(DomainError):
        layers.softmax_cross_entropy(np.zeros((2, 3)), np.array([0, 3]))


def test_sgdm_step_values():
    param = np.array([1.0, -2.0])
    velocity = np.zeros(2)
    grad = np.array([0.5, 0.5])
    layers.sgdm_step(param, grad, velocity, lr=0.1, momentum=0.9, l2=0.01)
    npt.assert_allclose(velocity, [-0.051, -0.048])
    npt.assert_allclose(param, [0.949, -2.048])
    layers.sgdm_step(param, grad, velocity, lr=0.1, momentum=0.9)
    npt.assert_allclose(velocity, [0.9 * -0.051 - 0.05, 0.9 * -0.048 - 0.05])


def test_sgdm_shape_mismatch():
    with pytest.raises(DomainError):
        layers.sgdm_step(np.zeros(2), np.zeros(3), np.zeros(2), lr=0.1)


def test_precision_context_restores():
    assert layers.get_dtype() == np.float32
    with layers.precision('float64') as dtype:
        assert dtype == np.float64
        assert layers.get_dtype() == np.float64
    assert layers.get_dtype() == np.float32
    with pytest.raises(RuntimeError):
        with layers.precision('float64'):
            raise RuntimeError("boom")
    assert layers.get_dtype() == np.float32
    with pytest.raises(DomainError):
        with layers.precision('float16'):
            pass
