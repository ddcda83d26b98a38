#!/usr/bin/env python3
"""
CNN 层的前向/反向计算

张量布局为 (batch, height, width, channels)。每个 *_forward 返回 (out, cache),
对应的 *_backward 接收上游梯度与 cache。卷积为互相关 (不翻转卷积核), 步长 1,
'same' 零填充; 实现方式是对卷积核的每个偏移做一次矩阵乘法并累加。

默认以 float32 存储; precision('float64') 上下文切换引擎精度, 供梯度检查使用。
"""

import contextlib
from typing import Iterator, Optional, Tuple

import numpy as np

from loralab import config
from loralab.errors import DomainError, NotFittedError

Tensor = np.ndarray

_DTYPE = np.dtype(np.float32)


def get_dtype() -> np.dtype:
    return _DTYPE


@contextlib.contextmanager
def precision(name: str) -> Iterator[np.dtype]:
    """临时切换引擎精度 ('float32' / 'float64')"""
    global _DTYPE
    if name not in ('float32', 'float64'):
        raise DomainError(f"不支持的精度: {name}")
    previous = _DTYPE
    _DTYPE = np.dtype(name)
    try:
        yield _DTYPE
    finally:
        _DTYPE = previous


def same_padding(kernel: int) -> Tuple[int, int]:
    """'same' 填充的 (前, 后) 长度"""
    before = (kernel - 1) // 2
    return before, kernel - 1 - before


# -------------------- 卷积 --------------------

def conv_forward(x: Tensor, w: Tensor, b: Tensor) -> Tuple[Tensor, tuple]:
    """x: (B, H, W, C), w: (kh, kw, C, F), b: (F,) -> (B, H, W, F)"""
    if x.ndim != 4 or w.ndim != 4:
        raise DomainError("卷积输入与卷积核都必须是四维")
    if x.shape[3] != w.shape[2]:
        raise DomainError(f"输入通道 {x.shape[3]} 与卷积核通道 {w.shape[2]} 不匹配")
    if b.shape != (w.shape[3],):
        raise DomainError("偏置长度必须等于滤波器个数")
    batch, height, width, _ = x.shape
    kh, kw, _, filters = w.shape
    ph, pw = same_padding(kh), same_padding(kw)
    xp = np.pad(x, ((0, 0), ph, pw, (0, 0)))
    out = np.zeros((batch, height, width, filters), dtype=np.result_type(x, w))
    for i in range(kh):
        for j in range(kw):
            out += xp[:, i:i + height, j:j + width, :] @ w[i, j]
    out += b
    return out, (xp, w, x.shape)


def conv_backward(dout: Tensor, cache: tuple) -> Tuple[Tensor, Tensor, Tensor]:
    """返回 (dx, dw, db)"""
    xp, w, x_shape = cache
    _, height, width, channels = x_shape
    kh, kw, _, filters = w.shape
    ph, pw = same_padding(kh), same_padding(kw)
    dxp = np.zeros(xp.shape, dtype=np.result_type(dout, w))
    dw = np.zeros(w.shape, dtype=np.result_type(dout, xp))
    g = dout.reshape(-1, filters)
    for i in range(kh):
        for j in range(kw):
            window = xp[:, i:i + height, j:j + width, :]
            dw[i, j] = window.reshape(-1, channels).T @ g
            dxp[:, i:i + height, j:j + width, :] += dout @ w[i, j].T
    dx = dxp[:, ph[0]:ph[0] + height, pw[0]:pw[0] + width, :]
    db = dout.sum(axis=(0, 1, 2))
    return dx, dw, db


# -------------------- 批归一化 --------------------

class BatchNormState:
    """每通道的运行均值与方差; 训练前为空"""

    def __init__(self, channels: int):
        self.channels = channels
        self.running_mean: Optional[np.ndarray] = None
        self.running_var: Optional[np.ndarray] = None

    @property
    def ready(self) -> bool:
        return self.running_mean is not None

    def update(self, mean: np.ndarray, var: np.ndarray, decay: float) -> None:
        if not self.ready:
            # 第一批直接作为初值
            self.running_mean = mean.copy()
            self.running_var = var.copy()
        else:
            self.running_mean = decay * self.running_mean + (1 - decay) * mean
            self.running_var = decay * self.running_var + (1 - decay) * var


def batchnorm_forward(x: Tensor, gamma: Tensor, beta: Tensor, mode: str,
                      state: BatchNormState, eps: float = config.BN_EPSILON,
                      decay: float = config.BN_DECAY) -> Tuple[Tensor, Optional[tuple]]:
    """按通道归一化, 统计量取 (B, H, W) 三个维度"""
    channels = x.shape[-1]
    if gamma.shape != (channels,) or beta.shape != (channels,):
        raise DomainError("批归一化参数长度必须等于通道数")
    axes = tuple(range(x.ndim - 1))
    if mode == 'train':
        mean = x.mean(axis=axes)
        var = x.var(axis=axes)
        inv_std = 1.0 / np.sqrt(var + eps)
        xhat = (x - mean) * inv_std
        state.update(mean, var, decay)
        return gamma * xhat + beta, (xhat, gamma, inv_std)
    if mode == 'infer':
        if not state.ready:
            raise NotFittedError("批归一化尚无运行统计量")
        xhat = (x - state.running_mean) / np.sqrt(state.running_var + eps)
        return (gamma * xhat + beta).astype(x.dtype, copy=False), None
    raise DomainError(f"未知模式: {mode}")


def batchnorm_backward(dout: Tensor, cache: tuple) -> Tuple[Tensor, Tensor, Tensor]:
    """返回 (dx, dgamma, dbeta)"""
    xhat, gamma, inv_std = cache
    axes = tuple(range(dout.ndim - 1))
    count = dout.size // dout.shape[-1]
    dbeta = dout.sum(axis=axes)
    dgamma = (dout * xhat).sum(axis=axes)
    dxhat = dout * gamma
    dx = (inv_std / count) * (count * dxhat - dxhat.sum(axis=axes)
                              - xhat * (dxhat * xhat).sum(axis=axes))
    return dx, dgamma, dbeta


# -------------------- ReLU --------------------

def relu_forward(x: Tensor) -> Tuple[Tensor, Tensor]:
    mask = x > 0
    return x * mask, mask


def relu_backward(dout: Tensor, mask: Tensor) -> Tensor:
    return dout * mask


# -------------------- 最大池化 --------------------

def maxpool_forward(x: Tensor, pool: Tuple[int, int] = (2, 1)) -> Tuple[Tensor, tuple]:
    """不重叠窗口取最大; 平局时取窗口内第一个位置"""
    batch, height, width, channels = x.shape
    ph, pw = pool
    if height % ph or width % pw:
        raise DomainError(f"空间尺寸 {height}x{width} 不能被池化窗口 {ph}x{pw} 整除")
    blocks = x.reshape(batch, height // ph, ph, width // pw, pw, channels)
    blocks = blocks.transpose(0, 1, 3, 5, 2, 4).reshape(
        batch, height // ph, width // pw, channels, ph * pw)
    arg = np.argmax(blocks, axis=-1)
    out = np.take_along_axis(blocks, arg[..., None], axis=-1)[..., 0]
    return out, (arg, x.shape, pool)


def maxpool_backward(dout: Tensor, cache: tuple) -> Tensor:
    """梯度只回传到每个窗口的最大值位置"""
    arg, x_shape, (ph, pw) = cache
    batch, height, width, channels = x_shape
    blocks = np.zeros(dout.shape + (ph * pw,), dtype=dout.dtype)
    np.put_along_axis(blocks, arg[..., None], dout[..., None], axis=-1)
    blocks = blocks.reshape(batch, height // ph, width // pw, channels, ph, pw)
    return blocks.transpose(0, 1, 4, 2, 5, 3).reshape(x_shape)


# -------------------- Dropout --------------------

def dropout_forward(x: Tensor, rate: float, mode: str,
                    rng: Optional[np.random.Generator] = None) -> Tuple[Tensor, Optional[Tensor]]:
    """反向 dropout: 训练时以概率 rate 置零, 幸存者放大 1/(1-rate); 推理时恒等"""
    if not 0 <= rate < 1:
        raise DomainError(f"dropout 比例必须在 [0, 1) 之间, 得到 {rate}")
    if mode == 'infer' or rate == 0:
        return x, None
    if rng is None:
        raise DomainError("训练模式的 dropout 需要 rng")
    mask = (rng.random(x.shape) >= rate).astype(x.dtype) / (1 - rate)
    return x * mask, mask


def dropout_backward(dout: Tensor, mask: Optional[Tensor]) -> Tensor:
    return dout if mask is None else dout * mask


# -------------------- 全连接 + softmax 交叉熵 --------------------

def dense_forward(x: Tensor, w: Tensor, b: Tensor) -> Tuple[Tensor, tuple]:
    """展平后仿射变换, w: (D, units)"""
    flat = x.reshape(x.shape[0], -1)
    if flat.shape[1] != w.shape[0]:
        raise DomainError(f"全连接输入维度 {flat.shape[1]} 与权重 {w.shape[0]} 不匹配")
    return flat @ w + b, (flat, w, x.shape)


def dense_backward(dout: Tensor, cache: tuple) -> Tuple[Tensor, Tensor, Tensor]:
    flat, w, x_shape = cache
    dx = (dout @ w.T).reshape(x_shape)
    return dx, flat.T @ dout, dout.sum(axis=0)


def softmax(logits: Tensor) -> Tensor:
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


def softmax_cross_entropy(logits: Tensor, labels: np.ndarray) -> Tuple[float, Tensor, Tensor]:
    """返回 (批平均交叉熵, 概率, d loss / d logits)"""
    labels = np.asarray(labels)
    classes = logits.shape[1]
    if labels.shape != (logits.shape[0],):
        raise DomainError("标签个数必须等于批大小")
    if np.any(labels < 0) or np.any(labels >= classes):
        raise DomainError(f"标签必须在 [0, {classes - 1}] 之间")
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    probs = np.exp(log_probs)
    rows = np.arange(labels.size)
    loss = float(-log_probs[rows, labels].mean())
    dlogits = probs.copy()
    dlogits[rows, labels] -= 1
    dlogits /= labels.size
    return loss, probs, dlogits


def dense_softmax_xent(x: Tensor, w: Tensor, b: Tensor,
                       labels: np.ndarray) -> Tuple[float, Tensor]:
    """仿射 -> softmax -> 平均交叉熵"""
    logits, _ = dense_forward(x, w, b)
    loss, probs, _ = softmax_cross_entropy(logits, labels)
    return loss, probs


def dense_softmax_xent_backward(x: Tensor, w: Tensor, b: Tensor,
                                labels: np.ndarray) -> Tuple[Tensor, Tensor, Tensor]:
    """dense_softmax_xent 对 (x, w, b) 的梯度"""
    logits, cache = dense_forward(x, w, b)
    _, _, dlogits = softmax_cross_entropy(logits, labels)
    return dense_backward(dlogits, cache)


# -------------------- SGDM --------------------

def sgdm_step(param: Tensor, grad: Tensor, velocity: Tensor, lr: float,
              momentum: float = config.MOMENTUM, l2: float = 0.0) -> Tuple[Tensor, Tensor]:
    """v <- momentum*v - lr*(g + l2*w); w <- w + v

    l2 只应传给权重; 偏置与批归一化仿射参数调用时 l2=0。原地更新并返回 (param, velocity)。
    """
    if param.shape != grad.shape or param.shape != velocity.shape:
        raise DomainError("参数、梯度与动量形状必须一致")
    velocity *= momentum
    velocity -= lr * (grad + l2 * param)
    param += velocity
    return param, velocity
