#!/usr/bin/env python3
"""
SGDM 训练与推理

每轮打乱小批次; 学习率在 lr_drop_epoch 轮之后乘以 lr_drop_factor;
L2 只作用于权重。返回最后一轮的模型 (不做早停), 每轮记录验证准确率。
"""

import logging
import math
import time
from dataclasses import asdict, dataclass, field, replace
from typing import List, Optional, Tuple, Union

import numpy as np
from tqdm import tqdm

from loralab import config
from loralab.errors import DomainError, NotFittedError, TrainingDivergedError
from loralab.nn import layers
from loralab.nn.network import Network, NetworkSpec
from loralab.utils.rng import split_seed, make_rng

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainingConfig:
    """训练选项, 未设置时取 config 中的默认值; lr_initial 为 None 时取网络描述中的值"""
    optimizer: str = 'sgdm'
    momentum: float = config.MOMENTUM
    epochs: int = config.EPOCHS
    lr_initial: Optional[float] = None
    lr_drop_epoch: int = config.LR_DROP_EPOCH
    lr_drop_factor: float = config.LR_DROP_FACTOR
    minibatch: int = config.MINIBATCH
    l2: float = config.L2_REGULARIZATION
    rng_seed: int = 0

    def __post_init__(self):
        if self.optimizer != 'sgdm':
            raise DomainError("只支持 SGDM 优化器")
        if self.epochs <= 0 or self.minibatch <= 0 or self.lr_drop_epoch <= 0:
            raise DomainError("轮数、批大小与降学习率周期必须为正")

    def learning_rate_at(self, epoch: int, lr_initial: float) -> float:
        """第 epoch 轮 (从 1 开始计) 的学习率"""
        drops = (epoch - 1) // self.lr_drop_epoch
        return lr_initial * self.lr_drop_factor ** drops


@dataclass
class EpochRecord:
    epoch: int
    learning_rate: float
    loss: float
    train_accuracy: float
    val_accuracy: Optional[float] = None
    seconds: float = 0.0


@dataclass
class TrainingHistory:
    epochs: List[EpochRecord] = field(default_factory=list)
    train_seconds: float = 0.0

    @property
    def losses(self) -> List[float]:
        return [e.loss for e in self.epochs]

    def to_dict(self):
        return {'train_seconds': self.train_seconds,
                'epochs': [asdict(e) for e in self.epochs]}


@dataclass
class TrainedModel:
    """训练后的网络 (含批归一化运行统计量) 与训练记录"""
    network: Network
    history: TrainingHistory

    @property
    def spec(self) -> NetworkSpec:
        return self.network.spec


ModelLike = Union[Network, TrainedModel]


def _as_network(model: ModelLike) -> Network:
    return model.network if isinstance(model, TrainedModel) else model


def _accuracy(network: Network, x: np.ndarray, y: np.ndarray, batch_size: int) -> float:
    if x.shape[0] == 0:
        return float('nan')
    probs = network.predict_proba(x, batch_size=batch_size)
    return float(np.mean(np.argmax(probs, axis=1) == y))


def train(spec: NetworkSpec, data: Tuple[np.ndarray, np.ndarray], cfg: TrainingConfig,
          validation: Optional[Tuple[np.ndarray, np.ndarray]] = None,
          progress: bool = False) -> TrainedModel:
    """在 (features, labels) 上训练 spec 描述的网络

    随机流由 cfg.rng_seed 拆分为 初始化 / 打乱 / dropout 三路, 单线程下同种子结果逐位一致。
    """
    x, y = data
    x = np.asarray(x, dtype=layers.get_dtype())
    y = np.asarray(y, dtype=np.int64)
    if x.shape[0] == 0:
        raise DomainError("训练数据为空")
    if x.shape[0] != y.shape[0]:
        raise DomainError("特征与标签数量不一致")
    if x.shape[1:] != spec.input_shape:
        raise DomainError(f"特征形状 {x.shape[1:]} 与网络输入 {spec.input_shape} 不匹配")
    classes = spec.num_classes
    if np.any(y < 0) or np.any(y >= classes):
        raise DomainError(f"标签必须在 [0, {classes - 1}] 之间")

    init_seed, shuffle_seed, dropout_seed = split_seed(cfg.rng_seed, 3)
    network = Network(spec).init(make_rng(init_seed))
    shuffle_rng = make_rng(shuffle_seed)
    dropout_rng = make_rng(dropout_seed)
    lr_initial = cfg.lr_initial if cfg.lr_initial is not None else spec.lr_initial
    velocities = [{name: np.zeros_like(p) for name, p in group.items()}
                  for group in network.params]

    history = TrainingHistory()
    started = time.perf_counter()
    count = x.shape[0]
    epochs = tqdm(range(1, cfg.epochs + 1), desc=spec.name, disable=not progress)
    for epoch in epochs:
        epoch_start = time.perf_counter()
        lr = cfg.learning_rate_at(epoch, lr_initial)
        order = shuffle_rng.permutation(count)
        loss_sum = 0.0
        correct = 0
        for first in range(0, count, cfg.minibatch):
            batch = order[first:first + cfg.minibatch]
            logits = network.forward(x[batch], mode='train', rng=dropout_rng)
            loss, probs, dlogits = layers.softmax_cross_entropy(logits, y[batch])
            if not math.isfinite(loss):
                raise TrainingDivergedError(epoch, loss)
            grads = network.backward(dlogits.astype(x.dtype, copy=False))
            for index, group in enumerate(network.params):
                for name, param in group.items():
                    l2 = cfg.l2 if Network.is_decayed(name) else 0.0
                    layers.sgdm_step(param, grads[index][name], velocities[index][name],
                                     lr, cfg.momentum, l2)
            loss_sum += loss * batch.size
            correct += int(np.sum(np.argmax(probs, axis=1) == y[batch]))

        record = EpochRecord(epoch=epoch, learning_rate=lr, loss=loss_sum / count,
                             train_accuracy=correct / count)
        if validation is not None:
            vx, vy = validation
            record.val_accuracy = _accuracy(network, np.asarray(vx, dtype=x.dtype),
                                            np.asarray(vy), cfg.minibatch)
        record.seconds = time.perf_counter() - epoch_start
        history.epochs.append(record)
        logger.info("%s 第 %d/%d 轮: lr=%.3g loss=%.4f train_acc=%.4f val_acc=%s",
                    spec.name, epoch, cfg.epochs, lr, record.loss, record.train_accuracy,
                    'n/a' if record.val_accuracy is None else f"{record.val_accuracy:.4f}")

    history.train_seconds = time.perf_counter() - started
    network.trained = True
    return TrainedModel(network=network, history=history)


def predict(model: ModelLike, x: np.ndarray,
            batch_size: int = config.MINIBATCH) -> Tuple[np.ndarray, np.ndarray]:
    """返回 (类别序号, 概率矩阵); 接受单个样本 (H, W, C) 或批量"""
    network = _as_network(model)
    x = np.asarray(x, dtype=layers.get_dtype())
    single = x.shape == network.spec.input_shape
    if single:
        x = x[None]
    if not network.has_statistics:
        raise NotFittedError(f"网络 {network.spec.name} 尚未训练")
    probs = network.predict_proba(x, batch_size=batch_size)
    classes = np.argmax(probs, axis=1)
    if single:
        return classes[0], probs[0]
    return classes, probs


def with_overrides(cfg: TrainingConfig, **overrides) -> TrainingConfig:
    """忽略值为 None 的覆盖项"""
    return replace(cfg, **{k: v for k, v in overrides.items() if v is not None})
