#!/usr/bin/env python3
"""
声明式网络描述与前向/反向执行

NetworkSpec 是层列表 + 输入形状; Network 持有参数、批归一化统计量并执行
前向与反向。最后的 softmax 层不参与反向 (由损失函数合并处理)。
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from loralab.errors import DomainError, NotFittedError
from loralab.nn import layers
from loralab.nn.layers import BatchNormState, Tensor

logger = logging.getLogger(__name__)

LAYER_KINDS = ('conv', 'batchnorm', 'relu', 'maxpool', 'dropout', 'dense', 'softmax')

Shape = Tuple[int, ...]


@dataclass(frozen=True)
class LayerSpec:
    """单层描述, 只有与 kind 相关的字段有意义"""
    kind: str
    filters: int = 0
    kernel: Tuple[int, int] = (1, 1)
    pool: Tuple[int, int] = (2, 1)
    rate: float = 0.0
    units: int = 0

    def __post_init__(self):
        if self.kind not in LAYER_KINDS:
            raise DomainError(f"未知层类型: {self.kind}")
        object.__setattr__(self, 'kernel', tuple(int(k) for k in self.kernel))
        object.__setattr__(self, 'pool', tuple(int(p) for p in self.pool))
        if self.kind == 'conv' and (self.filters <= 0 or min(self.kernel) <= 0):
            raise DomainError("卷积层的滤波器个数与尺寸必须为正")
        if self.kind == 'maxpool' and min(self.pool) <= 0:
            raise DomainError("池化窗口必须为正")
        if self.kind == 'dropout' and not 0 <= self.rate < 1:
            raise DomainError(f"dropout 比例必须在 [0, 1) 之间, 得到 {self.rate}")
        if self.kind == 'dense' and self.units <= 0:
            raise DomainError("全连接层输出单元数必须为正")

    def to_dict(self) -> Dict:
        data = {'kind': self.kind}
        if self.kind == 'conv':
            data.update(filters=self.filters, kernel=list(self.kernel))
        elif self.kind == 'maxpool':
            data['pool'] = list(self.pool)
        elif self.kind == 'dropout':
            data['rate'] = self.rate
        elif self.kind == 'dense':
            data['units'] = self.units
        return data

    @classmethod
    def from_dict(cls, data: Dict) -> 'LayerSpec':
        data = dict(data)
        for key in ('kernel', 'pool'):
            if key in data:
                data[key] = tuple(data[key])
        return cls(**data)


def conv(filters: int, kernel: Tuple[int, int]) -> LayerSpec:
    return LayerSpec('conv', filters=filters, kernel=kernel)


def batchnorm() -> LayerSpec:
    return LayerSpec('batchnorm')


def relu() -> LayerSpec:
    return LayerSpec('relu')


def maxpool(pool: Tuple[int, int] = (2, 1)) -> LayerSpec:
    return LayerSpec('maxpool', pool=pool)


def dropout(rate: float) -> LayerSpec:
    return LayerSpec('dropout', rate=rate)


def dense(units: int) -> LayerSpec:
    return LayerSpec('dense', units=units)


def softmax() -> LayerSpec:
    return LayerSpec('softmax')


@dataclass(frozen=True)
class NetworkSpec:
    """输入形状 (H, W, C) + 有序层列表"""
    name: str
    input_shape: Tuple[int, int, int]
    layers: Tuple[LayerSpec, ...]
    lr_initial: float = 0.01
    modality: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, 'input_shape', tuple(int(s) for s in self.input_shape))
        object.__setattr__(self, 'layers', tuple(self.layers))
        if len(self.input_shape) != 3 or min(self.input_shape) <= 0:
            raise DomainError(f"输入形状必须是正的 (H, W, C), 得到 {self.input_shape}")
        self.infer_shapes()

    def infer_shapes(self) -> List[Shape]:
        """逐层推断输出形状, 不匹配时抛出 DomainError"""
        shape: Shape = self.input_shape
        shapes: List[Shape] = []
        for index, layer in enumerate(self.layers):
            shape = _output_shape(layer, shape, index)
            shapes.append(shape)
        if self.layers and self.layers[-1].kind == 'softmax' and len(shapes) < 2:
            raise DomainError("softmax 之前必须有全连接层")
        return shapes

    @property
    def num_classes(self) -> int:
        return int(np.prod(self.infer_shapes()[-1]))

    @property
    def conv_depth(self) -> int:
        return sum(1 for layer in self.layers if layer.kind == 'conv')

    def to_dict(self) -> Dict:
        return {
            'name': self.name,
            'input_shape': list(self.input_shape),
            'layers': [layer.to_dict() for layer in self.layers],
            'lr_initial': self.lr_initial,
            'modality': self.modality,
        }

    @classmethod
    def from_dict(cls, data: Dict) -> 'NetworkSpec':
        return cls(name=data['name'], input_shape=tuple(data['input_shape']),
                   layers=tuple(LayerSpec.from_dict(item) for item in data['layers']),
                   lr_initial=float(data.get('lr_initial', 0.01)),
                   modality=data.get('modality'))


def _output_shape(layer: LayerSpec, shape: Shape, index: int) -> Shape:
    where = f"第 {index + 1} 层 ({layer.kind})"
    if layer.kind in ('conv', 'maxpool') and len(shape) != 3:
        raise DomainError(f"{where} 需要 (H, W, C) 输入, 得到 {shape}")
    if layer.kind == 'conv':
        return shape[0], shape[1], layer.filters
    if layer.kind == 'maxpool':
        ph, pw = layer.pool
        if shape[0] % ph or shape[1] % pw:
            raise DomainError(f"{where}: {shape[0]}x{shape[1]} 不能被 {ph}x{pw} 整除")
        return shape[0] // ph, shape[1] // pw, shape[2]
    if layer.kind == 'dense':
        return (layer.units,)
    if layer.kind == 'softmax' and len(shape) != 1:
        raise DomainError(f"{where} 必须跟在全连接层之后")
    return shape


class Network:
    """网络参数与执行"""

    def __init__(self, spec: NetworkSpec):
        self.spec = spec
        self.params: List[Dict[str, np.ndarray]] = [{} for _ in spec.layers]
        self.bn_states: Dict[int, BatchNormState] = {}
        self.trained = False
        self._caches: List = []
        shapes = [spec.input_shape] + spec.infer_shapes()
        self._in_shapes = shapes[:-1]
        for index, layer in enumerate(spec.layers):
            if layer.kind == 'batchnorm':
                self.bn_states[index] = BatchNormState(shapes[index][-1])

    # ---------- 初始化 ----------

    def init(self, rng: np.random.Generator) -> 'Network':
        """偏置置零; 卷积与全连接权重 ~ N(0, 2/fan_in); 批归一化 gamma=1, beta=0"""
        dtype = layers.get_dtype()
        for index, layer in enumerate(self.spec.layers):
            in_shape = self._in_shapes[index]
            if layer.kind == 'conv':
                kh, kw = layer.kernel
                fan_in = kh * kw * in_shape[-1]
                w = rng.normal(0.0, np.sqrt(2.0 / fan_in), (kh, kw, in_shape[-1], layer.filters))
                self.params[index] = {'w': w.astype(dtype),
                                      'b': np.zeros(layer.filters, dtype=dtype)}
            elif layer.kind == 'dense':
                fan_in = int(np.prod(in_shape))
                w = rng.normal(0.0, np.sqrt(2.0 / fan_in), (fan_in, layer.units))
                self.params[index] = {'w': w.astype(dtype),
                                      'b': np.zeros(layer.units, dtype=dtype)}
            elif layer.kind == 'batchnorm':
                channels = in_shape[-1]
                self.params[index] = {'gamma': np.ones(channels, dtype=dtype),
                                      'beta': np.zeros(channels, dtype=dtype)}
        self.bn_states = {i: BatchNormState(s.channels) for i, s in self.bn_states.items()}
        self.trained = False
        return self

    def parameter_count(self) -> int:
        return int(sum(p.size for group in self.params for p in group.values()))

    def layer_parameter_count(self, index: int) -> int:
        return int(sum(p.size for p in self.params[index].values()))

    @property
    def has_statistics(self) -> bool:
        return all(state.ready for state in self.bn_states.values())

    def warm_up(self, x: Tensor) -> None:
        """用一批样本做一次训练模式前向, 为随机初始化的网络建立批归一化统计量"""
        self.forward(x, mode='train', rng=np.random.default_rng(0))

    # ---------- 前向 / 反向 ----------

    def check_input(self, x: Tensor) -> Tensor:
        x = np.asarray(x)
        if x.shape[1:] != self.spec.input_shape:
            raise DomainError(f"输入形状应为 (batch, {self.spec.input_shape}), 得到 {x.shape}")
        return x

    def forward(self, x: Tensor, mode: str = 'infer',
                rng: Optional[np.random.Generator] = None) -> Tensor:
        """返回 softmax 之前的 logits; 训练模式下保存反向所需缓存"""
        out = self.check_input(x)
        if mode == 'infer' and not self.has_statistics:
            raise NotFittedError(f"网络 {self.spec.name} 的批归一化尚无统计量")
        caches = []
        for index, layer in enumerate(self.spec.layers):
            p = self.params[index]
            cache = None
            if layer.kind == 'conv':
                out, cache = layers.conv_forward(out, p['w'], p['b'])
            elif layer.kind == 'batchnorm':
                out, cache = layers.batchnorm_forward(out, p['gamma'], p['beta'], mode,
                                                      self.bn_states[index])
            elif layer.kind == 'relu':
                out, cache = layers.relu_forward(out)
            elif layer.kind == 'maxpool':
                out, cache = layers.maxpool_forward(out, layer.pool)
            elif layer.kind == 'dropout':
                out, cache = layers.dropout_forward(out, layer.rate, mode, rng)
            elif layer.kind == 'dense':
                out, cache = layers.dense_forward(out, p['w'], p['b'])
            caches.append(cache)
        self._caches = caches if mode == 'train' else []
        return out

    def backward(self, dlogits: Tensor) -> List[Dict[str, np.ndarray]]:
        """由 d loss / d logits 反向传播, 返回与 params 对齐的梯度"""
        if not self._caches:
            raise DomainError("反向传播前必须先做训练模式前向")
        grads: List[Dict[str, np.ndarray]] = [{} for _ in self.spec.layers]
        dout = dlogits
        for index in range(len(self.spec.layers) - 1, -1, -1):
            layer = self.spec.layers[index]
            cache = self._caches[index]
            if layer.kind == 'conv':
                dout, dw, db = layers.conv_backward(dout, cache)
                grads[index] = {'w': dw, 'b': db}
            elif layer.kind == 'batchnorm':
                dout, dgamma, dbeta = layers.batchnorm_backward(dout, cache)
                grads[index] = {'gamma': dgamma, 'beta': dbeta}
            elif layer.kind == 'relu':
                dout = layers.relu_backward(dout, cache)
            elif layer.kind == 'maxpool':
                dout = layers.maxpool_backward(dout, cache)
            elif layer.kind == 'dropout':
                dout = layers.dropout_backward(dout, cache)
            elif layer.kind == 'dense':
                dout, dw, db = layers.dense_backward(dout, cache)
                grads[index] = {'w': dw, 'b': db}
        self._caches = []
        return grads

    def predict_proba(self, x: Tensor, batch_size: int = 256) -> np.ndarray:
        """推理模式下的类别概率 (dropout 关闭, 批归一化用运行统计量)"""
        x = self.check_input(x)
        chunks = [layers.softmax(self.forward(x[i:i + batch_size], mode='infer'))
                  for i in range(0, x.shape[0], batch_size)]
        if not chunks:
            return np.zeros((0, self.spec.num_classes), dtype=layers.get_dtype())
        return np.concatenate(chunks, axis=0)

    # ---------- 参数遍历 ----------

    def named_parameters(self) -> List[Tuple[int, str, np.ndarray]]:
        """按声明顺序列出 (层序号, 参数名, 数组)"""
        items = []
        for index, group in enumerate(self.params):
            for name in sorted(group):
                items.append((index, name, group[name]))
        return items

    @staticmethod
    def is_decayed(name: str) -> bool:
        """L2 只作用于卷积与全连接权重"""
        return name == 'w'

    def summary(self) -> List[Dict]:
        rows = []
        for index, (layer, shape) in enumerate(zip(self.spec.layers, self.spec.infer_shapes())):
            row = layer.to_dict()
            row['output_shape'] = list(shape)
            row['parameters'] = self.layer_parameter_count(index)
            rows.append(row)
        return rows

