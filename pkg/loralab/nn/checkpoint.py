#!/usr/bin/env python3
"""
模型检查点 (二进制, 小端)

    偏移  长度  内容
    0     4     魔数 b"LCKP"
    4     2     版本号 (uint16) = 1
    6     1     模态标记 (0=IQ, 1=STFT, 2=FFT, 255=无)
    7     1     标志位 (bit0 = 已训练)
    8     4     网络描述 JSON 字节数 n (uint32)
    12    n     网络描述 JSON (UTF-8)
    ...         各层参数, 按层声明顺序、层内按参数名排序, float32
    ...         每个批归一化层: 1 字节有无统计量, 随后 running_mean 与 running_var (float32)
"""

import json
import struct
from typing import Union

import numpy as np

from loralab.errors import FormatError
from loralab.nn.network import Network, NetworkSpec
from loralab.nn.trainer import TrainedModel

MAGIC = b"LCKP"
VERSION = 1
MODALITY_TAGS = {'iq': 0, 'stft': 1, 'fft': 2, None: 255}
_HEADER = struct.Struct('<4sHBBI')


def _to_bytes(array: np.ndarray) -> bytes:
    return np.ascontiguousarray(array, dtype='<f4').tobytes()


def serialize(model: Union[Network, TrainedModel]) -> bytes:
    network = model.network if isinstance(model, TrainedModel) else model
    spec_json = json.dumps(network.spec.to_dict(), sort_keys=True).encode('utf-8')
    tag = MODALITY_TAGS.get(network.spec.modality, 255)
    parts = [_HEADER.pack(MAGIC, VERSION, tag, 1 if network.trained else 0, len(spec_json)),
             spec_json]
    for _, _, array in network.named_parameters():
        parts.append(_to_bytes(array))
    for index in sorted(network.bn_states):
        state = network.bn_states[index]
        if state.ready:
            parts.append(b'\x01' + _to_bytes(state.running_mean) + _to_bytes(state.running_var))
        else:
            parts.append(b'\x00')
    return b''.join(parts)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.offset = 0

    def take(self, size: int, what: str) -> bytes:
        if self.offset + size > len(self.data):
            raise FormatError(f"检查点被截断: 读取{what}时数据不足", self.offset)
        chunk = self.data[self.offset:self.offset + size]
        self.offset += size
        return chunk

    def floats(self, shape, what: str) -> np.ndarray:
        count = int(np.prod(shape))
        raw = self.take(4 * count, what)
        return np.frombuffer(raw, dtype='<f4').astype(np.float32).reshape(shape)


def deserialize(data: bytes) -> Network:
    reader = _Reader(data)
    magic, version, tag, flags, spec_len = _HEADER.unpack(reader.take(_HEADER.size, '文件头'))
    if magic != MAGIC:
        raise FormatError(f"魔数错误: {magic!r}", 0)
    if version != VERSION:
        raise FormatError(f"不支持的检查点版本 {version}", 4)
    spec_offset = reader.offset
    try:
        spec = NetworkSpec.from_dict(json.loads(reader.take(spec_len, '网络描述').decode('utf-8')))
    except (ValueError, KeyError, TypeError) as e:
        raise FormatError(f"网络描述无法解析: {e}", spec_offset) from e
    if MODALITY_TAGS.get(spec.modality, 255) != tag:
        raise FormatError("模态标记与网络描述不一致", 6)

    network = Network(spec).init(np.random.default_rng(0))
    for index, name, array in network.named_parameters():
        network.params[index][name] = reader.floats(array.shape, f"第 {index + 1} 层参数 {name}")
    for index in sorted(network.bn_states):
        state = network.bn_states[index]
        present = reader.take(1, '统计量标志')
        if present == b'\x01':
            state.running_mean = reader.floats((state.channels,), '运行均值')
            state.running_var = reader.floats((state.channels,), '运行方差')
        elif present != b'\x00':
            raise FormatError("统计量标志非法", reader.offset - 1)
    if reader.offset != len(data):
        raise FormatError("检查点末尾有多余数据", reader.offset)
    network.trained = bool(flags & 1)
    return network


def save_model(model: Union[Network, TrainedModel], path: str) -> None:
    with open(path, 'wb') as f:
        f.write(serialize(model))


def load_model(path: str) -> Network:
    with open(path, 'rb') as f:
        return deserialize(f.read())
