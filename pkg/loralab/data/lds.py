#!/usr/bin/env python3
"""
LDS1 数据集容器

小端布局:
    magic "LDS1" | 模态 u8 | 维数 u8 (=3) | 形状 3 x u32 | 记录数 u32
    | 标签元数 u32 | 回显长度 u32 | 生成参数回显 (UTF-8 key=value 文本)
    记录 x 记录数: 特征 f32[H*W*C] | 标签 u32 | inr_db f32 | sinr_db f32
                   | 干扰 SF i32 (0 = 无) | 时移 i32
旁边另写一份同名 .manifest 纯文本清单。
"""

import logging
import os
import struct
from typing import Iterable, Optional, Tuple, Union

import numpy as np

from loralab.core.phy import LoraParams
from loralab.data.generator import DatasetRecord, LoraDataset
from loralab.errors import DomainError, FormatError
from loralab.models.features import Modality, modality_shape
from loralab.utils.file_utils import ensure_directory

logger = logging.getLogger(__name__)

MAGIC = b"LDS1"
PREAMBLE = struct.Struct('<4sBB')
SHAPE = struct.Struct('<3I')
COUNTS = struct.Struct('<III')
HEADER_FIXED = PREAMBLE.size + SHAPE.size + COUNTS.size
# 标签 + inr + sinr + 干扰 SF + 时移
RECORD_OVERHEAD = 20
MODALITY_CODES = {Modality.IQ: 0, Modality.STFT: 1, Modality.FFT: 2}
CHUNK = 1024


def record_dtype(shape: Tuple[int, int, int]) -> np.dtype:
    return np.dtype([
        ('features', '<f4', tuple(shape)),
        ('label', '<u4'),
        ('inr_db', '<f4'),
        ('sinr_db', '<f4'),
        ('interferer_sf', '<i4'),
        ('offset', '<i4'),
    ])


def expected_file_size(shape: Tuple[int, int, int], count: int, echo_bytes: int) -> int:
    """头部 + count * (特征字节 + 每条固定开销)"""
    feature_bytes = 4 * int(np.prod(shape))
    return HEADER_FIXED + echo_bytes + count * (feature_bytes + RECORD_OVERHEAD)


def manifest_path(path: str) -> str:
    return path + '.manifest'


def _encode_header(modality: Modality, shape, count: int, label_arity: int,
                   echo: bytes) -> bytes:
    return (PREAMBLE.pack(MAGIC, MODALITY_CODES[modality], 3)
            + SHAPE.pack(*shape)
            + COUNTS.pack(count, label_arity, len(echo))
            + echo)


def _pack(items, dtype: np.dtype, label_arity: int) -> bytes:
    block = np.zeros(len(items), dtype=dtype)
    for i, record in enumerate(items):
        if not 0 <= record.label < label_arity:
            raise DomainError(f"标签 {record.label} 超出类别范围 [0, {label_arity})")
        block[i] = (record.features, record.label, record.meta.inr_db, record.meta.sinr_db,
                    record.meta.interferer_sf, record.meta.offset)
    return block.tobytes()


def save(records: Union[LoraDataset, Iterable[DatasetRecord]], path: str,
         modality: Optional[Modality] = None, label_arity: Optional[int] = None,
         spec_echo: str = '', params: LoraParams = LoraParams()) -> int:
    """写入 LDS1 文件, 返回记录数

    传入 LoraDataset 时模态/类别数/回显取自数据集; 传入记录流时逐块写出,
    结束后回填记录数。
    """
    if isinstance(records, LoraDataset):
        modality = records.modality
        label_arity = records.label_arity
        spec_echo = spec_echo or records.spec_echo
        records = iter(records)
    if modality is None or label_arity is None:
        raise DomainError("记录流需要显式给出 modality 与 label_arity")
    modality = Modality(modality)
    if label_arity <= 0:
        raise DomainError("label_arity 必须为正")
    shape = modality_shape(modality, params)
    dtype = record_dtype(shape)
    echo = spec_echo.encode('utf-8')

    ensure_directory(os.path.dirname(path))
    count = 0
    with open(path, 'wb') as f:
        f.write(_encode_header(modality, shape, 0, label_arity, echo))
        pending = []
        for record in records:
            if tuple(record.features.shape) != shape:
                raise DomainError(f"特征形状 {tuple(record.features.shape)} "
                                  f"与模态 {modality.value} 的 {shape} 不符")
            pending.append(record)
            if len(pending) == CHUNK:
                f.write(_pack(pending, dtype, label_arity))
                count += len(pending)
                pending = []
        if pending:
            f.write(_pack(pending, dtype, label_arity))
            count += len(pending)
        f.seek(PREAMBLE.size + SHAPE.size)
        f.write(struct.pack('<I', count))

    if spec_echo:
        with open(manifest_path(path), 'w', encoding='utf-8', newline='\n') as f:
            f.write(spec_echo)
    logger.info("写入 %s: %d 条 %s 记录", path, count, modality.value)
    return count


def _parse_header(data: bytes):
    if len(data) < HEADER_FIXED:
        raise FormatError("文件头被截断", offset=len(data))
    magic, code, ndim = PREAMBLE.unpack_from(data, 0)
    if magic != MAGIC:
        raise FormatError(f"魔数错误: {magic!r}", offset=0)
    modalities = {v: k for k, v in MODALITY_CODES.items()}
    if code not in modalities:
        raise FormatError(f"未知模态编码 {code}", offset=4)
    if ndim != 3:
        raise FormatError(f"特征维数应为 3, 得到 {ndim}", offset=5)
    shape = SHAPE.unpack_from(data, PREAMBLE.size)
    if 0 in shape:
        raise FormatError(f"特征形状含 0: {shape}", offset=PREAMBLE.size)
    count, label_arity, echo_len = COUNTS.unpack_from(data, PREAMBLE.size + SHAPE.size)
    if label_arity == 0:
        raise FormatError("标签元数为 0", offset=PREAMBLE.size + SHAPE.size + 4)
    if HEADER_FIXED + echo_len > len(data):
        raise FormatError("生成参数回显被截断", offset=len(data))
    try:
        echo = data[HEADER_FIXED:HEADER_FIXED + echo_len].decode('utf-8')
    except UnicodeDecodeError as e:
        raise FormatError("生成参数回显不是合法 UTF-8", offset=HEADER_FIXED + e.start) from e
    return modalities[code], tuple(shape), count, label_arity, echo


def load(path: str) -> LoraDataset:
    """读取 LDS1 文件; 与 save 逐位互逆"""
    with open(path, 'rb') as f:
        data = f.read()
    modality, shape, count, label_arity, echo = _parse_header(data)
    dtype = record_dtype(shape)
    body = HEADER_FIXED + len(echo.encode('utf-8'))
    expected = body + count * dtype.itemsize
    if len(data) < expected:
        complete = (len(data) - body) // dtype.itemsize
        raise FormatError(f"记录区被截断: 头部声明 {count} 条, 只有 {complete} 条完整记录",
                          offset=body + complete * dtype.itemsize)
    if len(data) > expected:
        raise FormatError("记录区之后有多余字节", offset=expected)

    block = np.frombuffer(data, dtype=dtype, count=count, offset=body)
    bad = np.flatnonzero(block['label'] >= label_arity)
    if bad.size:
        i = int(bad[0])
        raise FormatError(f"第 {i} 条记录的标签 {int(block['label'][i])} 超出 [0, {label_arity})",
                          offset=body + i * dtype.itemsize + dtype.fields['label'][1])

    return LoraDataset(
        features=block['features'].astype(np.float32),
        labels=block['label'].astype(np.uint32),
        inr_db=block['inr_db'].astype(np.float32),
        sinr_db=block['sinr_db'].astype(np.float32),
        interferer_sf=block['interferer_sf'].astype(np.int32),
        offset=block['offset'].astype(np.int32),
        modality=modality, label_arity=label_arity, spec_echo=echo,
    )
