#!/usr/bin/env python3
"""
训练/验证数据集生成

每条记录一个符号: 抽取符号值 -> 调制 -> (按比例) 挂接干扰 -> 抽取 INR/SINR -> 混合
-> 特征提取 -> 打标签。第 i 条记录只依赖 (种子, 划分, i) 对应的随机子流, 因此:
 - 同种子生成结果逐字节一致;
 - 训练集 (划分 0) 与验证集 (划分 1) 的随机流互不相交;
 - 不同模态的数据集由同一原始符号流导出, 可以逐条配对比较。
"""

import logging
import math
from dataclasses import dataclass, field, fields, replace
from typing import Dict, Iterable, Iterator, List, Optional, Tuple

import numpy as np
from tqdm import tqdm

from loralab import config
from loralab.core.channel import ChannelConfig, mix
from loralab.core.phy import LoraParams, modulate_symbol
from loralab.errors import ConfigError, DomainError
from loralab.models.features import Modality, featurize, modality_shape
from loralab.models.zoo import INTERFERENCE_CLASSES
from loralab.utils.file_utils import format_manifest
from loralab.utils.rng import child_rng

logger = logging.getLogger(__name__)

SPLITS = {'train': 0, 'val': 1}
TASKS = ('symbol', 'interference')
LABEL_RULES = ('power', 'inr')
# 拒绝采样的最大尝试次数, 用尽后该帧退化为仅噪声
MAX_DRAWS = 64


@dataclass(frozen=True)
class DatasetSpec:
    """数据集生成参数

    task='interference' 时生成干扰检测网络的二分类数据 (FFT 特征)。
    label_rule='inr' (默认): INR > inr_threshold_db 记为干扰; 'power': p_I > p_s 记为干扰。
    """
    num_train: int = config.DESK_TRAIN_RECORDS
    num_val: int = config.DESK_VAL_RECORDS
    modality: Modality = Modality.FFT
    sinr_range_db: Tuple[float, float] = config.SINR_RANGE_DB
    inr_range_db: Tuple[float, float] = config.INR_RANGE_DB
    interferer_sfs: Tuple[int, ...] = config.INTERFERER_SFS
    interference_fraction: float = config.INTERFERENCE_FRACTION
    rng_seed: int = 0
    task: str = 'symbol'
    label_rule: str = config.INTERFERENCE_LABEL_RULE
    inr_threshold_db: float = config.INR_THRESHOLD_DB

    def __post_init__(self):
        object.__setattr__(self, 'modality', Modality(self.modality))
        object.__setattr__(self, 'sinr_range_db', tuple(float(v) for v in self.sinr_range_db))
        object.__setattr__(self, 'inr_range_db', tuple(float(v) for v in self.inr_range_db))
        object.__setattr__(self, 'interferer_sfs', tuple(int(v) for v in self.interferer_sfs))
        if self.num_train <= 0 or self.num_val <= 0:
            raise DomainError("训练/验证记录数必须为正")
        for name in ('sinr_range_db', 'inr_range_db'):
            low, high = getattr(self, name)
            if not low <= high or not (math.isfinite(low) and math.isfinite(high)):
                raise DomainError(f"{name} 必须是非空有限区间")
        if not self.interferer_sfs or any(not 7 <= sf <= 12 for sf in self.interferer_sfs):
            raise DomainError("interferer_sfs 必须是 {7..12} 的非空子集")
        if not 0 <= self.interference_fraction <= 1:
            raise DomainError("interference_fraction 必须在 [0, 1] 之间")
        if self.task not in TASKS:
            raise DomainError(f"task 必须是 {TASKS} 之一")
        if self.label_rule not in LABEL_RULES:
            raise DomainError(f"label_rule 必须是 {LABEL_RULES} 之一")
        if self.task == 'interference' and self.modality is not Modality.FFT:
            raise DomainError("干扰检测数据集只使用 FFT 特征")

    @property
    def label_arity(self) -> int:
        return len(INTERFERENCE_CLASSES) if self.task == 'interference' else 0

    def count(self, split: str) -> int:
        return self.num_train if split == 'train' else self.num_val

    def to_manifest(self) -> Dict[str, str]:
        """key=value 形式的完整回显"""
        return {
            'num_train': str(self.num_train),
            'num_val': str(self.num_val),
            'modality': self.modality.value,
            'sinr_range_db': f"{self.sinr_range_db[0]!r},{self.sinr_range_db[1]!r}",
            'inr_range_db': f"{self.inr_range_db[0]!r},{self.inr_range_db[1]!r}",
            'interferer_sfs': ','.join(str(sf) for sf in self.interferer_sfs),
            'interference_fraction': repr(self.interference_fraction),
            'rng_seed': str(self.rng_seed),
            'task': self.task,
            'label_rule': self.label_rule,
            'inr_threshold_db': repr(self.inr_threshold_db),
        }

    @classmethod
    def from_manifest(cls, entries: Dict[str, str]) -> 'DatasetSpec':
        known = {f.name for f in fields(cls)}
        unknown = set(entries) - known
        if unknown:
            raise ConfigError(f"清单中有未知键: {', '.join(sorted(unknown))}")
        kwargs = {}
        try:
            for key, value in entries.items():
                if key in ('num_train', 'num_val', 'rng_seed'):
                    kwargs[key] = int(value)
                elif key in ('interference_fraction', 'inr_threshold_db'):
                    kwargs[key] = float(value)
                elif key in ('sinr_range_db', 'inr_range_db'):
                    low, high = (float(v) for v in value.split(','))
                    kwargs[key] = (low, high)
                elif key == 'interferer_sfs':
                    kwargs[key] = tuple(int(v) for v in value.split(','))
                else:
                    kwargs[key] = value
            return cls(**kwargs)
        except (ValueError, DomainError) as e:
            raise ConfigError(f"清单取值错误: {e}") from e


@dataclass(frozen=True)
class RecordMeta:
    """interferer_sf 为 0 表示没有干扰"""
    inr_db: float
    sinr_db: float
    interferer_sf: int
    offset: int

    def channel(self) -> ChannelConfig:
        if self.interferer_sf == 0:
            return ChannelConfig(inr_db=-math.inf, sinr_db=self.sinr_db)
        return ChannelConfig(inr_db=self.inr_db, sinr_db=self.sinr_db,
                             interferer_sf=self.interferer_sf,
                             interferer_offset_samples=self.offset)

    @property
    def sir_db(self) -> float:
        """目标与干扰的功率比 p_s / p_I (dB)"""
        p_i = self.channel().interferer_power()
        return math.inf if p_i == 0 else -10 * math.log10(p_i)


@dataclass
class DatasetRecord:
    features: np.ndarray
    label: int
    meta: RecordMeta
    symbol: int = field(default=-1, compare=False)


@dataclass
class RawRecord:
    """特征提取之前的接收符号"""
    samples: np.ndarray
    symbol: int
    label: int
    meta: RecordMeta


def interferer_power(inr_db: float, sinr_db: float) -> float:
    alpha = 10 ** (inr_db / 10)
    gamma = 10 ** (sinr_db / 10)
    return alpha / (gamma * (1 + alpha))


def is_interference(spec: DatasetSpec, inr_db: float, sinr_db: float) -> Optional[bool]:
    """按标签规则判断; 恰好落在边界上返回 None (边界帧不参与)"""
    if spec.label_rule == 'inr':
        if inr_db == spec.inr_threshold_db:
            return None
        return inr_db > spec.inr_threshold_db
    p_i = interferer_power(inr_db, sinr_db)
    if p_i == 1.0:
        return None
    return p_i > 1.0


def _level(rng: np.random.Generator, bounds: Tuple[float, float]) -> float:
    # 取 float32 可表示的值, 与 LDS1 中保存的元数据完全一致
    return float(np.float32(rng.uniform(*bounds)))


def _draw_levels(spec: DatasetSpec, rng: np.random.Generator) -> Tuple[float, float]:
    return _level(rng, spec.inr_range_db), _level(rng, spec.sinr_range_db)


def _draw_interferer(spec: DatasetSpec, rng: np.random.Generator,
                     params: LoraParams) -> Tuple[int, int]:
    sf = int(spec.interferer_sfs[rng.integers(0, len(spec.interferer_sfs))])
    offset = int(rng.integers(0, params.with_sf(sf).samples_per_symbol))
    return sf, offset


def _streams(spec: DatasetSpec, split: str, index: int):
    """每条记录两路子流: 0 抽取参数, 1 用于混合 (干扰符号与噪声)"""
    if split not in SPLITS:
        raise DomainError(f"划分必须是 {tuple(SPLITS)} 之一")
    path = (SPLITS[split], index)
    return child_rng(spec.rng_seed, path + (0,)), child_rng(spec.rng_seed, path + (1,))


def resynthesize(spec: DatasetSpec, params: LoraParams, split: str, index: int,
                 symbol: int, meta: RecordMeta) -> np.ndarray:
    """仅由元数据与种子复现第 index 条记录的接收符号"""
    _, mix_rng = _streams(spec, split, index)
    return mix(modulate_symbol(symbol, params), meta.channel(), mix_rng, params)


def synthesize(spec: DatasetSpec, params: LoraParams, split: str, index: int) -> RawRecord:
    """合成第 index 条记录"""
    rng, _ = _streams(spec, split, index)
    symbol = int(rng.integers(0, params.alphabet_size))
    sf, offset = _draw_interferer(spec, rng, params)

    if spec.task == 'interference':
        label = index % 2
        inr_db, sinr_db, attach = _draw_labelled_levels(spec, rng, label)
    else:
        attach = bool(rng.random() < spec.interference_fraction)
        inr_db, sinr_db = _draw_levels(spec, rng)
        label = symbol

    if not attach:
        inr_db, sf, offset = -math.inf, 0, 0
    meta = RecordMeta(inr_db=inr_db, sinr_db=sinr_db, interferer_sf=sf, offset=offset)
    samples = resynthesize(spec, params, split, index, symbol, meta)
    return RawRecord(samples=samples, symbol=symbol, label=label, meta=meta)


def _draw_labelled_levels(spec: DatasetSpec, rng: np.random.Generator,
                          label: int) -> Tuple[float, float, bool]:
    """按目标类别拒绝采样 (INR, SINR); 返回 (inr, sinr, 是否挂接干扰)"""
    want = label == INTERFERENCE_CLASSES.index('interference')
    if not want and rng.random() >= spec.interference_fraction:
        return -math.inf, _level(rng, spec.sinr_range_db), False
    for _ in range(MAX_DRAWS):
        inr_db, sinr_db = _draw_levels(spec, rng)
        if is_interference(spec, inr_db, sinr_db) is want:
            return inr_db, sinr_db, True
    if want:
        raise ConfigError("INR/SINR 区间内无法满足 '干扰' 类的标签条件")
    return -math.inf, _level(rng, spec.sinr_range_db), False


def generate(spec: DatasetSpec, params: LoraParams = LoraParams(),
             split: str = 'train') -> Iterator[DatasetRecord]:
    """逐条产出带特征的记录"""
    for index in range(spec.count(split)):
        raw = synthesize(spec, params, split, index)
        yield DatasetRecord(features=featurize(raw.samples, spec.modality, params),
                            label=raw.label, meta=raw.meta, symbol=raw.symbol)


def generate_interference_labels(spec: DatasetSpec, params: LoraParams = LoraParams(),
                                 split: str = 'train') -> Iterator[DatasetRecord]:
    """干扰检测网络的数据: FFT 特征, 二分类标签, 两类严格各半"""
    if spec.task != 'interference':
        spec = replace(spec, task='interference', modality=Modality.FFT)
    return generate(spec, params, split)


class LoraDataset:
    """已物化的数据集: 特征、标签与逐条元数据数组"""

    def __init__(self, features: np.ndarray, labels: np.ndarray, inr_db: np.ndarray,
                 sinr_db: np.ndarray, interferer_sf: np.ndarray, offset: np.ndarray,
                 modality: Modality, label_arity: int, spec_echo: str = ''):
        self.features = features
        self.labels = labels
        self.inr_db = inr_db
        self.sinr_db = sinr_db
        self.interferer_sf = interferer_sf
        self.offset = offset
        self.modality = Modality(modality)
        self.label_arity = label_arity
        self.spec_echo = spec_echo

    def __len__(self) -> int:
        return int(self.labels.shape[0])

    def __iter__(self) -> Iterator[DatasetRecord]:
        for i in range(len(self)):
            yield self.record(i)

    def record(self, i: int) -> DatasetRecord:
        meta = RecordMeta(inr_db=float(self.inr_db[i]), sinr_db=float(self.sinr_db[i]),
                          interferer_sf=int(self.interferer_sf[i]), offset=int(self.offset[i]))
        return DatasetRecord(features=self.features[i], label=int(self.labels[i]), meta=meta)

    @property
    def shape(self) -> Tuple[int, int, int]:
        return tuple(self.features.shape[1:])

    def arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        """(features, labels), 供训练使用"""
        return self.features, self.labels.astype(np.int64)

    def sir_db(self) -> np.ndarray:
        return np.array([self.record(i).meta.sir_db for i in range(len(self))])

    def subset(self, mask: np.ndarray) -> 'LoraDataset':
        return LoraDataset(self.features[mask], self.labels[mask], self.inr_db[mask],
                           self.sinr_db[mask], self.interferer_sf[mask], self.offset[mask],
                           self.modality, self.label_arity, self.spec_echo)

    @classmethod
    def from_records(cls, records: Iterable[DatasetRecord], modality: Modality,
                     label_arity: int, spec_echo: str = '') -> 'LoraDataset':
        items: List[DatasetRecord] = list(records)
        shape = items[0].features.shape if items else modality_shape(modality)
        features = np.zeros((len(items),) + shape, dtype=np.float32)
        for i, record in enumerate(items):
            features[i] = record.features
        return cls(features=features,
                   labels=np.array([r.label for r in items], dtype=np.uint32),
                   inr_db=np.array([r.meta.inr_db for r in items], dtype=np.float32),
                   sinr_db=np.array([r.meta.sinr_db for r in items], dtype=np.float32),
                   interferer_sf=np.array([r.meta.interferer_sf for r in items], dtype=np.int32),
                   offset=np.array([r.meta.offset for r in items], dtype=np.int32),
                   modality=modality, label_arity=label_arity, spec_echo=spec_echo)


def label_arity_for(spec: DatasetSpec, params: LoraParams) -> int:
    return spec.label_arity or params.alphabet_size


def generate_dataset(spec: DatasetSpec, params: LoraParams = LoraParams(), split: str = 'train',
                     progress: bool = False) -> LoraDataset:
    """生成并物化一个划分"""
    records = tqdm(generate(spec, params, split), total=spec.count(split),
                   desc=f"{spec.modality.value}/{split}", disable=not progress)
    dataset = LoraDataset.from_records(records, spec.modality, label_arity_for(spec, params),
                                       spec_echo=format_manifest(spec.to_manifest()))
    hist = np.bincount(dataset.labels, minlength=dataset.label_arity)
    logger.info("生成 %s 划分 %d 条记录, 类别计数范围 [%d, %d]",
                split, len(dataset), int(hist.min()), int(hist.max()))
    return dataset
