#!/usr/bin/env python3
"""
Monte-Carlo 误码率扫描

固定 SINR, 在 INR 网格上为每个检测器统计误符号数, 换算成 BER:
    BER = SER * (M/2) / (M-1)
每个网格点使用主种子派生的独立子流; 配对模式下所有检测器看到同一批接收符号,
同一主种子重跑得到完全相同的结果。
"""

import csv
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Union

import numpy as np
from tqdm import tqdm

from loralab import config
from loralab.core.channel import complex_awgn, mix_batch
from loralab.core.classic import (binomial_sigma, coherent_ser, noise_amp_for_es_n0,
                                  noncoherent_ser, ser_to_ber)
from loralab.core.phy import LoraParams, modulate_symbols
from loralab.core.report_generator import BER_CSV_HEADER
from loralab.data.generator import LoraDataset
from loralab.errors import DomainError, FormatError
from loralab.models.detectors import Detector
from loralab.models.features import Modality
from loralab.models.hybnet import HybnetModel, route_batch
from loralab.nn.trainer import predict
from loralab.utils.rng import child_rng

logger = logging.getLogger(__name__)

CHUNK = 1000
# 子流路径的首元素, 区分不同用途的扫描
_BER_STREAM = 0
_AWGN_STREAM = 1
_ROUTING_STREAM = 2

DetectorsLike = Union[Detector, Sequence[Detector], Mapping[str, Detector]]


@dataclass(frozen=True)
class BerPoint:
    """一个 (检测器, 网格点) 的统计结果"""
    detector: str
    inr_db: float
    sinr_db: float
    interferer_sf: int
    trials: int
    symbol_errors: int
    alphabet_size: int = 128

    def __post_init__(self):
        if self.trials <= 0 or not 0 <= self.symbol_errors <= self.trials:
            raise DomainError(f"误符号数 {self.symbol_errors} / 试验数 {self.trials} 不合法")

    @property
    def ser(self) -> float:
        return self.symbol_errors / self.trials

    @property
    def ber(self) -> float:
        return ser_to_ber(self.ser, self.alphabet_size)

    @property
    def ber_sigma(self) -> float:
        return ser_to_ber(binomial_sigma(self.ser, self.trials), self.alphabet_size)

    @property
    def grid_key(self):
        return self.inr_db, self.sinr_db, self.interferer_sf


@dataclass(frozen=True)
class AwgnPoint:
    """纯 AWGN 下的误符号率与理论值对照"""
    detector: str
    es_n0_db: float
    trials: int
    symbol_errors: int
    oracle_ser: Optional[float]

    @property
    def ser(self) -> float:
        return self.symbol_errors / self.trials

    @property
    def sigma(self) -> float:
        p = self.oracle_ser if self.oracle_ser is not None else self.ser
        return binomial_sigma(p, self.trials)

    @property
    def within_3_sigma(self) -> Optional[bool]:
        if self.oracle_ser is None:
            return None
        return abs(self.ser - self.oracle_ser) <= 3 * self.sigma


@dataclass(frozen=True)
class ClassifierScore:
    accuracy: float
    evaluated: int
    total: int


def _named(detectors: DetectorsLike) -> Dict[str, Detector]:
    if isinstance(detectors, Detector):
        return {detectors.name: detectors}
    if isinstance(detectors, Mapping):
        return dict(detectors)
    named: Dict[str, Detector] = {}
    for detector in detectors:
        if detector.name in named:
            raise DomainError(f"检测器名称重复: {detector.name}")
        named[detector.name] = detector
    return named


def _check_trials(trials: int) -> None:
    if trials < config.MIN_TRIALS:
        raise DomainError(f"每个网格点至少需要 {config.MIN_TRIALS} 次试验, 得到 {trials}")


def _chunks(trials: int, chunk: int) -> Iterable[int]:
    for first in range(0, trials, chunk):
        yield min(chunk, trials - first)


def _count_point(named: Dict[str, Detector], j: int, inr_db: float, sinr_db: float,
                 interferer_sf: int, trials: int, seed: int, params: LoraParams,
                 paired: bool, chunk: int) -> List[BerPoint]:
    errors = dict.fromkeys(named, 0)
    if paired:
        shared = child_rng(seed, (_BER_STREAM, j, 0))
    else:
        rngs = {name: child_rng(seed, (_BER_STREAM, j, d + 1)) for d, name in enumerate(named)}
    m = params.alphabet_size
    for size in _chunks(trials, chunk):
        if paired:
            symbols = shared.integers(0, m, size=size)
            r = mix_batch(modulate_symbols(symbols, params), inr_db, sinr_db,
                          interferer_sf, shared, params)
        for name, detector in named.items():
            if not paired:
                rng = rngs[name]
                symbols = rng.integers(0, m, size=size)
                r = mix_batch(modulate_symbols(symbols, params), inr_db, sinr_db,
                              interferer_sf, rng, params)
            errors[name] += int(np.count_nonzero(detector.detect_batch(r) != symbols))
    return [BerPoint(detector=name, inr_db=float(inr_db), sinr_db=float(sinr_db),
                     interferer_sf=int(interferer_sf), trials=trials,
                     symbol_errors=errors[name], alphabet_size=m)
            for name in named]


def ber_sweep(detectors: DetectorsLike, inr_grid_db: Sequence[float],
              sinr_db: float = config.SWEEP_SINR_DB, interferer_sf: int = 7,
              trials_per_point: int = config.SWEEP_TRIALS, seed: int = 0,
              params: LoraParams = LoraParams(), paired: bool = True,
              chunk: int = CHUNK, workers: int = 1,
              progress: bool = False) -> List[BerPoint]:
    """逐网格点统计 BER; 返回按 (网格点, 检测器) 排列的结果

    paired=True 时所有检测器共享同一随机流 (相同的目标符号、干扰与噪声)。
    workers > 1 时各网格点并行计算, 结果与串行一致。
    """
    _check_trials(trials_per_point)
    named = _named(detectors)
    if not named:
        raise DomainError("至少需要一个检测器")
    for detector in named.values():
        detector.ensure_ready()
    if not 7 <= interferer_sf <= 12:
        raise DomainError(f"干扰扩频因子必须在 7..12 之间, 得到 {interferer_sf}")
    grid = [float(v) for v in inr_grid_db]

    def run(j: int) -> List[BerPoint]:
        points = _count_point(named, j, grid[j], sinr_db, interferer_sf, trials_per_point,
                              seed, params, paired, chunk)
        logger.info("INR=%.2f dB: %s", grid[j],
                    ', '.join(f"{p.detector}={p.ber:.3e}" for p in points))
        return points

    indices = range(len(grid))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_point = list(tqdm(pool.map(run, indices), total=len(grid),
                                  desc="BER 扫描", disable=not progress))
    else:
        per_point = [run(j) for j in tqdm(indices, desc="BER 扫描", disable=not progress)]
    return [point for points in per_point for point in points]


def awgn_oracle(detector_name: str, es_n0_db: float, alphabet_size: int) -> Optional[float]:
    if detector_name == 'noncoherent':
        return noncoherent_ser(es_n0_db, alphabet_size)
    if detector_name == 'coherent':
        return coherent_ser(es_n0_db, alphabet_size)
    return None


def awgn_sweep(detectors: DetectorsLike, es_n0_grid_db: Sequence[float], trials: int,
               seed: int = 0, params: LoraParams = LoraParams(),
               chunk: int = CHUNK, progress: bool = False) -> List[AwgnPoint]:
    """关闭干扰, 只加 AWGN; 所有检测器共享噪声, 经典检测器附理论误符号率"""
    _check_trials(trials)
    named = _named(detectors)
    for detector in named.values():
        detector.ensure_ready()
    m = params.alphabet_size
    points: List[AwgnPoint] = []
    for j, es_n0_db in enumerate(tqdm(es_n0_grid_db, desc="AWGN 扫描", disable=not progress)):
        rng = child_rng(seed, (_AWGN_STREAM, j))
        amp = noise_amp_for_es_n0(es_n0_db, params)
        errors = dict.fromkeys(named, 0)
        for size in _chunks(trials, chunk):
            symbols = rng.integers(0, m, size=size)
            targets = modulate_symbols(symbols, params)
            r = targets + amp * complex_awgn(targets.shape, rng)
            for name, detector in named.items():
                errors[name] += int(np.count_nonzero(detector.detect_batch(r) != symbols))
        for name in named:
            points.append(AwgnPoint(detector=name, es_n0_db=float(es_n0_db), trials=trials,
                                    symbol_errors=errors[name],
                                    oracle_ser=awgn_oracle(name, es_n0_db, m)))
    return points


def classifier_accuracy(model, records: LoraDataset,
                        sir_margin_db: float = 6.0) -> ClassifierScore:
    """干扰检测网络在 |SIR| >= margin 的记录上的准确率 (无干扰记录的 SIR 为 +inf)"""
    if records.modality is not Modality.FFT:
        raise DomainError("干扰检测网络只接收 FFT 特征")
    mask = np.abs(records.sir_db()) >= sir_margin_db
    total = len(records)
    if not np.any(mask):
        return ClassifierScore(accuracy=float('nan'), evaluated=0, total=total)
    subset = records.subset(mask)
    classes, _ = predict(model, subset.features)
    accuracy = float(np.mean(np.asarray(classes) == subset.labels))
    return ClassifierScore(accuracy=accuracy, evaluated=len(subset), total=total)


def routing_sweep(h: HybnetModel, inr_grid_db: Sequence[float],
                  sinr_db: float = config.SWEEP_SINR_DB, interferer_sf: int = 7,
                  trials: int = config.MIN_TRIALS, seed: int = 0,
                  params: LoraParams = LoraParams()) -> Dict[float, float]:
    """各 INR 下送往 CNN 分支的帧比例"""
    fractions: Dict[float, float] = {}
    for j, inr_db in enumerate(inr_grid_db):
        rng = child_rng(seed, (_ROUTING_STREAM, j))
        routed = 0
        for size in _chunks(trials, CHUNK):
            symbols = rng.integers(0, params.alphabet_size, size=size)
            r = mix_batch(modulate_symbols(symbols, params), inr_db, sinr_db,
                          interferer_sf, rng, params)
            routed += int(np.count_nonzero(route_batch(h, r, params)))
        fractions[float(inr_db)] = routed / trials
    return fractions


def inr_grid(start_db: float = config.SWEEP_INR_FROM_DB, stop_db: float = config.SWEEP_INR_TO_DB,
             step_db: float = config.SWEEP_INR_STEP_DB) -> List[float]:
    """闭区间等步长网格"""
    if step_db <= 0 or stop_db < start_db:
        raise DomainError("INR 网格必须满足 step > 0 且 from <= to")
    count = int(np.floor((stop_db - start_db) / step_db + 1e-9)) + 1
    return [float(start_db + i * step_db) for i in range(count)]


# -------------------- CSV --------------------

def alphabet_from_ber(ser: float, ber: float) -> Optional[int]:
    """由 BER/SER 之比反推 M = 2^SF; 无误符号时无法确定, 返回 None"""
    if ser <= 0:
        return None
    ratio = 2 * ber / ser
    if ratio <= 1:
        raise FormatError(f"BER {ber} 与 SER {ser} 的比值不对应任何 SF")
    sf = int(round(np.log2(ratio / (ratio - 1))))
    if not 7 <= sf <= 12:
        raise FormatError(f"BER {ber} 与 SER {ser} 的比值对应的 SF={sf} 不在 7..12 之间")
    return 2 ** sf


def read_ber_csv(path: str, alphabet_size: Optional[int] = None) -> List[BerPoint]:
    """读取 evaluate 输出的 CSV; 表头或取值不合法时抛出 FormatError

    字母表大小 M 由 ber 列与 SER 之比推出, 整个文件必须一致; 全部点都没有误符号时
    取 alphabet_size, 未给出则取默认 LoRa 参数的 M。给出的 alphabet_size 与推出值不符时报错。
    """
    rows = []
    with open(path, 'r', encoding='ascii', newline='') as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or tuple(header) != BER_CSV_HEADER:
            raise FormatError(f"CSV 表头应为 {','.join(BER_CSV_HEADER)}", offset=0)
        for row in reader:
            if not row:
                continue
            try:
                values = (row[0], float(row[1]), float(row[2]), int(row[3]),
                          int(row[4]), int(row[5]), float(row[6]))
            except (IndexError, ValueError) as e:
                raise FormatError(f"CSV 第 {reader.line_num} 行不合法: {e}") from e
            rows.append((reader.line_num, values))

    inferred = set()
    for _, values in rows:
        trials, errors, ber = values[4:]
        if trials > 0:
            size = alphabet_from_ber(errors / trials, ber)
            if size is not None:
                inferred.add(size)
    if len(inferred) > 1:
        raise FormatError(f"CSV 中的 BER 对应多个字母表大小 {sorted(inferred)}")
    if inferred and alphabet_size is not None and alphabet_size not in inferred:
        raise FormatError(f"CSV 的字母表大小为 {inferred.pop()}, 与给定的 {alphabet_size} 不符")
    m = inferred.pop() if inferred else (alphabet_size or LoraParams().alphabet_size)

    points: List[BerPoint] = []
    for line_num, values in rows:
        try:
            point = BerPoint(*values[:6], alphabet_size=m)
        except DomainError as e:
            raise FormatError(f"CSV 第 {line_num} 行不合法: {e}") from e
        if not np.isclose(point.ber, values[6], rtol=1e-5, atol=1e-12):
            raise FormatError(f"CSV 第 {line_num} 行的 ber 与误符号数不一致")
        points.append(point)
    logger.debug("读取 %s: %d 个点, M=%d", path, len(points), m)
    return points
