#!/usr/bin/env python3
"""
复杂度与计时

理论代价只计卷积层 (池化/dropout/全连接忽略):
    num_symbols * sum_l  C_in(l) * kh(l) * kw(l) * F(l) * H_out(l) * W_out(l)
计时对同步后的包做检测, 每个 (网络, 符号数) 取多次重复的中位数,
再对符号数做最小二乘直线拟合。
"""

import logging
import statistics
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy import stats

from loralab import config
from loralab.core.channel import complex_awgn
from loralab.core.phy import LoraParams, modulate_message
from loralab.data.generator import LoraDataset
from loralab.errors import DomainError
from loralab.models.detectors import DLDetector, Detector, detect_packet
from loralab.models.features import Modality, featurize_batch
from loralab.models.hybnet import HybnetDetector, HybnetModel
from loralab.models.zoo import BUILDERS
from loralab.nn.network import Network, NetworkSpec
from loralab.nn.trainer import TrainingConfig, train
from loralab.utils.rng import child_rng

logger = logging.getLogger(__name__)

TIMING_NETWORKS = ('iq', 'stft', 'fft')


def theoretical_cost(spec: NetworkSpec, num_symbols: int = 1) -> int:
    """卷积乘加次数的理论估计, 与符号数严格成正比"""
    if num_symbols < 0:
        raise DomainError("符号数不能为负")
    return num_symbols * sum(layer_costs(spec))


def layer_costs(spec: NetworkSpec) -> List[int]:
    """逐卷积层的单符号代价"""
    shapes = [spec.input_shape] + spec.infer_shapes()
    costs = []
    for index, layer in enumerate(spec.layers):
        if layer.kind == 'conv':
            kh, kw = layer.kernel
            out_h, out_w, _ = shapes[index + 1]
            costs.append(shapes[index][-1] * kh * kw * layer.filters * out_h * out_w)
    return costs


@dataclass(frozen=True)
class TimingPoint:
    network: str
    num_symbols: int
    wall_time_s: float
    repeats: int


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    r_squared: float


def random_network(spec: NetworkSpec, seed: int = 0,
                   params: LoraParams = LoraParams()) -> Network:
    """随机初始化并建立批归一化统计量; 计时与权重无关"""
    network = Network(spec).init(child_rng(seed, (0,)))
    modality = Modality(spec.modality)
    rng = child_rng(seed, (1,))
    warm = featurize_batch(complex_awgn((64, params.samples_per_symbol), rng), modality, params)
    network.warm_up(warm)
    return network


def timing_detectors(names: Sequence[str], params: LoraParams = LoraParams(),
                     seed: int = 0) -> List[Detector]:
    """按名称构造随机初始化的检测器, 'hybnet' 由干扰检测网络与 FFT-CNN 组成"""
    detectors: List[Detector] = []
    for name in names:
        if name == 'hybnet':
            h = HybnetModel(random_network(BUILDERS['intdet'](params=params), seed, params),
                            random_network(BUILDERS['fft'](params=params), seed, params))
            detectors.append(HybnetDetector(h, params))
        elif name in TIMING_NETWORKS:
            network = random_network(BUILDERS[name](params=params), seed, params)
            detectors.append(DLDetector(network, params=params))
        else:
            raise DomainError(f"未知网络 {name}, 可选 {TIMING_NETWORKS + ('hybnet',)}")
    return detectors


def time_packet(detector: Detector, packet: np.ndarray, repeats: int) -> float:
    """多次重复检测同一个包, 返回中位耗时 (秒)"""
    detect_packet(detector, packet)
    samples = []
    for _ in range(repeats):
        started = time.perf_counter()
        detect_packet(detector, packet)
        samples.append(time.perf_counter() - started)
    return statistics.median(samples)


def timing_bench(detectors: Sequence[Detector], symbol_counts: Sequence[int],
                 repeats: int = 5, seed: int = 0,
                 params: LoraParams = LoraParams()) -> List[TimingPoint]:
    """每个检测器对 1..K 符号包的检测耗时"""
    if repeats < 1:
        raise DomainError("repeats 至少为 1")
    if any(count < 1 for count in symbol_counts):
        raise DomainError("符号数必须为正")
    points: List[TimingPoint] = []
    for count in symbol_counts:
        rng = child_rng(seed, (2, int(count)))
        symbols = rng.integers(0, params.alphabet_size, size=int(count))
        packet = modulate_message(symbols, params)
        packet = packet + 0.1 * complex_awgn(packet.shape, rng)
        for detector in detectors:
            seconds = time_packet(detector, packet, repeats)
            logger.info("%s %d 符号: %.6f s", detector.name, count, seconds)
            points.append(TimingPoint(network=detector.name, num_symbols=int(count),
                                      wall_time_s=seconds, repeats=repeats))
    return points


def fit_timing(points: Sequence[TimingPoint]) -> Dict[str, LinearFit]:
    """每个网络的耗时-符号数直线拟合"""
    by_network: Dict[str, List[TimingPoint]] = {}
    for point in points:
        by_network.setdefault(point.network, []).append(point)
    fits: Dict[str, LinearFit] = {}
    for name, rows in by_network.items():
        if len({row.num_symbols for row in rows}) < 2:
            continue
        result = stats.linregress([row.num_symbols for row in rows],
                                  [row.wall_time_s for row in rows])
        fits[name] = LinearFit(slope=float(result.slope), intercept=float(result.intercept),
                               r_squared=float(result.rvalue ** 2))
    return fits


@dataclass(frozen=True)
class DepthResult:
    network: str
    conv_depth: int
    parameters: int
    cost_per_symbol: int
    val_accuracy: float
    train_seconds: float
    packet_seconds: float


def depth_study(modality: Modality, depths: Sequence[int], train_records: LoraDataset,
                val_records: LoraDataset, cfg: Optional[TrainingConfig] = None,
                params: LoraParams = LoraParams(),
                packet_symbols: int = config.PACKET_SYMBOLS, repeats: int = 5,
                progress: bool = False) -> List[DepthResult]:
    """不同卷积深度的同一网络: 验证准确率、训练耗时与单包检测耗时"""
    modality = Modality(modality)
    for records in (train_records, val_records):
        if records.modality is not modality:
            raise DomainError(f"数据集模态 {records.modality.value} 与 {modality.value} 不符")
    if not depths or any(d < 1 for d in depths):
        raise DomainError("卷积深度必须为正整数")
    cfg = cfg or TrainingConfig()
    builder = BUILDERS[modality.value]
    rng = child_rng(cfg.rng_seed, (3,))
    packet = modulate_message(rng.integers(0, params.alphabet_size, size=packet_symbols), params)

    results: List[DepthResult] = []
    for depth in depths:
        spec = builder(conv_depth=depth, params=params)
        model = train(spec, train_records.arrays(), cfg, validation=val_records.arrays(),
                      progress=progress)
        detector = DLDetector(model, modality, params)
        accuracy = model.history.epochs[-1].val_accuracy
        results.append(DepthResult(
            network=spec.name, conv_depth=depth,
            parameters=model.network.parameter_count(),
            cost_per_symbol=theoretical_cost(spec, 1),
            val_accuracy=float(accuracy),
            train_seconds=model.history.train_seconds,
            packet_seconds=time_packet(detector, packet, repeats),
        ))
        logger.info("%s 深度 %d: val_acc=%.4f 训练 %.1f s", spec.name, depth,
                    accuracy, model.history.train_seconds)
    return results
