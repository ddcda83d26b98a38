#!/usr/bin/env python3
"""
检测器统一接口

所有检测器都提供 detect_batch((K, N) 复数符号) -> (K,) 符号判决, 供 BER 扫描、
计时与包检测共用。
"""

from typing import Union

import numpy as np

from loralab.core import classic
from loralab.core.classic import DetectionResult
from loralab.core.phy import LoraParams
from loralab.errors import DomainError, NotFittedError
from loralab.models.features import Modality, featurize_batch
from loralab.nn.network import Network
from loralab.nn.trainer import TrainedModel, predict


class Detector:
    """检测器基类"""

    name = 'detector'

    def __init__(self, params: LoraParams = LoraParams()):
        self.params = params

    def ensure_ready(self) -> None:
        """扫描开始前检查 (例如模型是否已训练)"""

    def detect_batch(self, r: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def detect(self, r: np.ndarray) -> DetectionResult:
        """单符号判决; 子类未给出度量时 score 为 NaN"""
        symbol = int(self.detect_batch(np.asarray(r)[None])[0])
        return DetectionResult(symbol=symbol, score=float('nan'))


class CoherentDetector(Detector):
    name = 'coherent'

    def detect_batch(self, r: np.ndarray) -> np.ndarray:
        return classic.detect_coherent_batch(r, self.params)

    def detect(self, r: np.ndarray) -> DetectionResult:
        return classic.detect_coherent(r, self.params)


class NoncoherentDetector(Detector):
    name = 'noncoherent'

    def detect_batch(self, r: np.ndarray) -> np.ndarray:
        return classic.detect_noncoherent_batch(r, self.params)

    def detect(self, r: np.ndarray) -> DetectionResult:
        return classic.detect_noncoherent(r, self.params)


def _network(model: Union[Network, TrainedModel]) -> Network:
    return model.network if isinstance(model, TrainedModel) else model


def check_modality(model: Union[Network, TrainedModel], modality: Modality) -> Network:
    network = _network(model)
    modality = Modality(modality)
    if network.spec.modality != modality.value:
        raise DomainError(f"模型 {network.spec.name} 的模态是 {network.spec.modality}, "
                          f"不能用于 {modality.value}")
    return network


class DLDetector(Detector):
    """特征提取 + CNN 分类, 类别序号即符号估计"""

    def __init__(self, model: Union[Network, TrainedModel], modality: Modality = None,
                 params: LoraParams = LoraParams(), name: str = None):
        super().__init__(params)
        network = _network(model)
        self.modality = Modality(modality or network.spec.modality)
        self.network = check_modality(network, self.modality)
        self.name = name or network.spec.name

    def ensure_ready(self) -> None:
        if not self.network.trained:
            raise NotFittedError(f"深度学习检测器 {self.name} 尚未训练")

    def probabilities(self, r: np.ndarray) -> np.ndarray:
        return predict(self.network, featurize_batch(r, self.modality, self.params))[1]

    def detect_batch(self, r: np.ndarray) -> np.ndarray:
        return np.argmax(self.probabilities(r), axis=1)

    def detect(self, r: np.ndarray) -> DetectionResult:
        probs = self.probabilities(np.asarray(r)[None])[0]
        symbol = int(np.argmax(probs))
        return DetectionResult(symbol=symbol, score=float(probs[symbol]))


def detect_dl(model: Union[Network, TrainedModel], r: np.ndarray, modality: Modality,
              params: LoraParams = LoraParams()) -> DetectionResult:
    """featurize 后 predict; 模态与模型不符时报错"""
    return DLDetector(model, modality, params).detect(r)


def detect_packet(detector: Detector, samples: np.ndarray) -> np.ndarray:
    """把已同步的 K 符号包切成 (K, N) 后逐符号检测"""
    samples = np.asarray(samples)
    n = detector.params.samples_per_symbol
    if samples.ndim != 1 or samples.size == 0 or samples.size % n:
        raise DomainError(f"包长度必须是 {n} 的正整数倍")
    return detector.detect_batch(samples.reshape(-1, n))
