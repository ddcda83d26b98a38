#!/usr/bin/env python3
"""
HybNet 硬切换检测器

干扰检测网络在 FFT 特征上判断 "仅噪声" 还是 "干扰":
仅噪声 -> 相干检测; 干扰 -> FFT-CNN。输出总是两个分支之一, 不做融合。
"""

from dataclasses import dataclass
from typing import Union

import numpy as np

from loralab.core import classic
from loralab.core.classic import DetectionResult
from loralab.core.phy import LoraParams
from loralab.errors import DomainError, NotFittedError
from loralab.models.detectors import DLDetector, Detector, check_modality
from loralab.models.features import Modality, featurize_batch
from loralab.models.zoo import INTERFERENCE_CLASSES
from loralab.nn.network import Network
from loralab.nn.trainer import TrainedModel, predict

NOISE_ONLY = INTERFERENCE_CLASSES.index('noise_only')
INTERFERENCE = INTERFERENCE_CLASSES.index('interference')


@dataclass
class HybnetModel:
    interference_detector: Union[Network, TrainedModel]
    fft_cnn: Union[Network, TrainedModel]

    def __post_init__(self):
        self.interference_detector = check_modality(self.interference_detector, Modality.FFT)
        self.fft_cnn = check_modality(self.fft_cnn, Modality.FFT)
        if self.interference_detector.spec.num_classes != len(INTERFERENCE_CLASSES):
            raise DomainError("干扰检测网络必须是两类输出")
        if self.interference_detector.spec.input_shape != self.fft_cnn.spec.input_shape:
            raise DomainError("两个子模型的输入形状不一致")

    @property
    def trained(self) -> bool:
        return self.interference_detector.trained and self.fft_cnn.trained


def route_batch(h: HybnetModel, r: np.ndarray, params: LoraParams = LoraParams()) -> np.ndarray:
    """True 表示送往 FFT-CNN 分支; 概率按 argmax (阈值 0.5) 硬判决"""
    feats = featurize_batch(r, Modality.FFT, params)
    classes, _ = predict(h.interference_detector, feats)
    return np.asarray(classes) == INTERFERENCE


def hybnet_detect(h: HybnetModel, r: np.ndarray,
                  params: LoraParams = LoraParams()) -> DetectionResult:
    if route_batch(h, np.asarray(r)[None], params)[0]:
        return DLDetector(h.fft_cnn, Modality.FFT, params).detect(r)
    return classic.detect_coherent(r, params)


def routing_fraction(h: HybnetModel, r: np.ndarray, params: LoraParams = LoraParams()) -> float:
    """送往 CNN 分支的帧比例"""
    routed = route_batch(h, r, params)
    return float(np.mean(routed)) if routed.size else float('nan')


class HybnetDetector(Detector):
    name = 'hybnet'

    def __init__(self, h: HybnetModel, params: LoraParams = LoraParams()):
        super().__init__(params)
        self.model = h
        self.cnn = DLDetector(h.fft_cnn, Modality.FFT, params)

    def ensure_ready(self) -> None:
        if not self.model.trained:
            raise NotFittedError("HybNet 的子模型尚未训练")

    def detect_batch(self, r: np.ndarray) -> np.ndarray:
        r = np.atleast_2d(r)
        routed = route_batch(self.model, r, self.params)
        out = classic.detect_coherent_batch(r, self.params)
        if np.any(routed):
            out[routed] = self.cnn.detect_batch(r[routed])
        return out

    def detect(self, r: np.ndarray) -> DetectionResult:
        return hybnet_detect(self.model, r, self.params)
