#!/usr/bin/env python3
"""
IQ-CNN、STFT-CNN、FFT-CNN 与干扰检测网络的结构

每个卷积层后接批归一化与 ReLU, 卷积堆叠之后是一个 2x1 最大池化、dropout、
全连接与 softmax。卷积深度可调, 用于深度对比实验。
"""

from typing import Callable, Dict, List, Tuple

from loralab import config
from loralab.core.phy import LoraParams
from loralab.models.features import Modality, modality_shape
from loralab.nn import network as nets
from loralab.nn.network import LayerSpec, NetworkSpec

INTERFERENCE_CLASSES = ('noise_only', 'interference')


def _stack(filters: int, kernel: Tuple[int, int], depth: int, rate: float,
           classes: int) -> List[LayerSpec]:
    stack: List[LayerSpec] = []
    for _ in range(depth):
        stack += [nets.conv(filters, kernel), nets.batchnorm(), nets.relu()]
    stack += [nets.maxpool((2, 1)), nets.dropout(rate), nets.dense(classes), nets.softmax()]
    return stack


def build_iq_cnn(conv_depth: int = 4, params: LoraParams = LoraParams()) -> NetworkSpec:
    """IQ-CNN: 8 个 5x1 滤波器, dropout 0.36"""
    return NetworkSpec(name='iq_cnn', input_shape=modality_shape(Modality.IQ, params),
                       layers=tuple(_stack(8, (5, 1), conv_depth, 0.36, params.alphabet_size)),
                       lr_initial=config.LEARNING_RATES['iq'], modality=Modality.IQ.value)


def build_stft_cnn(conv_depth: int = 3, params: LoraParams = LoraParams()) -> NetworkSpec:
    """STFT-CNN: 9 个 7x7 滤波器, dropout 0.37"""
    return NetworkSpec(name='stft_cnn', input_shape=modality_shape(Modality.STFT, params),
                       layers=tuple(_stack(9, (7, 7), conv_depth, 0.37, params.alphabet_size)),
                       lr_initial=config.LEARNING_RATES['stft'], modality=Modality.STFT.value)


def build_fft_cnn(conv_depth: int = 4, params: LoraParams = LoraParams()) -> NetworkSpec:
    """FFT-CNN: 8 个 19x1 滤波器, dropout 0.24"""
    return NetworkSpec(name='fft_cnn', input_shape=modality_shape(Modality.FFT, params),
                       layers=tuple(_stack(8, (19, 1), conv_depth, 0.24, params.alphabet_size)),
                       lr_initial=config.LEARNING_RATES['fft'], modality=Modality.FFT.value)


def build_interference_detector(params: LoraParams = LoraParams()) -> NetworkSpec:
    """干扰检测网络: 2 层 4 个 19x1 滤波器, dropout 0.30, 两类输出"""
    return NetworkSpec(name='interference_detector',
                       input_shape=modality_shape(Modality.FFT, params),
                       layers=tuple(_stack(4, (19, 1), 2, 0.30, len(INTERFERENCE_CLASSES))),
                       lr_initial=config.LEARNING_RATES['intdet'], modality=Modality.FFT.value)


BUILDERS: Dict[str, Callable[..., NetworkSpec]] = {
    'iq': build_iq_cnn,
    'stft': build_stft_cnn,
    'fft': build_fft_cnn,
    'intdet': build_interference_detector,
}

NET_MODALITY = {
    'iq': Modality.IQ,
    'stft': Modality.STFT,
    'fft': Modality.FFT,
    'intdet': Modality.FFT,
}
