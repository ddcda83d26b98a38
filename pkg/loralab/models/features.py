#!/usr/bin/env python3
"""
三种输入模态

 - IQ:   Re/Im 两个通道, N x 1 x 2
 - STFT: 原始 (未解线性调频) 符号的 STFT, Re/Im 两个通道, W x T x 2
 - FFT:  解线性调频后 N 点 FFT 的实部, N x 1 x 1
不做逐帧功率归一化。
"""

from enum import Enum
from typing import Tuple

import numpy as np

from loralab import config
from loralab.core.phy import LoraParams, dechirp, spectrum, stft_bins, stft_frames
from loralab.errors import DomainError
from loralab.nn.layers import get_dtype


class Modality(str, Enum):
    IQ = 'iq'
    STFT = 'stft'
    FFT = 'fft'


def modality_shape(modality: Modality, params: LoraParams = LoraParams(),
                   window_len: int = config.STFT_WINDOW,
                   overlap: int = config.STFT_OVERLAP) -> Tuple[int, int, int]:
    """网络输入形状 (H, W, C)"""
    modality = Modality(modality)
    n = params.samples_per_symbol
    if modality is Modality.IQ:
        return n, 1, 2
    if modality is Modality.STFT:
        return window_len, stft_frames(window_len, overlap, n), 2
    return n, 1, 1


def featurize_batch(r: np.ndarray, modality: Modality,
                    params: LoraParams = LoraParams()) -> np.ndarray:
    """(K, N) 复数符号 -> (K, H, W, C) 实数特征"""
    modality = Modality(modality)
    r = np.atleast_2d(np.asarray(r))
    if r.shape[-1] != params.samples_per_symbol:
        raise DomainError(f"符号长度应为 {params.samples_per_symbol}, 得到 {r.shape[-1]}")
    dtype = get_dtype()
    if modality is Modality.IQ:
        feats = np.stack([r.real, r.imag], axis=-1)[:, :, None, :]
    elif modality is Modality.STFT:
        bins = stft_bins(r)
        feats = np.stack([bins.real, bins.imag], axis=-1)
    else:
        feats = spectrum(dechirp(r, params)).real[:, :, None, None]
    return feats.astype(dtype)


def featurize(r: np.ndarray, modality: Modality,
              params: LoraParams = LoraParams()) -> np.ndarray:
    """单个符号 -> (H, W, C)"""
    r = np.asarray(r)
    if r.ndim != 1:
        raise DomainError("featurize 只接收单个符号, 批量请用 featurize_batch")
    return featurize_batch(r[None], modality, params)[0]
