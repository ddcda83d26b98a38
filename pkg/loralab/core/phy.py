#!/usr/bin/env python3
"""
LoRa CSS 物理层信号数学

调制、解线性调频 (dechirp)、FFT 频谱与 STFT 时频图。全部为复基带运算,
不涉及载波频率。所有函数都是输入的纯函数。

离散化约定:
 - 相位 = 瞬时频率在 fs 下的累加和, 先对频率做 mod B 折叠再积分, 保证相位连续;
 - FFT 采用未归一化的正变换, 第 i 个频点对应频率 i*fs/N;
 - Hamming 窗取对称定义 g[n] = 0.54 - 0.46*cos(2*pi*n/(W-1))。
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Union

import numpy as np
from scipy.signal import get_window

from loralab import config
from loralab.errors import DomainError

SymbolLike = Union[int, np.integer]


@dataclass(frozen=True)
class LoraParams:
    """静态调制参数 (SF, B, fs), 其余量均由它们导出"""
    sf: int = config.SPREADING_FACTOR
    bandwidth_hz: float = config.BANDWIDTH_HZ
    sample_rate_hz: float = config.SAMPLE_RATE_HZ

    def __post_init__(self):
        if int(self.sf) != self.sf or not 7 <= self.sf <= 12:
            raise DomainError(f"扩频因子必须在 7..12 之间, 得到 {self.sf}")
        if self.bandwidth_hz <= 0 or self.sample_rate_hz <= 0:
            raise DomainError("带宽与采样率必须为正")
        ratio = self.sample_rate_hz / self.bandwidth_hz
        if ratio < 1 or abs(ratio - round(ratio)) > 1e-9:
            raise DomainError("采样率必须是带宽的整数倍")

    @property
    def alphabet_size(self) -> int:
        return 1 << int(self.sf)

    @property
    def oversampling(self) -> int:
        return int(round(self.sample_rate_hz / self.bandwidth_hz))

    @property
    def samples_per_symbol(self) -> int:
        return self.alphabet_size * self.oversampling

    @property
    def symbol_time_s(self) -> float:
        return self.alphabet_size / self.bandwidth_hz

    @property
    def freq_step_hz(self) -> float:
        return self.bandwidth_hz / self.alphabet_size

    @property
    def chirp_rate_hz_per_s(self) -> float:
        return self.bandwidth_hz / self.symbol_time_s

    def with_sf(self, sf: int) -> 'LoraParams':
        """相同 B 与 fs, 不同 SF (用于干扰信号)"""
        return LoraParams(sf=sf, bandwidth_hz=self.bandwidth_hz,
                          sample_rate_hz=self.sample_rate_hz)


@dataclass(frozen=True)
class Spectrogram:
    """W 行 x T 列的复数 STFT 矩阵"""
    bins: np.ndarray
    window_len: int
    overlap: int

    @property
    def shape(self):
        return self.bins.shape


def _check_symbols(ms: np.ndarray, params: LoraParams) -> np.ndarray:
    ms = np.asarray(ms)
    if ms.size and (not np.issubdtype(ms.dtype, np.integer)):
        if np.any(ms != np.floor(ms)):
            raise DomainError("符号值必须为整数")
        ms = ms.astype(np.int64)
    if np.any(ms < 0) or np.any(ms >= params.alphabet_size):
        raise DomainError(f"符号值必须在 [0, {params.alphabet_size - 1}] 之间")
    return ms.astype(np.int64)


def modulate_symbols(ms: Sequence[SymbolLike], params: LoraParams) -> np.ndarray:
    """批量调制, 返回 (K, N) 复数数组, 每行是一个独立的符号"""
    ms = _check_symbols(np.atleast_1d(ms), params)
    n = np.arange(params.samples_per_symbol)
    t = n / params.sample_rate_hz
    B = params.bandwidth_hz
    zeta = ms[:, None] * params.freq_step_hz
    # 瞬时频率: (beta*t + zeta) mod B - B/2
    freq = np.mod(params.chirp_rate_hz_per_s * t[None, :] + zeta, B) - B / 2
    # 相位[0] = 0, 相位[n] = 2*pi*sum_{i<n} f[i]/fs
    steps = 2 * np.pi * freq / params.sample_rate_hz
    phase = np.zeros_like(steps)
    np.cumsum(steps[:, :-1], axis=1, out=phase[:, 1:])
    return np.exp(1j * phase)


def modulate_symbol(m: SymbolLike, params: LoraParams) -> np.ndarray:
    """调制单个符号, 长度 N 的单位模复向量"""
    if np.ndim(m) != 0:
        raise DomainError("modulate_symbol 只接收单个符号值")
    return modulate_symbols([m], params)[0]


def modulate_message(ms: Sequence[SymbolLike], params: LoraParams) -> np.ndarray:
    """K 个符号首尾相接, 第 k 个符号占据 [k*N, (k+1)*N)"""
    if len(ms) == 0:
        raise DomainError("消息不能为空")
    return modulate_symbols(ms, params).reshape(-1)


@lru_cache(maxsize=None)
def _downchirp(params: LoraParams) -> np.ndarray:
    chirp = np.conj(modulate_symbol(0, params))
    chirp.setflags(write=False)
    return chirp


def downchirp(params: LoraParams) -> np.ndarray:
    """零频移的反向 chirp, 取为 modulate_symbol(0) 的复共轭"""
    return _downchirp(params).copy()


def dechirp(r: np.ndarray, params: LoraParams) -> np.ndarray:
    """逐点乘以反向 chirp; 接受 (N,) 或 (K, N)"""
    r = np.asarray(r)
    if r.shape[-1] != params.samples_per_symbol:
        raise DomainError(
            f"符号长度应为 {params.samples_per_symbol}, 得到 {r.shape[-1]}")
    return r * _downchirp(params)


def spectrum(z: np.ndarray) -> np.ndarray:
    """N 点未归一化 DFT (沿最后一维)"""
    return np.fft.fft(z, axis=-1)


@lru_cache(maxsize=None)
def hamming(window_len: int) -> np.ndarray:
    window = get_window('hamming', window_len, fftbins=False)
    window.setflags(write=False)
    return window


def stft_frames(window_len: int, overlap: int, length: int) -> int:
    """帧数 T = (N - L) / (W - L), 不能整除时报错"""
    if window_len <= overlap or overlap < 0:
        raise DomainError("窗长必须大于重叠长度")
    if window_len > length:
        raise DomainError("窗长超过符号长度")
    hop = window_len - overlap
    if (length - overlap) % hop:
        raise DomainError(f"(N - L) = {length - overlap} 不能被 (W - L) = {hop} 整除")
    return (length - overlap) // hop


def stft_bins(r: np.ndarray, window_len: int = config.STFT_WINDOW,
              overlap: int = config.STFT_OVERLAP) -> np.ndarray:
    """批量 STFT, (..., N) -> (..., W, T)"""
    r = np.asarray(r)
    frames = stft_frames(window_len, overlap, r.shape[-1])
    hop = window_len - overlap
    windows = np.lib.stride_tricks.sliding_window_view(r, window_len, axis=-1)
    windows = windows[..., ::hop, :][..., :frames, :]
    bins = np.fft.fft(windows * hamming(window_len), axis=-1)
    return np.swapaxes(bins, -1, -2)


def stft(r: np.ndarray, window_len: int = config.STFT_WINDOW,
         overlap: int = config.STFT_OVERLAP) -> Spectrogram:
    """单符号 STFT, 第 p 帧覆盖 [p*(W-L), p*(W-L)+W)"""
    r = np.asarray(r)
    if r.ndim != 1:
        raise DomainError("stft 只接收单个符号, 批量请用 stft_bins")
    return Spectrogram(bins=stft_bins(r, window_len, overlap),
                       window_len=window_len, overlap=overlap)
