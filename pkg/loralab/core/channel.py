#!/usr/bin/env python3
"""
信道混合模块

接收信号 = 同步的目标符号 + 时移的 LoRa 干扰 + 复高斯白噪声:

    r = x + sqrt(a/(g + a*g)) * x_I(t - tau) + sqrt(1/(g + a*g)) * n

其中 a 为 INR (线性), g 为 SINR (线性), 目标功率 p_s 固定为 1。
干扰与目标同频同带宽, 符号值独立均匀分布。
"""

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from loralab.core.phy import LoraParams, modulate_symbols
from loralab.errors import DomainError


def db_to_linear(value_db: float) -> float:
    """10^(x/10), 支持 +/-inf"""
    return float(np.power(10.0, value_db / 10.0))


@dataclass(frozen=True)
class ChannelConfig:
    """一次混合的全部信道参数

    inr_db = -inf 表示无干扰, sinr_db = +inf 表示无噪声无干扰;
    interferer_offset_samples 为 None 时在一个干扰符号时长内均匀抽取。
    """
    inr_db: float
    sinr_db: float
    interferer_sf: int = 7
    interferer_offset_samples: Optional[int] = None
    rng_seed: int = 0

    def __post_init__(self):
        if not 7 <= self.interferer_sf <= 12:
            raise DomainError(f"干扰扩频因子必须在 7..12 之间, 得到 {self.interferer_sf}")
        if math.isnan(self.inr_db) or math.isnan(self.sinr_db):
            raise DomainError("INR/SINR 不能为 NaN")
        if self.interferer_offset_samples is not None and self.interferer_offset_samples < 0:
            raise DomainError("干扰时移不能为负")

    @property
    def has_interferer(self) -> bool:
        return self.inr_db != -math.inf and self.sinr_db != math.inf

    def interferer_power(self) -> float:
        """p_I = a / (g (1 + a)), 相对于目标功率"""
        return mixture_coefficients(self).interferer_amp ** 2


@dataclass(frozen=True)
class MixtureCoefficients:
    interferer_amp: float
    noise_amp: float


def mixture_coefficients(cfg: ChannelConfig) -> MixtureCoefficients:
    """dB 转线性后按混合式计算干扰与噪声幅度"""
    alpha = db_to_linear(cfg.inr_db)
    gamma = db_to_linear(cfg.sinr_db)
    if math.isinf(gamma):
        return MixtureCoefficients(0.0, 0.0)
    if math.isinf(alpha):
        # 纯干扰极限: 噪声为 0, p_I = 1/g
        return MixtureCoefficients(math.sqrt(1.0 / gamma), 0.0)
    total = gamma * (1.0 + alpha)
    return MixtureCoefficients(math.sqrt(alpha / total), math.sqrt(1.0 / total))


def interferer_samples_per_symbol(cfg: ChannelConfig, params: LoraParams) -> int:
    return params.with_sf(cfg.interferer_sf).samples_per_symbol


def interferer_waveform(symbols: Sequence[int], interferer_sf: int, offset: int,
                        num_target_samples: int, params: LoraParams) -> np.ndarray:
    """由给定符号流构造时移后的干扰波形

    干扰流向后平移 offset 个采样: 干扰符号边界落在目标采样 offset, offset+N_I, ...
    offset 之前的部分取自流中的第 0 个符号 (前一个符号的尾部)。
    """
    iparams = params.with_sf(interferer_sf)
    n_i = iparams.samples_per_symbol
    if not 0 <= offset < n_i:
        raise DomainError(f"干扰时移必须在 [0, {n_i}) 之间, 得到 {offset}")
    stream = modulate_symbols(symbols, iparams).reshape(-1)
    start = (n_i - offset) % n_i
    if start + num_target_samples > stream.size:
        raise DomainError("干扰符号流长度不足以覆盖目标帧")
    return stream[start:start + num_target_samples]


def interferer_symbol_count(num_target_samples: int, n_i: int, offset: int) -> int:
    """覆盖目标帧所需的干扰符号数"""
    start = (n_i - offset) % n_i
    return max(1, -(-(start + num_target_samples) // n_i))


def make_interferer(cfg: ChannelConfig, num_target_samples: int, rng: np.random.Generator,
                    params: LoraParams) -> np.ndarray:
    """单位功率的随机 LoRa 干扰波形 (缩放前幅度为 1)"""
    n_i = interferer_samples_per_symbol(cfg, params)
    offset = cfg.interferer_offset_samples
    if offset is None:
        offset = int(rng.integers(0, n_i))
    count = interferer_symbol_count(num_target_samples, n_i, offset)
    iparams = params.with_sf(cfg.interferer_sf)
    symbols = rng.integers(0, iparams.alphabet_size, size=count)
    return interferer_waveform(symbols, cfg.interferer_sf, offset, num_target_samples, params)


def complex_awgn(shape, rng: np.random.Generator) -> np.ndarray:
    """CN(0, 1): 每个实分量方差 1/2"""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * math.sqrt(0.5)


def mix(target: np.ndarray, cfg: ChannelConfig, rng: np.random.Generator,
        params: LoraParams) -> np.ndarray:
    """target + a_I * 干扰 + a_n * 噪声; 给定 rng 状态时结果确定"""
    target = np.asarray(target)
    coeffs = mixture_coefficients(cfg)
    out = target.astype(np.complex128, copy=True)
    # 干扰与噪声的抽取顺序固定, 系数为 0 时也照常消耗随机数
    interferer = make_interferer(cfg, target.size, rng, params).reshape(target.shape)
    noise = complex_awgn(target.shape, rng)
    if coeffs.interferer_amp:
        out += coeffs.interferer_amp * interferer
    if coeffs.noise_amp:
        out += coeffs.noise_amp * noise
    return out


def mix_with_seed(target: np.ndarray, cfg: ChannelConfig, params: LoraParams) -> np.ndarray:
    """使用 cfg.rng_seed 的确定性混合"""
    return mix(target, cfg, np.random.Generator(np.random.PCG64(cfg.rng_seed)), params)


def mix_batch(targets: np.ndarray, inr_db: float, sinr_db: float, interferer_sf: int,
              rng: np.random.Generator, params: LoraParams,
              offsets: Optional[np.ndarray] = None) -> np.ndarray:
    """Monte-Carlo 用的批量混合, targets 形状 (K, N)

    每行独立抽取干扰偏移与符号 (目标一个符号最多与两个干扰符号重叠, 因为 N_I >= N)。
    """
    targets = np.asarray(targets)
    k, n = targets.shape
    cfg = ChannelConfig(inr_db=inr_db, sinr_db=sinr_db, interferer_sf=interferer_sf)
    coeffs = mixture_coefficients(cfg)
    iparams = params.with_sf(interferer_sf)
    n_i = iparams.samples_per_symbol
    if n > n_i:
        raise DomainError("干扰符号不能短于目标符号")
    if offsets is None:
        offsets = rng.integers(0, n_i, size=k)
    offsets = np.asarray(offsets, dtype=np.int64)
    symbols = rng.integers(0, iparams.alphabet_size, size=(k, 2))
    pair = modulate_symbols(symbols.reshape(-1), iparams).reshape(k, 2 * n_i)
    start = (n_i - offsets) % n_i
    idx = start[:, None] + np.arange(n)[None, :]
    interferer = np.take_along_axis(pair, idx, axis=1)
    noise = complex_awgn((k, n), rng)
    return targets + coeffs.interferer_amp * interferer + coeffs.noise_amp * noise
