#!/usr/bin/env python3
"""
信道混合: 系数、干扰时移、功率与确定性
"""

import math

import numpy as np
import numpy.testing as npt
import pytest

from loralab.core.channel import (ChannelConfig, complex_awgn, interferer_waveform,
                                  make_interferer, mix, mix_batch, mix_with_seed,
                                  mixture_coefficients)
from loralab.core.phy import modulate_symbol, modulate_symbols
from loralab.errors import DomainError
from loralab.utils.rng import make_rng


def test_coefficients_at_zero_db():
    c = mixture_coefficients(ChannelConfig(inr_db=0.0, sinr_db=0.0))
    assert c.interferer_amp == pytest.approx(math.sqrt(0.5))
    assert c.noise_amp == pytest.approx(math.sqrt(0.5))


def test_coefficients_limits():
    clean = mixture_coefficients(ChannelConfig(inr_db=10.0, sinr_db=math.inf))
    assert (clean.interferer_amp, clean.noise_amp) == (0.0, 0.0)

    noise_only = mixture_coefficients(ChannelConfig(inr_db=-math.inf, sinr_db=10.0))
    assert noise_only.interferer_amp == 0.0
    assert noise_only.noise_amp == pytest.approx(math.sqrt(0.1))

    interference_only = mixture_coefficients(ChannelConfig(inr_db=math.inf, sinr_db=-3.0))
    assert interference_only.noise_amp == 0.0
    assert interference_only.interferer_amp ** 2 == pytest.approx(10 ** 0.3)


def test_interferer_power_matches_formula():
    cfg = ChannelConfig(inr_db=20.0, sinr_db=-10.0)
    alpha, gamma = 100.0, 0.1
    assert cfg.interferer_power() == pytest.approx(alpha / (gamma * (1 + alpha)))


def test_config_validation():
    with pytest.raises(DomainError):
        ChannelConfig(inr_db=0.0, sinr_db=0.0, interferer_sf=6)
    with pytest.raises(DomainError):
        ChannelConfig(inr_db=float('nan'), sinr_db=0.0)
    with pytest.raises(DomainError):
        ChannelConfig(inr_db=0.0, sinr_db=0.0, interferer_offset_samples=-1)


def test_interferer_offset_semantics(params):
    w = interferer_waveform([3, 5], 7, 10, 128, params)
    npt.assert_allclose(w[:10], modulate_symbol(3, params)[118:])
    npt.assert_allclose(w[10:], modulate_symbol(5, params)[:118])


def test_interferer_zero_offset_is_aligned(params):
    w = interferer_waveform([9], 7, 0, 128, params)
    npt.assert_allclose(w, modulate_symbol(9, params))


def test_interferer_offset_range(params):
    with pytest.raises(DomainError):
        interferer_waveform([1, 2], 7, 128, 128, params)


def test_make_interferer_draws_symbols_from_rng(params):
    cfg = ChannelConfig(inr_db=0.0, sinr_db=0.0, interferer_sf=8, interferer_offset_samples=10)
    w = make_interferer(cfg, 128, make_rng(3), params)
    # N_I = 256, 起点 246: 需要两个 SF8 符号
    symbols = make_rng(3).integers(0, 256, size=2)
    npt.assert_allclose(w, interferer_waveform(symbols, 8, 10, 128, params))
    npt.assert_allclose(np.abs(w), 1.0)

    drawn = make_interferer(ChannelConfig(inr_db=0.0, sinr_db=0.0), 128, make_rng(4), params)
    assert drawn.shape == (128,)
    npt.assert_allclose(np.abs(drawn), 1.0)


def test_clean_channel_returns_target(params, rng):
    x = modulate_symbol(17, params)
    r = mix(x, ChannelConfig(inr_db=30.0, sinr_db=math.inf), rng, params)
    npt.assert_array_equal(r, x)


def test_mix_is_deterministic(params):
    x = modulate_symbol(64, params)
    cfg = ChannelConfig(inr_db=5.0, sinr_db=-5.0, interferer_sf=8)
    npt.assert_array_equal(mix(x, cfg, make_rng(5), params), mix(x, cfg, make_rng(5), params))
    assert not np.array_equal(mix(x, cfg, make_rng(5), params), mix(x, cfg, make_rng(6), params))


def test_mix_with_seed_uses_config_seed(params):
    x = modulate_symbol(1, params)
    cfg = ChannelConfig(inr_db=0.0, sinr_db=0.0, rng_seed=42)
    npt.assert_array_equal(mix_with_seed(x, cfg, params), mix(x, cfg, make_rng(42), params))


@pytest.mark.parametrize("inr_db,sinr_db", [(0.0, 10.0), (20.0, -5.0), (-math.inf, 3.0)])
def test_disturbance_power(params, rng, inr_db, sinr_db):
    symbols = rng.integers(0, 128, size=4000)
    x = modulate_symbols(symbols, params)
    r = mix_batch(x, inr_db, sinr_db, 7, rng, params)
    power = np.mean(np.abs(r - x) ** 2)
    assert power == pytest.approx(10 ** (-sinr_db / 10), rel=0.03)


def test_mix_batch_interferer_sf_must_cover_target(params, rng):
    x = modulate_symbols([0, 1], params.with_sf(8))
    with pytest.raises(DomainError):
        mix_batch(x, 0.0, 0.0, 7, rng, params.with_sf(8))


def test_interferer_has_unit_mean_power(params):
    cfg = ChannelConfig(inr_db=0.0, sinr_db=0.0, interferer_sf=8)
    w = make_interferer(cfg, 10_000, make_rng(11), params)
    assert w.shape == (10_000,)
    assert np.mean(np.abs(w) ** 2) == pytest.approx(1.0, abs=0.01)


def test_noise_is_circular(params):
    cfg = ChannelConfig(inr_db=-math.inf, sinr_db=-3.0)
    amp = mixture_coefficients(cfg).noise_amp
    noise = mix(np.zeros((800, 128), dtype=complex), cfg, make_rng(12), params).reshape(-1)
    assert np.var(noise.real) == pytest.approx(amp ** 2 / 2, rel=0.02)
    assert np.var(noise.imag) == pytest.approx(amp ** 2 / 2, rel=0.02)
    assert abs(np.mean(noise.real * noise.imag)) < 0.02 * amp ** 2
    assert abs(np.mean(noise ** 2)) < 0.02 * amp ** 2


@pytest.mark.parametrize("inr_db,sinr_db", [(10.0, -15.0), (-5.0, -10.0), (0.0, 0.0)])
def test_interferer_and_noise_powers_match_formula(params, inr_db, sinr_db):
    cfg = ChannelConfig(inr_db=inr_db, sinr_db=sinr_db)
    alpha, gamma = 10 ** (inr_db / 10), 10 ** (sinr_db / 10)
    coeffs = mixture_coefficients(cfg)
    target = np.zeros((80, 128), dtype=complex)
    # 与 mix 相同的抽取顺序: 先干扰后噪声
    rng = make_rng(13)
    interferer = coeffs.interferer_amp * make_interferer(cfg, target.size, rng, params)
    noise = coeffs.noise_amp * complex_awgn(target.shape, rng).reshape(-1)
    r = mix(target, cfg, make_rng(13), params).reshape(-1)
    npt.assert_allclose(r, interferer + noise)

    assert np.mean(np.abs(interferer) ** 2) == pytest.approx(alpha / (gamma * (1 + alpha)),
                                                             rel=0.01)
    assert np.mean(np.abs(noise) ** 2) == pytest.approx(1 / (gamma * (1 + alpha)), rel=0.04)
