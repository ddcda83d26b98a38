#!/usr/bin/env python3
"""
输入模态、检测器接口与 HybNet 路由
"""

import math

import numpy as np
import numpy.testing as npt
import pytest

from loralab.core.channel import complex_awgn
from loralab.core.classic import detect_coherent_batch
from loralab.core.phy import dechirp, modulate_message, modulate_symbols
from loralab.errors import DomainError, NotFittedError
from loralab.models.detectors import (CoherentDetector, Detector, DLDetector, NoncoherentDetector,
                                      detect_dl, detect_packet)
from loralab.models.features import Modality, featurize, featurize_batch, modality_shape
from loralab.models.hybnet import (HybnetDetector, HybnetModel, hybnet_detect, route_batch,
                                   routing_fraction)
from loralab.models.zoo import build_fft_cnn, build_interference_detector, build_iq_cnn
from loralab.nn.network import Network


def warmed_network(spec, seed=0):
    network = Network(spec).init(np.random.default_rng(seed))
    rng = np.random.default_rng(seed + 1)
    r = complex_awgn((32, 128), rng)
    network.warm_up(featurize_batch(r, Modality(spec.modality)))
    return network


def set_dense_bias(network, bias):
    index = [layer.kind for layer in network.spec.layers].index('dense')
    network.params[index]['w'][...] = 0
    network.params[index]['b'][...] = bias


@pytest.fixture
def received(params, rng):
    symbols = rng.integers(0, 128, size=40)
    r = modulate_symbols(symbols, params) + 0.5 * complex_awgn((40, 128), rng)
    return symbols, r


def test_modality_shapes(params):
    assert modality_shape(Modality.IQ, params) == (128, 1, 2)
    assert modality_shape(Modality.STFT, params) == (64, 65, 2)
    assert modality_shape(Modality.FFT, params) == (128, 1, 1)
    assert modality_shape('fft', params.with_sf(9)) == (512, 1, 1)


def test_features(params, received):
    _, r = received
    iq = featurize_batch(r, Modality.IQ, params)
    npt.assert_allclose(iq[:, :, 0, 0], r.real, rtol=1e-6)
    npt.assert_allclose(iq[:, :, 0, 1], r.imag, rtol=1e-6)
    fft = featurize(r[0], Modality.FFT, params)
    assert fft.dtype == np.float32
    npt.assert_allclose(fft[:, 0, 0], np.fft.fft(dechirp(r[0], params)).real,
                        rtol=1e-5, atol=1e-4)
    assert featurize(r[0], Modality.STFT, params).shape == (64, 65, 2)


def test_featurize_checks_length(params):
    with pytest.raises(DomainError):
        featurize(np.ones(64, dtype=complex), Modality.FFT, params)
    with pytest.raises(ValueError):
        featurize_batch(np.ones((1, 128), dtype=complex), 'spectrogram', params)


def test_classic_detectors_share_interface(params, received):
    symbols, r = received
    clean = modulate_symbols(symbols, params)
    for detector in (CoherentDetector(params), NoncoherentDetector(params)):
        npt.assert_array_equal(detector.detect_batch(clean), symbols)
        assert detector.detect(clean[3]).symbol == symbols[3]
        detector.ensure_ready()
    assert CoherentDetector.name == 'coherent'


def test_detection_score_is_winning_metric(params, received):
    _, r = received
    y = np.fft.fft(dechirp(r[0], params))
    coherent = CoherentDetector(params).detect(r[0])
    assert coherent.score == pytest.approx(y.real[coherent.symbol])
    assert coherent.score == pytest.approx(y.real.max())
    noncoherent = NoncoherentDetector(params).detect(r[0])
    assert noncoherent.score == pytest.approx(np.abs(y).max())

    network = warmed_network(build_fft_cnn())
    result = DLDetector(network).detect(r[0])
    probs = DLDetector(network).probabilities(r[:1])[0]
    assert result.score == pytest.approx(float(probs.max()))


def test_batch_only_detector_has_no_score(params, received):
    class FirstBin(Detector):
        name = 'first_bin'

        def detect_batch(self, r):
            return np.zeros(len(r), dtype=np.int64)

    _, r = received
    result = FirstBin(params).detect(r[0])
    assert result.symbol == 0
    assert math.isnan(result.score)


def test_dl_detector_checks_modality_and_training():
    network = warmed_network(build_fft_cnn())
    with pytest.raises(DomainError):
        DLDetector(network, Modality.IQ)
    detector = DLDetector(network)
    assert detector.name == 'fft_cnn'
    with pytest.raises(NotFittedError):
        detector.ensure_ready()
    network.trained = True
    detector.ensure_ready()


def test_dl_detector_needs_statistics(params):
    network = Network(build_iq_cnn()).init(np.random.default_rng(0))
    with pytest.raises(NotFittedError):
        DLDetector(network).detect_batch(modulate_symbols([1, 2], params))


def test_detect_dl_returns_probability(params, received):
    _, r = received
    result = detect_dl(warmed_network(build_fft_cnn()), r[0], Modality.FFT, params)
    assert 0 <= result.symbol < 128
    assert 0.0 < result.score <= 1.0


def test_detect_packet(params):
    symbols = [5, 100, 0, 127, 64]
    packet = modulate_message(symbols, params)
    npt.assert_array_equal(detect_packet(CoherentDetector(params), packet), symbols)
    with pytest.raises(DomainError):
        detect_packet(CoherentDetector(params), packet[:-1])
    with pytest.raises(DomainError):
        detect_packet(CoherentDetector(params), packet[:0])


def test_hybnet_requires_fft_submodels():
    fft = warmed_network(build_fft_cnn())
    with pytest.raises(DomainError):
        HybnetModel(warmed_network(build_iq_cnn()), fft)
    with pytest.raises(DomainError):
        HybnetModel(fft, fft)


def test_hybnet_routes_to_coherent(params, received):
    symbols, r = received
    intdet = warmed_network(build_interference_detector())
    set_dense_bias(intdet, [50.0, -50.0])
    h = HybnetModel(intdet, warmed_network(build_fft_cnn(), seed=3))
    assert not np.any(route_batch(h, r, params))
    assert routing_fraction(h, r, params) == 0.0
    detector = HybnetDetector(h, params)
    npt.assert_array_equal(detector.detect_batch(r), detect_coherent_batch(r, params))
    assert detector.detect(r[0]).symbol == int(detect_coherent_batch(r[:1], params)[0])


def test_hybnet_routes_to_cnn(params, received):
    _, r = received
    intdet = warmed_network(build_interference_detector())
    set_dense_bias(intdet, [-50.0, 50.0])
    fft = warmed_network(build_fft_cnn(), seed=3)
    h = HybnetModel(intdet, fft)
    assert routing_fraction(h, r, params) == 1.0
    npt.assert_array_equal(HybnetDetector(h, params).detect_batch(r),
                           DLDetector(fft).detect_batch(r))
    assert hybnet_detect(h, r[1], params).symbol == DLDetector(fft).detect(r[1]).symbol


def test_hybnet_needs_both_models_trained():
    intdet = warmed_network(build_interference_detector())
    fft = warmed_network(build_fft_cnn())
    detector = HybnetDetector(HybnetModel(intdet, fft))
    with pytest.raises(NotFittedError):
        detector.ensure_ready()
    intdet.trained = fft.trained = True
    detector.ensure_ready()
