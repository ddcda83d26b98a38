#!/usr/bin/env python3
"""
BER 扫描、AWGN 对照、包络检查与复杂度
"""

import math

import numpy as np
import pytest

from loralab.bench.ber import (AwgnPoint, BerPoint, awgn_sweep, ber_sweep, classifier_accuracy,
                               inr_grid, read_ber_csv, routing_sweep)
from loralab.bench.complexity import (depth_study, fit_timing, layer_costs, theoretical_cost,
                                      timing_bench, timing_detectors)
from loralab.bench.envelope import hybnet_envelope_check
from loralab.core.channel import complex_awgn
from loralab.core.report_generator import ReportGenerator
from loralab.data.generator import DatasetSpec, generate_dataset
from loralab.errors import DomainError, FormatError, NotFittedError
from loralab.models.detectors import CoherentDetector, DLDetector, NoncoherentDetector
from loralab.models.features import Modality, featurize_batch
from loralab.models.hybnet import HybnetModel
from loralab.models.zoo import (build_fft_cnn, build_interference_detector, build_iq_cnn,
                                build_stft_cnn)
from loralab.nn.network import Network
from loralab.nn.trainer import TrainingConfig


def classic():
    return [CoherentDetector(), NoncoherentDetector()]


def warmed(spec, seed=0):
    network = Network(spec).init(np.random.default_rng(seed))
    r = complex_awgn((32, 128), np.random.default_rng(seed + 1))
    network.warm_up(featurize_batch(r, Modality(spec.modality)))
    return network


def hybnet_with_bias(bias):
    intdet = warmed(build_interference_detector())
    index = [layer.kind for layer in intdet.spec.layers].index('dense')
    intdet.params[index]['w'][...] = 0
    intdet.params[index]['b'][...] = bias
    return HybnetModel(intdet, warmed(build_fft_cnn(), seed=2))


# -------------------- BER 扫描 --------------------

def test_inr_grid():
    grid = inr_grid(-10, 30, 2.5)
    assert len(grid) == 17
    assert grid[0] == -10.0 and grid[-1] == 30.0
    assert inr_grid(0, 0, 1) == [0.0]
    with pytest.raises(DomainError):
        inr_grid(0, 10, 0)


def test_ber_point_conversion():
    point = BerPoint('coherent', 0.0, -15.0, 7, trials=1270, symbol_errors=127)
    assert point.ser == pytest.approx(0.1)
    assert point.ber == pytest.approx(0.1 * 64 / 127)
    assert point.ber_sigma == pytest.approx(math.sqrt(0.09 / 1270) * 64 / 127)
    with pytest.raises(DomainError):
        BerPoint('coherent', 0.0, -15.0, 7, trials=10, symbol_errors=11)


def test_sweep_requires_enough_trials():
    with pytest.raises(DomainError):
        ber_sweep(classic(), [0.0], trials_per_point=999)


def test_sweep_rejects_untrained_models():
    untrained = DLDetector(warmed(build_fft_cnn()))
    with pytest.raises(NotFittedError):
        ber_sweep([CoherentDetector(), untrained], [0.0], trials_per_point=1000)


def test_sweep_rejects_duplicate_names():
    with pytest.raises(DomainError):
        ber_sweep([CoherentDetector(), CoherentDetector()], [0.0], trials_per_point=1000)


def test_clean_channel_has_zero_ber():
    points = ber_sweep(classic(), [0.0, 20.0], sinr_db=math.inf, trials_per_point=1000)
    assert len(points) == 4
    assert all(p.symbol_errors == 0 and p.ber == 0.0 for p in points)


def test_sweep_is_deterministic():
    kwargs = dict(sinr_db=-10.0, trials_per_point=1000, seed=3)
    a = ber_sweep(classic(), [-10.0, 10.0], **kwargs)
    b = ber_sweep(classic(), [-10.0, 10.0], **kwargs)
    c = ber_sweep(classic(), [-10.0, 10.0], workers=2, **kwargs)
    assert a == b == c


def test_paired_sweep_is_independent_of_detector_set():
    kwargs = dict(sinr_db=-10.0, trials_per_point=1000, seed=5)
    alone = ber_sweep(CoherentDetector(), [5.0], **kwargs)
    together = ber_sweep(classic(), [5.0], **kwargs)
    assert alone[0] == together[0]


def test_unpaired_sweep_uses_own_streams():
    kwargs = dict(sinr_db=-10.0, trials_per_point=1000, seed=5, paired=False)
    points = ber_sweep(classic(), [5.0], **kwargs)
    assert [p.detector for p in points] == ['coherent', 'noncoherent']
    assert points == ber_sweep(classic(), [5.0], **kwargs)


def test_strong_interference_degrades_classic_detectors():
    points = ber_sweep(classic(), [-10.0, 20.0], sinr_db=-10.0, trials_per_point=2000, seed=1)
    ber = {(p.detector, p.inr_db): p.ber for p in points}
    for name in ('coherent', 'noncoherent'):
        assert ber[(name, 20.0)] > ber[(name, -10.0)]
    assert ber[('noncoherent', 20.0)] > 0.1


def test_ber_csv_round_trip(tmp_path):
    points = ber_sweep(classic(), [-10.0, 2.5], sinr_db=-12.0, trials_per_point=1000)
    path = ReportGenerator(str(tmp_path)).write_ber_csv(points, "ber.csv")
    with open(path, encoding='ascii') as f:
        assert f.readline().strip() == (
            "detector,inr_db,sinr_db,interferer_sf,trials,symbol_errors,ber,ber_sigma")
    assert read_ber_csv(path) == points


def test_ber_csv_rejects_bad_input(tmp_path):
    bad_header = tmp_path / "bad_header.csv"
    bad_header.write_text("name,inr\ncoherent,0\n")
    with pytest.raises(FormatError):
        read_ber_csv(str(bad_header))
    bad_row = tmp_path / "bad_row.csv"
    bad_row.write_text("detector,inr_db,sinr_db,interferer_sf,trials,symbol_errors,ber,ber_sigma\n"
                       "coherent,zero,-15,7,1000,3,0,0\n")
    with pytest.raises(FormatError):
        read_ber_csv(str(bad_row))


def test_ber_csv_alphabet_size_comes_from_file(tmp_path):
    sf9 = [BerPoint('coherent', 0.0, -15.0, 9, trials=1000, symbol_errors=40, alphabet_size=512),
           BerPoint('coherent', 5.0, -15.0, 9, trials=1000, symbol_errors=0, alphabet_size=512)]
    path = ReportGenerator(str(tmp_path)).write_ber_csv(sf9, "sf9.csv")
    loaded = read_ber_csv(path)
    assert loaded == sf9
    assert {p.alphabet_size for p in loaded} == {512}
    with pytest.raises(FormatError):
        read_ber_csv(path, alphabet_size=128)

    silent = [BerPoint('coherent', 0.0, -15.0, 7, trials=1000, symbol_errors=0)]
    path = ReportGenerator(str(tmp_path)).write_ber_csv(silent, "silent.csv")
    assert read_ber_csv(path)[0].alphabet_size == 128
    assert read_ber_csv(path, alphabet_size=256)[0].alphabet_size == 256


def test_ber_csv_rejects_inconsistent_ber(tmp_path):
    header = "detector,inr_db,sinr_db,interferer_sf,trials,symbol_errors,ber,ber_sigma\n"
    mixed = tmp_path / "mixed.csv"
    mixed.write_text(header + "coherent,0,-15,7,1000,127,6.400000e-02,0\n"
                     "fft_cnn,0,-15,7,1000,511,2.560000e-01,0\n")
    with pytest.raises(FormatError):
        read_ber_csv(str(mixed))
    edited = tmp_path / "edited.csv"
    edited.write_text(header + "coherent,0,-15,7,1000,127,6.400000e-02,0\n"
                      "coherent,5,-15,7,1000,100,9.000000e-02,0\n")
    with pytest.raises(FormatError):
        read_ber_csv(str(edited))


# -------------------- AWGN 对照 --------------------

def test_awgn_point_oracle_check():
    point = AwgnPoint('coherent', 10.0, trials=10_000, symbol_errors=110, oracle_ser=0.01)
    assert point.within_3_sigma
    assert not AwgnPoint('coherent', 10.0, 10_000, 200, 0.01).within_3_sigma
    assert AwgnPoint('fft_cnn', 10.0, 10_000, 200, None).within_3_sigma is None


@pytest.mark.slow
def test_awgn_matches_theory():
    points = awgn_sweep(classic(), [8.0, 11.0], trials=20_000, seed=2)
    assert len(points) == 4
    for point in points:
        assert point.within_3_sigma, point
    ser = {(p.detector, p.es_n0_db): p.ser for p in points}
    for es_n0 in (8.0, 11.0):
        assert ser[('coherent', es_n0)] <= ser[('noncoherent', es_n0)]


# -------------------- 包络检查 --------------------

def envelope_points(hybnet_errors, trials=(10_000, 10_000, 10_000)):
    points = []
    for inr in (0.0, 10.0):
        for name, errors, n in zip(('coherent', 'fft_cnn', 'hybnet'),
                                   (100, 50, hybnet_errors), trials):
            points.append(BerPoint(name, inr, -15.0, 7, trials=n, symbol_errors=errors))
    points.append(BerPoint('noncoherent', 0.0, -15.0, 7, trials=10_000, symbol_errors=400))
    return points


def test_envelope_passes_near_best_detector():
    report = hybnet_envelope_check(envelope_points(60), margin=0.25)
    assert len(report.rows) == 2
    assert report.pass_fraction == 1.0
    assert report.accepted()
    row = report.rows[0]
    sigma = math.sqrt((0.006 * 0.994) / 10_000) * 64 / 127
    assert row.bound == pytest.approx(1.25 * 0.005 * 64 / 127 + 3 * sigma)


def test_envelope_flags_violations():
    report = hybnet_envelope_check(envelope_points(500))
    assert report.pass_fraction == 0.0
    assert not report.accepted()
    assert len(report.failed_rows) == 2
    assert report.to_dict()['points'][0]['passed'] is False


def test_envelope_requires_paired_results():
    with pytest.raises(DomainError):
        hybnet_envelope_check(envelope_points(60, trials=(10_000, 10_000, 5_000)))
    missing = [p for p in envelope_points(60) if p.detector != 'fft_cnn']
    with pytest.raises(DomainError):
        hybnet_envelope_check(missing)
    with pytest.raises(DomainError):
        hybnet_envelope_check(envelope_points(60), margin=-0.1)


# -------------------- 干扰检测与路由 --------------------

def test_routing_sweep_follows_classifier():
    to_cnn = routing_sweep(hybnet_with_bias([-50.0, 50.0]), [-10.0, 20.0], trials=1000)
    assert to_cnn == {-10.0: 1.0, 20.0: 1.0}
    to_coherent = routing_sweep(hybnet_with_bias([50.0, -50.0]), [0.0], trials=1000)
    assert to_coherent == {0.0: 0.0}


def test_classifier_accuracy_uses_sir_margin():
    spec = DatasetSpec(num_train=40, num_val=10, task='interference', rng_seed=4)
    records = generate_dataset(spec)
    model = warmed(build_interference_detector())
    score = classifier_accuracy(model, records, sir_margin_db=6.0)
    assert 0 < score.evaluated <= score.total == 40
    assert 0.0 <= score.accuracy <= 1.0
    iq = generate_dataset(DatasetSpec(num_train=4, num_val=2, modality=Modality.IQ))
    with pytest.raises(DomainError):
        classifier_accuracy(model, iq)


# -------------------- 复杂度与计时 --------------------

def test_theoretical_cost_values():
    fft = build_fft_cnn()
    assert layer_costs(fft)[0] == 19_456
    assert theoretical_cost(fft) == 486_400
    assert theoretical_cost(fft, 20) == 20 * 486_400
    assert theoretical_cost(fft, 0) == 0
    assert theoretical_cost(build_stft_cnn()) > 10 * theoretical_cost(fft)
    assert theoretical_cost(build_iq_cnn()) < theoretical_cost(fft)
    with pytest.raises(DomainError):
        theoretical_cost(fft, -1)


def test_timing_bench_and_fit():
    detectors = timing_detectors(['fft', 'hybnet'], seed=1)
    assert [d.name for d in detectors] == ['fft_cnn', 'hybnet']
    points = timing_bench(detectors, [1, 3], repeats=1)
    assert len(points) == 4
    assert all(p.wall_time_s > 0 for p in points)
    fits = fit_timing(points)
    assert set(fits) == {'fft_cnn', 'hybnet'}
    with pytest.raises(DomainError):
        timing_detectors(['resnet'])
    with pytest.raises(DomainError):
        timing_bench(detectors, [0])


@pytest.mark.slow
def test_timing_is_linear_and_stft_is_slowest():
    detectors = timing_detectors(['iq', 'stft', 'fft'], seed=2)
    points = timing_bench(detectors, [1, 10, 100, 1000], repeats=3, seed=2)
    assert len(points) == 12
    fits = fit_timing(points)
    assert set(fits) == {'iq_cnn', 'stft_cnn', 'fft_cnn'}
    for name, fit in fits.items():
        assert fit.r_squared >= 0.99, (name, fit)
        assert fit.slope > 0, name
    slowest = max(fits, key=lambda name: fits[name].slope)
    assert slowest == 'stft_cnn'


@pytest.mark.slow
def test_depth_study():
    spec = DatasetSpec(num_train=64, num_val=32, rng_seed=8)
    train_set = generate_dataset(spec, split='train')
    val_set = generate_dataset(spec, split='val')
    results = depth_study(Modality.FFT, [1, 2], train_set, val_set,
                          TrainingConfig(epochs=1, minibatch=32), packet_symbols=4, repeats=1)
    assert [r.conv_depth for r in results] == [1, 2]
    assert results[0].parameters < results[1].parameters
    assert results[0].cost_per_symbol == 19_456
    assert all(0.0 <= r.val_accuracy <= 1.0 for r in results)
    with pytest.raises(DomainError):
        depth_study(Modality.IQ, [1], train_set, val_set)
