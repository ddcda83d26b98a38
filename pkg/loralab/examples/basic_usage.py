#!/usr/bin/env python3
"""
LORALAB 基本使用示例
"""

import os
import sys

# 添加包路径
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

import numpy as np  # noqa: E402

from loralab.bench.ber import ber_sweep, inr_grid  # noqa: E402
from loralab.core.channel import ChannelConfig, mix  # noqa: E402
from loralab.core.classic import detect_coherent, detect_noncoherent  # noqa: E402
from loralab.core.phy import LoraParams, modulate_symbol  # noqa: E402
from loralab.core.report_generator import ReportGenerator  # noqa: E402
from loralab.data.generator import DatasetSpec, generate_dataset  # noqa: E402
from loralab.models.detectors import CoherentDetector, DLDetector, NoncoherentDetector  # noqa: E402
from loralab.models.zoo import build_fft_cnn  # noqa: E402
from loralab.nn.trainer import TrainingConfig, train  # noqa: E402
from loralab.utils.rng import make_rng  # noqa: E402


def single_symbol_example():
    """单符号调制、混合与检测"""
    print("=== 单符号检测示例 ===\n")
    params = LoraParams()
    symbol = 42
    x = modulate_symbol(symbol, params)
    cfg = ChannelConfig(inr_db=10.0, sinr_db=-5.0, interferer_sf=8)
    r = mix(x, cfg, make_rng(1), params)
    print(f"发送符号: {symbol}")
    print(f"非相干检测: {detect_noncoherent(r, params).symbol}")
    print(f"相干检测:   {detect_coherent(r, params).symbol}")


def sweep_example():
    """经典检测器的小规模 BER 扫描"""
    print("\n=== BER 扫描示例 ===\n")
    points = ber_sweep([CoherentDetector(), NoncoherentDetector()], inr_grid(-10, 20, 10),
                       sinr_db=-15.0, trials_per_point=2000, seed=7)
    report_gen = ReportGenerator("examples/output")
    csv_file = report_gen.write_ber_csv(points, "example_ber.csv")
    print(f"CSV: {csv_file}")
    print(report_gen.generate_summary_report(points))


def training_example():
    """在小数据集上训练 FFT-CNN (几轮, 仅演示流程)"""
    print("\n=== FFT-CNN 训练示例 ===\n")
    spec = DatasetSpec(num_train=2000, num_val=500, sinr_range_db=(-10.0, 0.0), rng_seed=3)
    train_set = generate_dataset(spec, split='train', progress=True)
    val_set = generate_dataset(spec, split='val', progress=True)
    model = train(build_fft_cnn(), train_set.arrays(), TrainingConfig(epochs=3),
                  validation=val_set.arrays(), progress=True)
    print(f"验证准确率: {model.history.epochs[-1].val_accuracy:.2%}")

    detector = DLDetector(model)
    symbols = np.arange(8)
    r = np.stack([modulate_symbol(m, LoraParams()) for m in symbols])
    print(f"无噪声符号 {symbols.tolist()} -> {detector.detect_batch(r).tolist()}")


if __name__ == "__main__":
    single_symbol_example()
    sweep_example()
    training_example()
