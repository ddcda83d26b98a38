#!/usr/bin/env python3
"""
默认参数

LoRa 参数、训练选项、各网络初始学习率、数据集与扫描的默认值。
命令行参数可以覆盖这里的所有取值。
"""

# LoRa 物理层
SPREADING_FACTOR = 7
BANDWIDTH_HZ = 125e3
SAMPLE_RATE_HZ = 125e3

# STFT
STFT_WINDOW = 64
STFT_OVERLAP = 63

# 训练选项
MOMENTUM = 0.9
EPOCHS = 60
LR_DROP_EPOCH = 40
LR_DROP_FACTOR = 0.1
MINIBATCH = 256
L2_REGULARIZATION = 1e-4

# 各网络的初始学习率; 干扰检测网络沿用 FFT-CNN 的取值
LEARNING_RATES = {
    "iq": 0.015,
    "stft": 0.001,
    "fft": 0.0056,
    "intdet": 0.0056,
}

# 批归一化
BN_EPSILON = 1e-5
BN_DECAY = 0.9

# 数据集
DESK_TRAIN_RECORDS = 20_000
DESK_VAL_RECORDS = 5_000
FULL_TRAIN_RECORDS = 110_000
FULL_VAL_RECORDS = 30_000
SINR_RANGE_DB = (-20.0, 0.0)
INR_RANGE_DB = (-10.0, 30.0)
INTERFERER_SFS = (7, 8)
INTERFERENCE_FRACTION = 0.5

# BER 扫描
SWEEP_SINR_DB = -15.0
SWEEP_INR_FROM_DB = -10.0
SWEEP_INR_TO_DB = 30.0
SWEEP_INR_STEP_DB = 2.5
SWEEP_TRIALS = 20_000
MIN_TRIALS = 1_000

# 验收
ENVELOPE_MARGIN = 0.25
ENVELOPE_MIN_PASS = 0.90
PACKET_SYMBOLS = 20

# 干扰检测标签: INR 高于阈值记为干扰, 低于阈值时 HybNet 走相干检测
INTERFERENCE_LABEL_RULE = "inr"
INR_THRESHOLD_DB = 0.0
