#!/usr/bin/env python3
"""
LORALAB 主入口脚本
提供统一的命令行接口
"""

import argparse
import os
import sys

# 计时比较算法代价, bench 固定单线程; 必须在导入 numpy 之前设置
if 'bench' in sys.argv[1:]:
    for _var in ('OMP_NUM_THREADS', 'OPENBLAS_NUM_THREADS', 'MKL_NUM_THREADS'):
        os.environ.setdefault(_var, '1')

from loralab import config  # noqa: E402


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description='LORALAB - LoRa 干扰场景下的符号检测')
    parser.add_argument('--verbose', '-v', action='store_true', help='输出调试日志')
    parser.add_argument('--quiet', '-q', action='store_true', help='不显示进度条')
    subparsers = parser.add_subparsers(dest='command', help='可用命令')

    # 数据集生成
    gen_parser = subparsers.add_parser('generate', help='生成 LDS1 训练/验证数据集')
    gen_parser.add_argument('--spec', help='数据集清单 (key=value), 缺省使用默认参数')
    gen_parser.add_argument('--out', required=True, help='输出 .lds 路径 (验证集写入 <名>.val.lds)')
    gen_parser.add_argument('--split', choices=['train', 'val', 'both'], default='both',
                            help='生成哪个划分')
    gen_parser.add_argument('--full-scale', action='store_true',
                            help=f'使用 {config.FULL_TRAIN_RECORDS}/{config.FULL_VAL_RECORDS} 条记录')
    gen_parser.add_argument('--seed', type=int, help='覆盖清单中的 rng_seed')

    # 训练
    train_parser = subparsers.add_parser('train', help='训练一个网络')
    train_parser.add_argument('--net', choices=['iq', 'stft', 'fft', 'intdet'], required=True)
    train_parser.add_argument('--data', required=True, help='训练集 .lds')
    train_parser.add_argument('--val', help='验证集 .lds')
    train_parser.add_argument('--out', required=True, help='模型检查点路径')
    train_parser.add_argument('--epochs', type=int, help=f'训练轮数 (默认 {config.EPOCHS})')
    train_parser.add_argument('--lr', type=float, help='初始学习率 (默认按网络取值)')
    train_parser.add_argument('--batch', type=int, help=f'小批次大小 (默认 {config.MINIBATCH})')
    train_parser.add_argument('--seed', type=int, default=0)

    # 误码率评估
    eval_parser = subparsers.add_parser('evaluate', help='INR 网格上的 BER 扫描')
    eval_parser.add_argument('--detectors', default='coherent,noncoherent',
                             help='逗号分隔: coherent,noncoherent,iq_cnn,stft_cnn,fft_cnn,hybnet')
    eval_parser.add_argument('--sinr-db', type=float, default=config.SWEEP_SINR_DB)
    eval_parser.add_argument('--inr-from', type=float, default=config.SWEEP_INR_FROM_DB)
    eval_parser.add_argument('--inr-to', type=float, default=config.SWEEP_INR_TO_DB)
    eval_parser.add_argument('--inr-step', type=float, default=config.SWEEP_INR_STEP_DB)
    eval_parser.add_argument('--interferer-sf', type=int, choices=range(7, 13), default=7)
    eval_parser.add_argument('--trials', type=int, default=config.SWEEP_TRIALS)
    eval_parser.add_argument('--seed', type=int, default=0)
    eval_parser.add_argument('--out', required=True, help='输出 CSV 路径')
    eval_parser.add_argument('--workers', type=int, default=1, help='并行计算的网格点数')
    eval_parser.add_argument('--unpaired', action='store_true', help='各检测器使用独立随机流')
    eval_parser.add_argument('--report', action='store_true', help='同时输出文本/JSON 报告')
    eval_parser.add_argument('--awgn', action='store_true', help='关闭干扰, 与理论误符号率对照')
    eval_parser.add_argument('--es-n0', default='6,8,10,12,14', help='--awgn 的 Es/N0 网格 (dB)')
    for key in ('iq', 'stft', 'fft', 'intdet'):
        eval_parser.add_argument(f'--{key}-model', help=f'{key} 网络检查点')

    # 计时
    bench_parser = subparsers.add_parser('bench', help='检测耗时与理论复杂度')
    bench_parser.add_argument('--models', default='iq,stft,fft,hybnet')
    bench_parser.add_argument('--symbols', default='1,10,100,1000')
    bench_parser.add_argument('--repeats', type=int, default=5)
    bench_parser.add_argument('--seed', type=int, default=0)
    bench_parser.add_argument('--out', required=True, help='输出 CSV 路径')

    # 包络检查
    env_parser = subparsers.add_parser('envelope-check', help='HybNet 包络检查')
    env_parser.add_argument('--in', dest='input', required=True, help='evaluate 输出的 CSV')
    env_parser.add_argument('--margin', type=float, default=config.ENVELOPE_MARGIN)
    env_parser.add_argument('--min-pass', type=float, default=config.ENVELOPE_MIN_PASS)
    env_parser.add_argument('--output', '-o', help='报告输出目录')

    # 深度对比
    depth_parser = subparsers.add_parser('depth-study', help='卷积深度对比')
    depth_parser.add_argument('--net', choices=['iq', 'stft', 'fft'], required=True)
    depth_parser.add_argument('--data', required=True, help='训练集 .lds')
    depth_parser.add_argument('--val', required=True, help='验证集 .lds')
    depth_parser.add_argument('--depths', default='1,2,3,4')
    depth_parser.add_argument('--epochs', type=int)
    depth_parser.add_argument('--lr', type=float)
    depth_parser.add_argument('--batch', type=int)
    depth_parser.add_argument('--seed', type=int, default=0)
    depth_parser.add_argument('--output', '-o', default='results', help='报告输出目录')

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse 的用法错误统一为退出码 1
        return 0 if e.code == 0 else 1

    from loralab.log import setup_logging
    setup_logging(args.verbose)

    if args.command == 'generate':
        from loralab.cli.generate_command import run_generate
        return run_generate(args)
    elif args.command == 'train':
        from loralab.cli.train_command import run_train
        return run_train(args)
    elif args.command == 'evaluate':
        from loralab.cli.evaluate_command import run_evaluate
        return run_evaluate(args)
    elif args.command == 'bench':
        from loralab.cli.bench_command import run_bench
        return run_bench(args)
    elif args.command == 'envelope-check':
        from loralab.cli.envelope_command import run_envelope
        return run_envelope(args)
    elif args.command == 'depth-study':
        from loralab.cli.depth_command import run_depth
        return run_depth(args)
    else:
        parser.print_help()
        return 1


if __name__ == "__main__":
    sys.exit(main())
