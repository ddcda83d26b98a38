#!/usr/bin/env python3
"""
计时与复杂度命令
"""

import os
from typing import Any

from loralab.cli.common import EXIT_OK, parse_int_list, parse_names, report_error

BENCH_MODELS = ('iq', 'stft', 'fft', 'hybnet')


def run_bench(args: Any) -> int:
    """随机初始化的网络对 K 符号包的检测耗时, 以及理论卷积代价"""
    from loralab.bench.complexity import fit_timing, layer_costs, timing_bench, timing_detectors
    from loralab.core.phy import LoraParams
    from loralab.core.report_generator import ReportGenerator
    from loralab.models.zoo import BUILDERS

    try:
        params = LoraParams()
        names = parse_names(args.models, BENCH_MODELS)
        counts = parse_int_list(args.symbols)

        print(f"计时: 网络 {', '.join(names)}, 符号数 {args.symbols}, 重复 {args.repeats} 次")
        print("=" * 50)
        detectors = timing_detectors(names, params, seed=args.seed)
        points = timing_bench(detectors, counts, repeats=args.repeats, seed=args.seed,
                              params=params)

        out_dir = os.path.dirname(args.out) or '.'
        report_gen = ReportGenerator(out_dir)
        csv_file = report_gen.write_timing_csv(points, os.path.basename(args.out))
        print(f"CSV 已保存到: {csv_file}")

        print("\n线性拟合 (耗时 = 斜率 * 符号数 + 截距):")
        print("-" * 20)
        for name, fit in fit_timing(points).items():
            print(f"{name:<16}: 斜率 {fit.slope:.3e} s/符号, 截距 {fit.intercept:.3e} s, "
                  f"R^2 {fit.r_squared:.4f}")

        print("\n理论卷积代价 (每符号):")
        print("-" * 20)
        for key in ('iq', 'stft', 'fft', 'intdet'):
            spec = BUILDERS[key](params=params)
            costs = layer_costs(spec)
            print(f"{spec.name:<22}: {sum(costs):>12,d}  "
                  f"(逐层 {', '.join(f'{c:,d}' for c in costs)})")
    except Exception as e:
        return report_error(e)
    return EXIT_OK
