#!/usr/bin/env python3
"""
卷积深度对比命令
"""

from dataclasses import asdict
from typing import Any

from loralab.cli.common import EXIT_OK, parse_int_list, report_error


def run_depth(args: Any) -> int:
    """同一网络不同卷积深度的准确率与耗时"""
    from loralab.bench.complexity import depth_study
    from loralab.core.report_generator import ReportGenerator
    from loralab.data import lds
    from loralab.models.zoo import NET_MODALITY
    from loralab.nn.trainer import TrainingConfig, with_overrides

    try:
        depths = parse_int_list(args.depths)
        train_set = lds.load(args.data)
        val_set = lds.load(args.val)
        cfg = with_overrides(TrainingConfig(), epochs=args.epochs, lr_initial=args.lr,
                             minibatch=args.batch, rng_seed=args.seed)

        print(f"深度对比: {args.net}, 卷积深度 {args.depths}")
        print("=" * 50)
        results = depth_study(NET_MODALITY[args.net], depths, train_set, val_set, cfg,
                              progress=not args.quiet)
        for r in results:
            print(f"  深度 {r.conv_depth}: 参数 {r.parameters:>7,d}  代价 {r.cost_per_symbol:>10,d}  "
                  f"验证准确率 {r.val_accuracy:.2%}  训练 {r.train_seconds:.1f} s  "
                  f"单包 {r.packet_seconds * 1e3:.2f} ms")

        report_gen = ReportGenerator(args.output)
        result = {
            'title': f'{args.net} 卷积深度对比',
            'summary': {'network': args.net, 'depths': args.depths, 'epochs': cfg.epochs},
            'rows': [asdict(r) for r in results],
        }
        name = f"depth_study_{args.net}"
        print(f"\n文本报告已保存到: {report_gen.generate_text_report(result, name + '.txt')}")
        json_file = report_gen.generate_json_report(result, name + '.json',
                                                    analysis_type='depth_study')
        print(f"JSON报告已保存到: {json_file}")
    except Exception as e:
        return report_error(e)
    return EXIT_OK
