#!/usr/bin/env python3
"""
HybNet 包络检查命令
"""

import os
from typing import Any

from loralab.cli.common import EXIT_ACCEPTANCE, EXIT_OK, report_error


def run_envelope(args: Any) -> int:
    """读取 evaluate 的 CSV, 逐点检查 HybNet 是否贴近两个分支中较好的一个"""
    from loralab.bench.ber import read_ber_csv
    from loralab.bench.envelope import hybnet_envelope_check
    from loralab.core.report_generator import ReportGenerator

    try:
        points = read_ber_csv(args.input)
        report = hybnet_envelope_check(points, margin=args.margin)

        print(f"HybNet 包络检查: {args.input}, margin {args.margin:g}")
        print("=" * 50)
        for row in report.rows:
            status = "通过" if row.passed else "未通过"
            print(f"  INR {row.inr_db:7.2f} dB  coherent {row.ber_coherent:.3e}  "
                  f"fft_cnn {row.ber_fft_cnn:.3e}  hybnet {row.ber_hybnet:.3e}  "
                  f"上限 {row.bound:.3e}  {status}")
        print(f"\n通过比例: {report.pass_fraction:.1%} (要求 >= {args.min_pass:.0%})")

        if args.output:
            report_gen = ReportGenerator(args.output)
            stem = os.path.splitext(os.path.basename(args.input))[0] + '_envelope'
            result = {
                'title': 'HybNet 包络检查',
                'summary': {'margin': args.margin, 'pass_fraction': report.pass_fraction,
                            'accepted': report.accepted(args.min_pass)},
                'rows': report.to_dict()['points'],
            }
            print(f"文本报告已保存到: {report_gen.generate_text_report(result, stem + '.txt')}")
            json_file = report_gen.generate_json_report(report.to_dict(), stem + '.json',
                                                        analysis_type='hybnet_envelope')
            print(f"JSON报告已保存到: {json_file}")

        if not report.accepted(args.min_pass):
            print("错误: 包络检查未通过")
            return EXIT_ACCEPTANCE
    except Exception as e:
        return report_error(e)
    return EXIT_OK
