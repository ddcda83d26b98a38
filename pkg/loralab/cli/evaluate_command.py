#!/usr/bin/env python3
"""
误码率评估命令
"""

import os
from typing import Any, Dict, List, Optional

from loralab.cli.common import (EXIT_ACCEPTANCE, EXIT_OK, parse_float_list, parse_names,
                                report_error, require_models)

DETECTOR_NAMES = ('coherent', 'noncoherent', 'iq_cnn', 'stft_cnn', 'fft_cnn', 'hybnet')
MODEL_KEYS = {'iq_cnn': ['iq'], 'stft_cnn': ['stft'], 'fft_cnn': ['fft'],
              'hybnet': ['intdet', 'fft']}


def build_detectors(names: List[str], model_paths: Dict[str, Optional[str]], params):
    """按名称构造检测器, 深度学习检测器从检查点加载"""
    from loralab.models.detectors import CoherentDetector, DLDetector, NoncoherentDetector
    from loralab.models.hybnet import HybnetDetector, HybnetModel
    from loralab.nn.checkpoint import load_model

    require_models(model_paths, sorted({k for n in names for k in MODEL_KEYS.get(n, [])}))
    loaded = {}

    def model(key):
        if key not in loaded:
            loaded[key] = load_model(model_paths[key])
        return loaded[key]

    detectors = []
    for name in names:
        if name == 'coherent':
            detectors.append(CoherentDetector(params))
        elif name == 'noncoherent':
            detectors.append(NoncoherentDetector(params))
        elif name == 'hybnet':
            detectors.append(HybnetDetector(HybnetModel(model('intdet'), model('fft')), params))
        else:
            detectors.append(DLDetector(model(MODEL_KEYS[name][0]), params=params, name=name))
    return detectors


def _model_paths(args: Any) -> Dict[str, Optional[str]]:
    return {'iq': args.iq_model, 'stft': args.stft_model, 'fft': args.fft_model,
            'intdet': args.intdet_model}


def run_evaluate(args: Any) -> int:
    """INR 网格上的 BER 扫描, 或 --awgn 下与理论值对照"""
    from loralab.core.phy import LoraParams

    try:
        params = LoraParams()
        names = parse_names(args.detectors, DETECTOR_NAMES)
        detectors = build_detectors(names, _model_paths(args), params)
        if args.awgn:
            return _run_awgn(args, detectors, params)
        return _run_sweep(args, detectors, params)
    except Exception as e:
        return report_error(e)


def _run_sweep(args: Any, detectors, params) -> int:
    from loralab.bench.ber import ber_sweep, inr_grid
    from loralab.core.report_generator import ReportGenerator

    grid = inr_grid(args.inr_from, args.inr_to, args.inr_step)
    print(f"BER 扫描: SINR {args.sinr_db:g} dB, 干扰 SF{args.interferer_sf}, "
          f"{len(grid)} 个 INR 点, 每点 {args.trials} 次")
    print("=" * 50)
    points = ber_sweep(detectors, grid, sinr_db=args.sinr_db, interferer_sf=args.interferer_sf,
                       trials_per_point=args.trials, seed=args.seed, params=params,
                       paired=not args.unpaired, workers=args.workers, progress=not args.quiet)

    out_dir = os.path.dirname(args.out) or '.'
    report_gen = ReportGenerator(out_dir)
    csv_file = report_gen.write_ber_csv(points, os.path.basename(args.out))
    print(f"CSV 已保存到: {csv_file}")
    print("\n" + report_gen.generate_summary_report(points))

    if args.report:
        result = {
            'title': 'BER 扫描报告',
            'summary': {
                'sinr_db': args.sinr_db,
                'interferer_sf': args.interferer_sf,
                'trials_per_point': args.trials,
                'seed': args.seed,
                'detectors': ','.join(d.name for d in detectors),
            },
            'rows': [{'detector': p.detector, 'inr_db': p.inr_db, 'ber': p.ber,
                      'ber_sigma': p.ber_sigma} for p in points],
        }
        stem = os.path.splitext(os.path.basename(args.out))[0]
        print(f"文本报告已保存到: {report_gen.generate_text_report(result, stem + '.txt')}")
        print(f"JSON报告已保存到: {report_gen.generate_json_report(result, stem + '.json')}")
    return EXIT_OK


def _run_awgn(args: Any, detectors, params) -> int:
    from loralab.bench.ber import awgn_sweep
    from loralab.core.report_generator import ReportGenerator

    grid = parse_float_list(args.es_n0)
    print(f"AWGN 对照: Es/N0 = {args.es_n0} dB, 每点 {args.trials} 次")
    print("=" * 50)
    points = awgn_sweep(detectors, grid, args.trials, seed=args.seed, params=params,
                        progress=not args.quiet)

    failures = []
    by_point: Dict[float, Dict[str, float]] = {}
    for p in points:
        by_point.setdefault(p.es_n0_db, {})[p.detector] = p.ser
        oracle = '-' if p.oracle_ser is None else f"{p.oracle_ser:.4e}"
        flag = {True: '通过', False: '偏离', None: ''}[p.within_3_sigma]
        print(f"  {p.detector:<12} Es/N0={p.es_n0_db:6.2f} dB  SER={p.ser:.4e}  "
              f"理论={oracle}  {flag}")
        if p.within_3_sigma is False:
            failures.append(f"{p.detector}@{p.es_n0_db:g}dB 偏离理论值超过 3 sigma")
    for es_n0, sers in by_point.items():
        if 'coherent' in sers and 'noncoherent' in sers and sers['coherent'] > sers['noncoherent']:
            failures.append(f"Es/N0={es_n0:g} dB 相干 SER 高于非相干")

    out_dir = os.path.dirname(args.out) or '.'
    report_gen = ReportGenerator(out_dir)
    csv_file = report_gen.write_awgn_csv(points, os.path.basename(args.out))
    print(f"\nCSV 已保存到: {csv_file}")

    if failures:
        for failure in failures:
            print(f"  未通过: {failure}")
        return EXIT_ACCEPTANCE
    return EXIT_OK
