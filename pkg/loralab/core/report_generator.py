#!/usr/bin/env python3
"""
报告生成器模块
"""

import csv
import json
import os
from datetime import datetime
from typing import Any, Dict, Iterable, Optional

from loralab import __version__

BER_CSV_HEADER = ('detector', 'inr_db', 'sinr_db', 'interferer_sf', 'trials',
                  'symbol_errors', 'ber', 'ber_sigma')
AWGN_CSV_HEADER = ('detector', 'es_n0_db', 'trials', 'symbol_errors', 'ser', 'oracle_ser',
                   'within_3sigma')
TIMING_CSV_HEADER = ('network', 'num_symbols', 'wall_time_s', 'repeats')


class ReportGenerator:
    """扫描/计时/训练结果的报告生成器

    CSV 不含时间戳, 同样的结果总是写出相同的字节; 文本与 JSON 报告带生成时间。
    """

    def __init__(self, output_dir: str = "results"):
        self.output_dir = output_dir
        os.makedirs(output_dir, exist_ok=True)

    def _path(self, filename: Optional[str], stem: str, ext: str) -> str:
        if filename is None:
            timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
            filename = f"{stem}_{timestamp}.{ext}"
        return os.path.join(self.output_dir, filename)

    # ---------- CSV ----------

    def write_csv(self, header: Iterable[str], rows: Iterable[Iterable[str]],
                  filename: str) -> str:
        filepath = os.path.join(self.output_dir, filename)
        with open(filepath, 'w', encoding='ascii', newline='') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(header)
            writer.writerows(rows)
        return filepath

    def write_ber_csv(self, points, filename: str = "ber.csv") -> str:
        """evaluate 的结果, 每个 (检测器, 网格点) 一行"""
        rows = [[p.detector, _num(p.inr_db), _num(p.sinr_db), str(p.interferer_sf),
                 str(p.trials), str(p.symbol_errors), f"{p.ber:.6e}", f"{p.ber_sigma:.6e}"]
                for p in points]
        return self.write_csv(BER_CSV_HEADER, rows, filename)

    def write_awgn_csv(self, points, filename: str = "awgn.csv") -> str:
        """AWGN 对照, oracle_ser 与 within_3sigma 对深度学习检测器留空"""
        rows = [[p.detector, _num(p.es_n0_db), str(p.trials), str(p.symbol_errors),
                 f"{p.ser:.6e}", "" if p.oracle_ser is None else f"{p.oracle_ser:.6e}",
                 "" if p.within_3_sigma is None else str(int(p.within_3_sigma))]
                for p in points]
        return self.write_csv(AWGN_CSV_HEADER, rows, filename)

    def write_timing_csv(self, points, filename: str = "timing.csv") -> str:
        rows = [[p.network, str(p.num_symbols), f"{p.wall_time_s:.6e}", str(p.repeats)]
                for p in points]
        return self.write_csv(TIMING_CSV_HEADER, rows, filename)

    def write_training_history(self, model, filename: str) -> str:
        """训练记录 (每轮 loss / 准确率 / 学习率) 与网络结构"""
        data = {
            'network': model.spec.to_dict(),
            'parameters': model.network.parameter_count(),
            'history': model.history.to_dict(),
        }
        return self.generate_json_report(data, filename, analysis_type='training')

    # ---------- 文本 / JSON ----------

    def generate_text_report(self, analysis_result: Dict[Any, Any], filename: str = None) -> str:
        """生成文本格式报告"""
        filepath = self._path(filename, "loralab_report", "txt")

        with open(filepath, 'w', encoding='utf-8') as f:
            f.write(f"LORALAB {analysis_result.get('title', '分析报告')}\n")
            f.write("=" * 50 + "\n\n")
            f.write(f"生成时间: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}\n\n")

            summary = analysis_result.get('summary', {})
            if summary:
                f.write("摘要:\n")
                f.write("-" * 15 + "\n")
                for key, value in summary.items():
                    f.write(f"{key:<24}: {value}\n")
                f.write("\n")

            # 逐点明细
            rows = analysis_result.get('rows', [])
            if rows:
                columns = list(rows[0].keys())
                f.write("明细:\n")
                f.write("-" * 15 + "\n")
                f.write("  ".join(f"{c:>14}" for c in columns) + "\n")
                for row in rows:
                    f.write("  ".join(f"{_cell(row[c]):>14}" for c in columns) + "\n")

        return filepath

    def generate_json_report(self, analysis_result: Dict[Any, Any], filename: str = None,
                             analysis_type: str = 'ber_sweep') -> str:
        """生成JSON格式报告"""
        filepath = self._path(filename, "loralab_report", "json")

        report_data = {
            'metadata': {
                'generated_at': datetime.now().isoformat(),
                'tool_version': __version__,
                'analysis_type': analysis_type,
            },
            'analysis_result': analysis_result,
        }

        with open(filepath, 'w', encoding='utf-8') as f:
            json.dump(report_data, f, indent=2, ensure_ascii=False)

        return filepath

    def generate_summary_report(self, points) -> str:
        """BER 扫描的简要摘要: 每个检测器的最好/最差网格点"""
        by_detector: Dict[str, list] = {}
        for point in points:
            by_detector.setdefault(point.detector, []).append(point)

        report = "BER 扫描摘要\n===============\n"
        for name, rows in by_detector.items():
            best = min(rows, key=lambda p: p.ber)
            worst = max(rows, key=lambda p: p.ber)
            report += (f"- {name}: 最好 {best.ber:.3e} (INR {best.inr_db:g} dB), "
                       f"最差 {worst.ber:.3e} (INR {worst.inr_db:g} dB)\n")
        return report.strip()


def _num(value: float) -> str:
    return f"{value:.6g}"


def _cell(value: Any) -> str:
    if isinstance(value, bool):
        return "通过" if value else "未通过"
    if isinstance(value, float):
        return f"{value:.4g}"
    return str(value)
