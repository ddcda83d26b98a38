#!/usr/bin/env python3
"""
HybNet 包络检查

HybNet 在每个网格点应接近相干检测与 FFT-CNN 中较好的一个:
    BER(hybnet) <= (1 + margin) * min(BER(coherent), BER(fft_cnn)) + 3 sigma
sigma 取 HybNet 该点的二项标准差。
"""

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Sequence

from loralab import config
from loralab.bench.ber import BerPoint
from loralab.errors import DomainError

REQUIRED = ('coherent', 'fft_cnn', 'hybnet')


@dataclass(frozen=True)
class EnvelopeRow:
    inr_db: float
    sinr_db: float
    interferer_sf: int
    ber_coherent: float
    ber_fft_cnn: float
    ber_hybnet: float
    bound: float

    @property
    def passed(self) -> bool:
        return self.ber_hybnet <= self.bound


@dataclass
class EnvelopeReport:
    margin: float
    rows: List[EnvelopeRow] = field(default_factory=list)

    @property
    def pass_fraction(self) -> float:
        if not self.rows:
            return float('nan')
        return sum(row.passed for row in self.rows) / len(self.rows)

    @property
    def failed_rows(self) -> List[EnvelopeRow]:
        return [row for row in self.rows if not row.passed]

    def accepted(self, min_pass: float = config.ENVELOPE_MIN_PASS) -> bool:
        return bool(self.rows) and self.pass_fraction >= min_pass

    def to_dict(self) -> Dict:
        return {
            'margin': self.margin,
            'pass_fraction': self.pass_fraction,
            'points': [{
                'inr_db': row.inr_db,
                'sinr_db': row.sinr_db,
                'interferer_sf': row.interferer_sf,
                'ber_coherent': row.ber_coherent,
                'ber_fft_cnn': row.ber_fft_cnn,
                'ber_hybnet': row.ber_hybnet,
                'bound': row.bound,
                'passed': row.passed,
            } for row in self.rows],
        }


def hybnet_envelope_check(results: Sequence[BerPoint],
                          margin: float = config.ENVELOPE_MARGIN) -> EnvelopeReport:
    """逐网格点比较; 三个检测器必须在同一组网格点上且试验数相同"""
    if margin < 0:
        raise DomainError("margin 不能为负")
    grouped: Dict[tuple, Dict[str, BerPoint]] = defaultdict(dict)
    for point in results:
        if point.detector not in REQUIRED:
            continue
        slot = grouped[point.grid_key]
        if point.detector in slot:
            raise DomainError(f"网格点 {point.grid_key} 上 {point.detector} 重复出现")
        slot[point.detector] = point
    if not grouped:
        raise DomainError(f"结果中没有 {', '.join(REQUIRED)} 的数据")

    report = EnvelopeReport(margin=margin)
    for key in sorted(grouped):
        slot = grouped[key]
        missing = [name for name in REQUIRED if name not in slot]
        if missing:
            raise DomainError(f"网格点 {key} 缺少 {', '.join(missing)}, 结果未配对")
        if len({slot[name].trials for name in REQUIRED}) != 1:
            raise DomainError(f"网格点 {key} 上的试验数不一致, 结果未配对")
        hyb = slot['hybnet']
        best = min(slot['coherent'].ber, slot['fft_cnn'].ber)
        report.rows.append(EnvelopeRow(
            inr_db=key[0], sinr_db=key[1], interferer_sf=key[2],
            ber_coherent=slot['coherent'].ber, ber_fft_cnn=slot['fft_cnn'].ber,
            ber_hybnet=hyb.ber, bound=(1 + margin) * best + 3 * hyb.ber_sigma,
        ))
    return report
