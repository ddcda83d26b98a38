"""
误码率扫描、HybNet 包络检查与复杂度测量
"""

from .ber import BerPoint, awgn_sweep, ber_sweep, classifier_accuracy, inr_grid
from .complexity import TimingPoint, depth_study, theoretical_cost, timing_bench
from .envelope import EnvelopeReport, hybnet_envelope_check

__all__ = [
    'BerPoint', 'awgn_sweep', 'ber_sweep', 'classifier_accuracy', 'inr_grid',
    'TimingPoint', 'depth_study', 'theoretical_cost', 'timing_bench',
    'EnvelopeReport', 'hybnet_envelope_check',
]
