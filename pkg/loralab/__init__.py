"""
LORALAB - LoRa 符号检测工具包

同频 / 异扩频因子干扰下的经典检测、CNN 检测与 HybNet 混合检测。
"""

__version__ = "1.0.0"
__author__ = "LORALAB Team"
__description__ = "LoRa 干扰场景下的深度学习符号检测"

from .core.phy import LoraParams
from .core.report_generator import ReportGenerator
from .models.detectors import CoherentDetector, DLDetector, NoncoherentDetector
from .models.hybnet import HybnetDetector, HybnetModel

__all__ = [
    'LoraParams',
    'ReportGenerator',
    'CoherentDetector',
    'DLDetector',
    'NoncoherentDetector',
    'HybnetDetector',
    'HybnetModel',
]
