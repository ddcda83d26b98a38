"""
网络结构、输入模态与 HybNet
"""

from .detectors import (CoherentDetector, DLDetector, Detector, NoncoherentDetector,
                        detect_dl, detect_packet)
from .features import Modality, featurize, featurize_batch, modality_shape
from .hybnet import HybnetDetector, HybnetModel, hybnet_detect, routing_fraction
from .zoo import (build_fft_cnn, build_interference_detector, build_iq_cnn,
                  build_stft_cnn)

__all__ = [
    'CoherentDetector', 'DLDetector', 'Detector', 'NoncoherentDetector',
    'detect_dl', 'detect_packet',
    'Modality', 'featurize', 'featurize_batch', 'modality_shape',
    'HybnetDetector', 'HybnetModel', 'hybnet_detect', 'routing_fraction',
    'build_fft_cnn', 'build_interference_detector', 'build_iq_cnn', 'build_stft_cnn',
]
