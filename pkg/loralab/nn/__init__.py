"""
最小 CNN 引擎: 卷积、批归一化、ReLU、最大池化、dropout、全连接、softmax 交叉熵与 SGDM
"""

from .network import LayerSpec, Network, NetworkSpec
from .trainer import TrainedModel, TrainingConfig, predict, train

__all__ = [
    'LayerSpec',
    'Network',
    'NetworkSpec',
    'TrainedModel',
    'TrainingConfig',
    'predict',
    'train',
]
