"""
数据集: 生成、打标签与 LDS1 容器
"""

from .generator import (
    DatasetRecord,
    DatasetSpec,
    LoraDataset,
    RecordMeta,
    generate,
    generate_dataset,
    generate_interference_labels,
    resynthesize,
    synthesize,
)
from .lds import expected_file_size, load, save

__all__ = [
    'DatasetRecord', 'DatasetSpec', 'LoraDataset', 'RecordMeta',
    'generate', 'generate_dataset', 'generate_interference_labels',
    'resynthesize', 'synthesize', 'expected_file_size', 'load', 'save',
]
