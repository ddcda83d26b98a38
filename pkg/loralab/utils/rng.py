#!/usr/bin/env python3
"""
随机数流

所有随机操作都显式接收 numpy.random.Generator。主种子通过 SeedSequence
派生出互不重叠的子流 (每个 Monte-Carlo 工作单元 / 数据集划分一个)。
"""

from typing import List, Sequence, Union

import numpy as np

SeedLike = Union[int, np.random.SeedSequence]


def make_rng(seed: SeedLike) -> np.random.Generator:
    """由整数种子或 SeedSequence 构造 PCG64 生成器"""
    return np.random.Generator(np.random.PCG64(seed))


def split_seed(seed: SeedLike, count: int) -> List[np.random.SeedSequence]:
    """把主种子拆分成 count 个独立子种子"""
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return seed.spawn(count)


def child_rng(seed: int, path: Sequence[int]) -> np.random.Generator:
    """按 spawn_key 路径直接定位子流, 例如 (划分, 记录序号)

    与 spawn() 派生出的第 path 个子流相同, 但不需要先生成前面的子流。
    """
    return make_rng(np.random.SeedSequence(seed, spawn_key=tuple(int(p) for p in path)))
