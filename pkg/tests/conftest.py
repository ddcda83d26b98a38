#!/usr/bin/env python3
"""
测试共用的 fixture
"""

import os
import sys

import numpy as np
import pytest

# 添加项目根目录到路径
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from loralab.core.phy import LoraParams  # noqa: E402


@pytest.fixture
def params():
    return LoraParams()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
