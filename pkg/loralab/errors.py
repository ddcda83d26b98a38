#!/usr/bin/env python3
"""
异常定义模块

所有库内错误都继承自 LoraLabError, CLI 按类型映射退出码:
ConfigError -> 1, FormatError -> 2, AcceptanceError -> 3。
"""

from typing import Optional


class LoraLabError(Exception):
    """loralab 异常基类"""


class DomainError(LoraLabError, ValueError):
    """参数取值或形状不合法"""


class ConfigError(LoraLabError):
    """清单文件或命令行参数组合错误"""


class FormatError(LoraLabError):
    """二进制文件 (LDS1 数据集 / 模型检查点) 损坏或被截断"""

    def __init__(self, message: str, offset: Optional[int] = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (字节偏移 {offset})"
        super().__init__(message)


class NotFittedError(LoraLabError):
    """模型尚未训练, 或批归一化没有运行统计量"""


class TrainingDivergedError(LoraLabError):
    """训练损失出现 NaN/Inf"""

    def __init__(self, epoch: int, loss: float):
        self.epoch = epoch
        self.loss = loss
        super().__init__(f"训练在第 {epoch} 轮发散 (loss={loss})")


class AcceptanceError(LoraLabError):
    """验收检查未通过"""
