#!/usr/bin/env python3
"""
命令共用的参数解析与错误处理
"""

from typing import Dict, List, Optional

from loralab.errors import (AcceptanceError, ConfigError, DomainError, FormatError,
                            LoraLabError, NotFittedError, TrainingDivergedError)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_ACCEPTANCE = 3


def exit_code_for(error: BaseException) -> int:
    """异常 -> 退出码"""
    if isinstance(error, AcceptanceError):
        return EXIT_ACCEPTANCE
    if isinstance(error, (FormatError, NotFittedError, TrainingDivergedError, OSError)):
        return EXIT_DATA
    if isinstance(error, (ConfigError, DomainError, LoraLabError, ValueError)):
        return EXIT_USAGE
    return EXIT_DATA


def report_error(error: BaseException) -> int:
    """打印错误并返回对应的退出码"""
    print(f"错误: {error}")
    return exit_code_for(error)


def parse_float_list(text: str) -> List[float]:
    try:
        return [float(item) for item in text.split(',') if item.strip()]
    except ValueError as e:
        raise ConfigError(f"无法解析数值列表 {text!r}") from e


def parse_int_list(text: str) -> List[int]:
    try:
        return [int(item) for item in text.split(',') if item.strip()]
    except ValueError as e:
        raise ConfigError(f"无法解析整数列表 {text!r}") from e


def parse_names(text: str, allowed) -> List[str]:
    names = [item.strip() for item in text.split(',') if item.strip()]
    unknown = [name for name in names if name not in allowed]
    if unknown or not names:
        raise ConfigError(f"未知名称 {', '.join(unknown) or '(空)'}; 可选: {', '.join(allowed)}")
    return names


def require_models(paths: Dict[str, Optional[str]], needed: List[str]) -> None:
    missing = [f"--{key}-model" for key in needed if not paths.get(key)]
    if missing:
        raise ConfigError(f"缺少模型文件参数: {', '.join(missing)}")
