#!/usr/bin/env python3
"""
文件工具模块
"""

import os
from typing import Dict, Any

from loralab.errors import ConfigError


def ensure_directory(directory: str) -> None:
    """确保目录存在"""
    if directory:
        os.makedirs(directory, exist_ok=True)


def parse_manifest(text: str) -> Dict[str, str]:
    """解析 key=value 清单文本, 支持 # 注释与空行"""
    entries: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ConfigError(f"清单第 {lineno} 行缺少 '=': {raw!r}")
        key, value = line.split('=', 1)
        key = key.strip()
        if not key:
            raise ConfigError(f"清单第 {lineno} 行键名为空")
        entries[key] = value.strip()
    return entries


def format_manifest(entries: Dict[str, Any]) -> str:
    """按插入顺序输出 key=value 行"""
    return ''.join(f"{key}={value}\n" for key, value in entries.items())


def read_manifest(filepath: str) -> Dict[str, str]:
    """读取清单文件"""
    with open(filepath, 'r', encoding='utf-8') as f:
        return parse_manifest(f.read())
