#!/usr/bin/env python3
"""
日志配置

库模块统一使用 logging.getLogger(__name__), 只有 CLI 入口调用 setup_logging。
"""

import logging

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def setup_logging(verbose: bool = False) -> None:
    """为 loralab 根记录器安装一个流处理器 (重复调用不会叠加处理器)"""
    root = logging.getLogger("loralab")
    root.setLevel(logging.DEBUG if verbose else logging.INFO)
    if not any(getattr(h, "_loralab", False) for h in root.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._loralab = True  # type: ignore[attr-defined]
        root.addHandler(handler)
