"""
工具模块初始化
"""
