"""
CLI命令模块初始化
"""
