"""
LoRa 物理层、信道混合与经典检测
"""
