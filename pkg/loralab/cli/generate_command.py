#!/usr/bin/env python3
"""
数据集生成命令
"""

import dataclasses
import os
from typing import Any

from loralab.cli.common import EXIT_OK, report_error


def val_path_for(out: str) -> str:
    """训练集 foo.lds 对应的验证集 foo.val.lds"""
    root, ext = os.path.splitext(out)
    return f"{root}.val{ext or '.lds'}"


def run_generate(args: Any) -> int:
    """按清单生成 LDS1 数据集"""
    from loralab import config
    from loralab.core.phy import LoraParams
    from loralab.data import lds
    from loralab.data.generator import DatasetSpec, generate_dataset
    from loralab.utils.file_utils import read_manifest

    try:
        spec = DatasetSpec.from_manifest(read_manifest(args.spec)) if args.spec else DatasetSpec()
        if args.full_scale:
            spec = dataclasses.replace(spec, num_train=config.FULL_TRAIN_RECORDS,
                                       num_val=config.FULL_VAL_RECORDS)
        if args.seed is not None:
            spec = dataclasses.replace(spec, rng_seed=args.seed)
        params = LoraParams()

        print(f"生成数据集: 模态 {spec.modality.value}, 任务 {spec.task}")
        if spec.task == 'interference':
            print(f"标签规则: {spec.label_rule}, INR 阈值 {spec.inr_threshold_db:g} dB")
        print("=" * 50)
        targets = {'train': args.out, 'val': val_path_for(args.out)}
        splits = ['train', 'val'] if args.split == 'both' else [args.split]
        for split in splits:
            path = args.out if args.split != 'both' else targets[split]
            dataset = generate_dataset(spec, params, split, progress=not args.quiet)
            count = lds.save(dataset, path, params=params)
            size = os.path.getsize(path)
            print(f"  {split}: {count} 条记录 -> {path} ({size} 字节)")
        print(f"\n生成参数清单已写入 {lds.manifest_path(args.out)} 等同名 .manifest 文件")
    except Exception as e:
        return report_error(e)
    return EXIT_OK
