#!/usr/bin/env python3
"""
网络训练命令
"""

import os
from typing import Any

from loralab.cli.common import EXIT_OK, report_error


def history_path_for(out: str) -> str:
    return os.path.splitext(out)[0] + '.history.json'


def run_train(args: Any) -> int:
    """在 LDS1 数据集上训练一个网络并保存检查点"""
    from loralab.core.report_generator import ReportGenerator
    from loralab.data import lds
    from loralab.errors import ConfigError
    from loralab.models.zoo import BUILDERS, NET_MODALITY
    from loralab.nn.checkpoint import save_model
    from loralab.nn.trainer import TrainingConfig, train, with_overrides

    try:
        spec = BUILDERS[args.net]()
        data = lds.load(args.data)
        if data.modality is not NET_MODALITY[args.net]:
            raise ConfigError(f"网络 {args.net} 需要 {NET_MODALITY[args.net].value} 数据集, "
                              f"得到 {data.modality.value}")
        if data.label_arity != spec.num_classes:
            raise ConfigError(f"数据集有 {data.label_arity} 类, 网络输出 {spec.num_classes} 类")
        validation = lds.load(args.val).arrays() if args.val else None
        cfg = with_overrides(TrainingConfig(), epochs=args.epochs, lr_initial=args.lr,
                             minibatch=args.batch, rng_seed=args.seed)

        print(f"训练 {spec.name}: {len(data)} 条记录, {cfg.epochs} 轮")
        print("=" * 50)
        model = train(spec, data.arrays(), cfg, validation=validation, progress=not args.quiet)
        save_model(model, args.out)

        last = model.history.epochs[-1]
        print(f"  最终 loss: {last.loss:.4f}")
        print(f"  训练准确率: {last.train_accuracy:.2%}")
        if last.val_accuracy is not None:
            print(f"  验证准确率: {last.val_accuracy:.2%}")
        print(f"  训练耗时: {model.history.train_seconds:.1f} 秒")

        history = history_path_for(args.out)
        report_gen = ReportGenerator(os.path.dirname(history) or '.')
        report_gen.write_training_history(model, os.path.basename(history))
        print(f"\n模型已保存到: {args.out}")
        print(f"训练记录已保存到: {history}")
    except Exception as e:
        return report_error(e)
    return EXIT_OK
