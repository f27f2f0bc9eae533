"""Trainer CLI: dataset generation, training, export, evaluation.

`full` chains the whole pipeline into one artifacts directory:
dataset (via the scheduler CLI) -> train -> export weights -> held-out
evaluation -> larger-topology trend report.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .dataset import Dataset, generate_dataset
from .evaluate import HELDOUT_SEED, heldout_evaluation, trend_report
from .export import export_weights
from .model import ModelSpec, RoleClassifier
from .train import TrainConfig, save_train_config, train_model


def _add_dataset_args(p):
    p.add_argument("--count", type=int, default=5000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--nodes", nargs=2, type=int, default=[2, 10])
    p.add_argument("--tags", nargs=2, type=int, default=[1, 14])
    p.add_argument("--model-param", type=float, default=0.6)


def _add_train_args(p):
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--batch-size", type=int, default=256)
    p.add_argument("--eps-init", type=float, default=1e-3)
    p.add_argument("--carrier-weight", type=float, default=2.0)
    p.add_argument("--l2", type=float, default=1e-6)
    p.add_argument("--patience", type=int, default=25)
    p.add_argument("--train-seed", type=int, default=0)
    p.add_argument("--blocks", type=int, default=12)
    p.add_argument("--heads", type=int, default=12)
    p.add_argument("--hidden", type=int, default=72)


def _train_config(args) -> tuple[TrainConfig, ModelSpec]:
    config = TrainConfig(max_epochs=args.epochs, batch_size=args.batch_size,
                         eps_init=args.eps_init,
                         carrier_weight=args.carrier_weight, l2=args.l2,
                         patience=args.patience, seed=args.train_seed)
    spec = ModelSpec(num_blocks=args.blocks, num_heads=args.heads,
                     hidden_dim=args.hidden)
    return config, spec


def _run_training(dataset: Dataset, out_dir: Path, args) -> Path:
    config, spec = _train_config(args)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_train_config(config, spec, out_dir / "config.json")
    start = time.monotonic()
    result = train_model(dataset, spec, config,
                         log_path=out_dir / "train_log.jsonl", progress=True)
    elapsed = time.monotonic() - start
    model = RoleClassifier(spec)
    model.load_state_dict(result.best_state)
    weights = out_dir / "model.rgwt"
    export_weights(model, weights)
    summary = {
        "epochs_run": len(result.log),
        "best_val_carrier_f1": result.best_f1,
        "train_seconds": round(elapsed, 1),
        "examples": int(dataset.batch.num_examples),
        "train_examples": int(len(dataset.train_examples)),
        "val_examples": int(len(dataset.val_examples)),
    }
    (out_dir / "train_summary.json").write_text(json.dumps(summary, indent=2))
    print(json.dumps(summary, indent=2))
    return weights


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="carriersched-trainer")
    sub = parser.add_subparsers(dest="command", required=True)

    ds = sub.add_parser("dataset", help="generate a labeled dataset")
    _add_dataset_args(ds)
    ds.add_argument("--out-dir", required=True)

    tr = sub.add_parser("train", help="train on an existing dataset")
    tr.add_argument("--dataset", required=True)
    tr.add_argument("--out-dir", required=True)
    _add_train_args(tr)

    ev = sub.add_parser("evaluate", help="held-out completion/objective eval")
    ev.add_argument("--weights", required=True)
    ev.add_argument("--count", type=int, default=500)
    ev.add_argument("--seed", type=int, default=HELDOUT_SEED)
    ev.add_argument("--out", required=True)

    td = sub.add_parser("trend", help="larger-topology comparison report")
    td.add_argument("--weights", required=True)
    td.add_argument("--per-cell", type=int, default=30)
    td.add_argument("--out", required=True)

    full = sub.add_parser("full", help="dataset + train + evaluate + trend")
    _add_dataset_args(full)
    _add_train_args(full)
    full.add_argument("--out-dir", required=True)
    full.add_argument("--eval-count", type=int, default=500)

    args = parser.parse_args(argv)

    if args.command == "dataset":
        dataset = generate_dataset(Path(args.out_dir), args.count, args.seed,
                                   tuple(args.nodes), tuple(args.tags),
                                   args.model_param)
        print(json.dumps(dataset.meta, indent=2))
        return 0
    if args.command == "train":
        dataset = Dataset.load(Path(args.dataset))
        _run_training(dataset, Path(args.out_dir), args)
        return 0
    if args.command == "evaluate":
        result = heldout_evaluation(Path(args.weights), args.count, args.seed)
        Path(args.out).write_text(json.dumps(result, indent=2))
        print(json.dumps(result, indent=2))
        return 0
    if args.command == "trend":
        result = trend_report(Path(args.weights), args.per_cell)
        Path(args.out).write_text(json.dumps(result, indent=2))
        print("trend cells:", len(result["cells"]))
        return 0
    if args.command == "full":
        out_dir = Path(args.out_dir)
        dataset_dir = out_dir / "dataset"
        dataset = generate_dataset(dataset_dir, args.count, args.seed,
                                   tuple(args.nodes), tuple(args.tags),
                                   args.model_param)
        print(json.dumps(dataset.meta, indent=2))
        weights = _run_training(dataset, out_dir, args)
        result = heldout_evaluation(weights, args.eval_count)
        (out_dir / "eval.json").write_text(json.dumps(result, indent=2))
        print(json.dumps(result, indent=2))
        trend = trend_report(weights)
        (out_dir / "trend.json").write_text(json.dumps(trend, indent=2))
        print("trend cells:", len(trend["cells"]))
        return 0
    return 1


if __name__ == "__main__":
    sys.exit(main())
