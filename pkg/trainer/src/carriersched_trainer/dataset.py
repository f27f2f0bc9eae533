"""Training-example generation from optimal schedules.

Instances come from the scheduler package's CLI (`gen`), labels from its
exact solver (`solve --scheduler optimal`), both over JSONL files. Every
schedule is unrolled slot by slot: example j holds the feature matrix of
the still-pending tags before slot j and that slot's role vector as the
per-node class label. The train/validation split is by instance, never by
slot, so correlated examples cannot leak across the split.
"""

from __future__ import annotations

import json
import os
import subprocess
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .instances import (Instance, build_features, closed_edge_arrays,
                        parse_instance, parse_schedule_slots, roles_from_slot)

SCHEDULER_CMD_ENV = "TRAINER_CARRIERSCHED_CMD"


def scheduler_command() -> list[str]:
    override = os.environ.get(SCHEDULER_CMD_ENV)
    if override:
        return override.split()
    return [sys.executable, "-m", "carriersched.cli"]


def run_scheduler_cli(*args: str) -> None:
    cmd = scheduler_command() + list(args)
    proc = subprocess.run(cmd, capture_output=True, text=True)
    # exit 2 in batch mode means some instances failed (skipped downstream)
    if proc.returncode not in (0, 2):
        raise RuntimeError(
            f"scheduler CLI failed ({proc.returncode}): {proc.stderr[-500:]}")


@dataclass
class ExampleBatch:
    """Flat arrays over a set of per-slot examples (block-diagonal graphs)."""

    features: np.ndarray      # (total_nodes, 4) float64
    labels: np.ndarray        # (total_nodes,) int64
    src: np.ndarray           # (total_edges,) int64, node indices offset
    dst: np.ndarray
    node_ptr: np.ndarray      # (num_examples + 1,)
    edge_ptr: np.ndarray
    instance_idx: np.ndarray  # (num_examples,) provenance

    @property
    def num_examples(self) -> int:
        return len(self.node_ptr) - 1

    def select(self, indices: np.ndarray) -> "ExampleBatch":
        feats, labels, srcs, dsts = [], [], [], []
        node_ptr = [0]
        edge_ptr = [0]
        for i in indices:
            lo, hi = self.node_ptr[i], self.node_ptr[i + 1]
            elo, ehi = self.edge_ptr[i], self.edge_ptr[i + 1]
            offset = node_ptr[-1] - lo
            feats.append(self.features[lo:hi])
            labels.append(self.labels[lo:hi])
            srcs.append(self.src[elo:ehi] + offset)
            dsts.append(self.dst[elo:ehi] + offset)
            node_ptr.append(node_ptr[-1] + (hi - lo))
            edge_ptr.append(edge_ptr[-1] + (ehi - elo))
        return ExampleBatch(
            np.concatenate(feats), np.concatenate(labels),
            np.concatenate(srcs), np.concatenate(dsts),
            np.asarray(node_ptr, dtype=np.int64),
            np.asarray(edge_ptr, dtype=np.int64),
            self.instance_idx[indices])


def unroll_examples(instance: Instance,
                    slots: list[list[tuple[int, int, int]]]):
    """(features, labels) per slot, replaying the cached-tag removal."""
    remaining = {t for t, _ in instance.tags}
    out = []
    for records in slots:
        feats = build_features(instance, remaining)
        labels = roles_from_slot(instance, records)
        out.append((feats, labels))
        for _host, tag, _carrier in records:
            remaining.discard(tag)
    if remaining:
        raise ValueError("schedule does not interrogate every tag")
    return out


def build_batch(pairs: list[tuple[Instance, list]]) -> ExampleBatch:
    feats, labels, srcs, dsts = [], [], [], []
    node_ptr = [0]
    edge_ptr = [0]
    inst_idx = []
    for idx, (instance, slots) in enumerate(pairs):
        src, dst = closed_edge_arrays(instance)
        for f, y in unroll_examples(instance, slots):
            offset = node_ptr[-1]
            feats.append(f)
            labels.append(y)
            srcs.append(src + offset)
            dsts.append(dst + offset)
            node_ptr.append(offset + instance.node_count)
            edge_ptr.append(edge_ptr[-1] + len(src))
            inst_idx.append(idx)
    return ExampleBatch(
        np.concatenate(feats), np.concatenate(labels),
        np.concatenate(srcs), np.concatenate(dsts),
        np.asarray(node_ptr, dtype=np.int64),
        np.asarray(edge_ptr, dtype=np.int64),
        np.asarray(inst_idx, dtype=np.int64))


@dataclass
class Dataset:
    batch: ExampleBatch
    train_examples: np.ndarray  # example indices
    val_examples: np.ndarray
    meta: dict

    def save(self, directory: Path):
        directory.mkdir(parents=True, exist_ok=True)
        b = self.batch
        np.savez_compressed(
            directory / "examples.npz",
            features=b.features, labels=b.labels, src=b.src, dst=b.dst,
            node_ptr=b.node_ptr, edge_ptr=b.edge_ptr,
            instance_idx=b.instance_idx,
            train_examples=self.train_examples,
            val_examples=self.val_examples)
        (directory / "meta.json").write_text(json.dumps(self.meta, indent=2))

    @classmethod
    def load(cls, directory: Path) -> "Dataset":
        data = np.load(directory / "examples.npz")
        batch = ExampleBatch(
            data["features"], data["labels"], data["src"], data["dst"],
            data["node_ptr"], data["edge_ptr"], data["instance_idx"])
        meta = json.loads((directory / "meta.json").read_text())
        return cls(batch, data["train_examples"], data["val_examples"], meta)


def split_by_instance(instance_idx: np.ndarray, val_fraction: float,
                      seed: int) -> tuple[np.ndarray, np.ndarray]:
    """80/20-style split at instance granularity (slots stay together)."""
    instances = np.unique(instance_idx)
    rng = np.random.default_rng(seed)
    perm = rng.permutation(instances)
    n_val = max(1, int(round(len(instances) * val_fraction)))
    val_set = set(perm[:n_val].tolist())
    example_ids = np.arange(len(instance_idx))
    val_mask = np.array([i in val_set for i in instance_idx])
    return example_ids[~val_mask], example_ids[val_mask]


def generate_dataset(out_dir: Path, count: int, seed: int,
                     node_range=(2, 10), tag_range=(1, 14),
                     model_param: float = 0.6,
                     val_fraction: float = 0.2) -> Dataset:
    """End-to-end corpus build through the scheduler CLI."""
    out_dir.mkdir(parents=True, exist_ok=True)
    instances_path = out_dir / "instances.jsonl"
    labels_path = out_dir / "labels.jsonl"
    run_scheduler_cli(
        "gen", "--nodes", str(node_range[0]), str(node_range[1]),
        "--tags", str(tag_range[0]), str(tag_range[1]),
        "--model-param", str(model_param),
        "--seed", str(seed), "--count", str(count),
        "--out", str(instances_path))
    run_scheduler_cli(
        "solve", "--instances", str(instances_path),
        "--scheduler", "optimal", "--out", str(labels_path))

    pairs = []
    skipped = 0
    inst_lines = instances_path.read_text().strip().splitlines()
    label_lines = labels_path.read_text().strip().splitlines()
    for inst_line, label_line in zip(inst_lines, label_lines):
        slots = parse_schedule_slots(label_line)
        if not slots:
            skipped += 1  # solver timeout or infeasible; logged and dropped
            continue
        pairs.append((parse_instance(inst_line), slots))
    batch = build_batch(pairs)
    train_idx, val_idx = split_by_instance(batch.instance_idx, val_fraction,
                                           seed=seed + 1)
    meta = {
        "count_requested": count, "count_used": len(pairs),
        "skipped": skipped, "seed": seed,
        "node_range": list(node_range), "tag_range": list(tag_range),
        "model_param": model_param, "val_fraction": val_fraction,
        "num_examples": batch.num_examples,
    }
    dataset = Dataset(batch, train_idx, val_idx, meta)
    dataset.save(out_dir)
    return dataset
