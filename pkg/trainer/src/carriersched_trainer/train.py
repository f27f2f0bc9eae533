"""Supervised training loop.

Learning rate = linear warmup to the initial rate (saturating after
2/(1-beta2) mini-batches) times a 2% multiplicative decay per epoch.
The loss is class-weighted cross-entropy averaged over nodes, with extra
weight on the carrier class, plus explicit L2 regularization. Training
early-stops when the validation loss has not improved for `patience`
consecutive epochs; the retained checkpoint is the one with the best
validation carrier-class F1.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import torch

from .dataset import Dataset, ExampleBatch
from .instances import ROLE_CARRIER
from .model import ModelSpec, RoleClassifier


@dataclass(frozen=True)
class TrainConfig:
    max_epochs: int = 200
    batch_size: int = 256
    eps_init: float = 1e-3          # initial learning rate
    lr_epoch_decay: float = 0.02    # 2% multiplicative decay per epoch
    beta2: float = 0.999            # Adam second-moment decay
    carrier_weight: float = 2.0     # extra loss weight on the carrier class
    l2: float = 1e-6
    patience: int = 25
    seed: int = 0
    precision: str = "float32"  # training dtype; exports are float32 anyway

    def __post_init__(self):
        if min(self.max_epochs, self.batch_size, self.patience) < 1:
            raise ValueError("epochs, batch size and patience must be >= 1")
        if min(self.eps_init, self.beta2) <= 0 or self.lr_epoch_decay < 0:
            raise ValueError("rates must be positive")


def warmup_lr(i: int, config: TrainConfig = TrainConfig()) -> float:
    """Untuned linear warmup: eps_init * min(1, (1 - beta2)/2 * i)."""
    if i < 0:
        raise ValueError("mini-batch index must be >= 0")
    return config.eps_init * min(1.0, (1.0 - config.beta2) / 2.0 * i)


def weighted_loss(logits: torch.Tensor, labels: torch.Tensor,
                  carrier_weight: float, l2: float,
                  params) -> torch.Tensor:
    """Mean over nodes of class-weighted cross-entropy plus l2 * sum(p^2)."""
    ce = torch.nn.functional.cross_entropy(logits, labels, reduction="none")
    weights = torch.where(labels == ROLE_CARRIER,
                          torch.tensor(carrier_weight, dtype=logits.dtype),
                          torch.tensor(1.0, dtype=logits.dtype))
    loss = (weights * ce).mean()
    if l2 > 0.0:
        reg = sum((p ** 2).sum() for p in params)
        loss = loss + l2 * reg
    return loss


def _tensors(batch: ExampleBatch, indices: np.ndarray):
    sub = batch.select(indices)
    return (torch.from_numpy(sub.features), torch.from_numpy(sub.labels),
            torch.from_numpy(sub.src), torch.from_numpy(sub.dst))


def carrier_f1(model: RoleClassifier, batch: ExampleBatch,
               indices: np.ndarray, chunk: int = 4096) -> float:
    """F1 of the carrier class over the given examples' nodes."""
    tp = fp = fn = 0
    with torch.no_grad():
        for lo in range(0, len(indices), chunk):
            feats, labels, src, dst = _tensors(batch, indices[lo:lo + chunk])
            pred = model(feats, src, dst).argmax(dim=1)
            is_c = labels == ROLE_CARRIER
            pred_c = pred == ROLE_CARRIER
            tp += int((pred_c & is_c).sum())
            fp += int((pred_c & ~is_c).sum())
            fn += int((~pred_c & is_c).sum())
    if tp == 0:
        return 0.0
    precision = tp / (tp + fp)
    recall = tp / (tp + fn)
    return 2 * precision * recall / (precision + recall)


def _validation_loss(model: RoleClassifier, batch: ExampleBatch,
                     indices: np.ndarray, config: TrainConfig,
                     chunk: int = 4096) -> float:
    total = 0.0
    nodes = 0
    with torch.no_grad():
        for lo in range(0, len(indices), chunk):
            feats, labels, src, dst = _tensors(batch, indices[lo:lo + chunk])
            logits = model(feats, src, dst)
            loss = weighted_loss(logits, labels, config.carrier_weight,
                                 0.0, [])
            total += float(loss) * len(labels)
            nodes += len(labels)
    return total / max(nodes, 1)


@dataclass
class TrainResult:
    model: RoleClassifier
    best_state: dict
    best_f1: float
    log: list[dict]


def train_model(dataset: Dataset, spec: ModelSpec = ModelSpec(),
                config: TrainConfig = TrainConfig(),
                log_path: Path | None = None,
                progress: bool = False) -> TrainResult:
    torch.manual_seed(config.seed)
    torch.use_deterministic_algorithms(True)
    dtype = {"float32": torch.float32, "float64": torch.float64}[config.precision]
    model = RoleClassifier(spec, dtype=dtype)
    model.init_weights(config.seed)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.eps_init,
                                 betas=(0.9, config.beta2))
    batch = dataset.batch
    train_idx = dataset.train_examples.copy()
    rng = np.random.default_rng(config.seed + 17)

    log: list[dict] = []
    best_val_loss = math.inf
    best_f1 = -1.0
    best_state = copy.deepcopy(model.state_dict())
    stale_epochs = 0
    step = 0
    log_file = open(log_path, "w", encoding="utf-8") if log_path else None
    try:
        for epoch in range(config.max_epochs):
            rng.shuffle(train_idx)
            model.train()
            epoch_loss = 0.0
            epoch_nodes = 0
            lr = config.eps_init
            for lo in range(0, len(train_idx), config.batch_size):
                feats, labels, src, dst = _tensors(
                    batch, train_idx[lo:lo + config.batch_size])
                lr = warmup_lr(step, config) * \
                    (1.0 - config.lr_epoch_decay) ** epoch
                for group in optimizer.param_groups:
                    group["lr"] = lr
                optimizer.zero_grad()
                logits = model(feats, src, dst)
                loss = weighted_loss(logits, labels, config.carrier_weight,
                                     config.l2, model.parameters())
                if not torch.isfinite(loss):
                    raise RuntimeError(
                        f"training diverged at epoch {epoch} step {step}: "
                        f"loss={float(loss.detach())}")
                loss.backward()
                optimizer.step()
                epoch_loss += float(loss.detach()) * len(labels)
                epoch_nodes += len(labels)
                step += 1
            model.eval()
            val_loss = _validation_loss(model, batch, dataset.val_examples,
                                        config)
            val_f1 = carrier_f1(model, batch, dataset.val_examples)
            entry = {
                "epoch": epoch,
                "train_loss": epoch_loss / max(epoch_nodes, 1),
                "val_loss": val_loss,
                "val_carrier_f1": val_f1,
                "lr_final": lr,
            }
            log.append(entry)
            if log_file:
                log_file.write(json.dumps(entry) + "\n")
                log_file.flush()
            if progress:
                print(f"epoch {epoch}: train={entry['train_loss']:.4f} "
                      f"val={val_loss:.4f} f1={val_f1:.4f} lr={lr:.2e}")
            if val_f1 > best_f1:
                best_f1 = val_f1
                best_state = copy.deepcopy(model.state_dict())
            if val_loss < best_val_loss - 1e-12:
                best_val_loss = val_loss
                stale_epochs = 0
            else:
                stale_epochs += 1
                if stale_epochs >= config.patience:
                    break
    finally:
        if log_file:
            log_file.close()
    return TrainResult(model=model, best_state=best_state, best_f1=best_f1,
                       log=log)


def save_train_config(config: TrainConfig, spec: ModelSpec, path: Path):
    path.write_text(json.dumps(
        {"train": asdict(config), "model": asdict(spec)}, indent=2))
