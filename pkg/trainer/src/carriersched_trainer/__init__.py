"""Supervised trainer for the carriersched GNN scheduler.

Generates labeled datasets from the scheduler package's exact solver (via
its CLI and JSONL wire formats), trains the attention-GNN role classifier
with warmup and per-epoch decay, and exports weights in the binary
container the inference engine loads.
"""

from .dataset import Dataset, generate_dataset
from .export import export_weights, load_model, pack_weights, read_weights
from .model import ModelSpec, RoleClassifier
from .train import TrainConfig, train_model, warmup_lr, weighted_loss

__version__ = "0.1.0"
