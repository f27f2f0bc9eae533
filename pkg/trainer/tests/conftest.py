import json
from pathlib import Path

import numpy as np
import pytest

from carriersched_trainer.dataset import (Dataset, build_batch,
                                          split_by_instance)
from carriersched_trainer.instances import Instance, parse_instance

ARTIFACTS = Path(__file__).parent.parent / "artifacts" / "run1"

PATH2 = '{"nodes":2,"edges":[[0,1]],"tags":[{"id":1,"host":0}]}'
PATH3 = ('{"nodes":3,"edges":[[0,1],[1,2]],'
         '"tags":[{"id":1,"host":0},{"id":2,"host":2}]}')
STAR2 = ('{"nodes":3,"edges":[[0,1],[0,2]],'
         '"tags":[{"id":1,"host":0},{"id":2,"host":0}]}')


@pytest.fixture
def path2() -> Instance:
    return parse_instance(PATH2)


@pytest.fixture
def star2() -> Instance:
    return parse_instance(STAR2)


def tiny_dataset(copies: int = 6, seed: int = 0) -> Dataset:
    """Hand-labeled dataset over the three fixture instances."""
    pairs = []
    for _ in range(copies):
        pairs.append((parse_instance(PATH2), [[(0, 1, 1)]]))
        pairs.append((parse_instance(PATH3), [[(0, 1, 1), (2, 2, 1)]]))
        pairs.append((parse_instance(STAR2), [[(0, 1, 1)], [(0, 2, 1)]]))
    batch = build_batch(pairs)
    train_idx, val_idx = split_by_instance(batch.instance_idx, 0.2, seed)
    return Dataset(batch, train_idx, val_idx,
                   {"count_used": len(pairs), "seed": seed})
