import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # oracle/mutations helpers

from carriersched.core import ProblemInstance, Topology
from carriersched.generate import GeneratorConfig, GraphModel, generate_corpus


@pytest.fixture
def path2():
    """v0-v1 with t1 on v0; the smallest schedulable instance."""
    return ProblemInstance(Topology(2, [(0, 1)]), [(1, 0)])


@pytest.fixture
def path3_two_tags():
    """v0-v1-v2 with t1 on v0 and t2 on v2; one carrier can serve both."""
    return ProblemInstance(Topology(3, [(0, 1), (1, 2)]), [(1, 0), (2, 2)])


@pytest.fixture
def star_two_tags():
    """Center v0 hosts t1 and t2, leaves v1 and v2; needs two slots."""
    return ProblemInstance(Topology(3, [(0, 1), (0, 2)]), [(1, 0), (2, 0)])


@pytest.fixture
def triangle_one_tag():
    return ProblemInstance(
        Topology(3, [(0, 1), (0, 2), (1, 2)]), [(1, 0)])


def small_corpus(count: int, seed: int = 0, node_range=(2, 6),
                 tag_range=(1, 4)) -> list[ProblemInstance]:
    config = GeneratorConfig(node_range=node_range, tag_range=tag_range,
                             graph_model=GraphModel.RANDOM_GEOMETRIC,
                             model_param=0.7, seed=seed)
    return generate_corpus(config, count)


def training_scale_corpus(count: int, seed: int = 0) -> list[ProblemInstance]:
    config = GeneratorConfig(node_range=(2, 10), tag_range=(1, 14),
                             graph_model=GraphModel.RANDOM_GEOMETRIC,
                             model_param=0.6, seed=seed)
    return generate_corpus(config, count)
