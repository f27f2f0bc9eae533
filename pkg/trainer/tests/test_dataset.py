import numpy as np
import pytest

from carriersched_trainer.dataset import (build_batch, generate_dataset,
                                          split_by_instance, unroll_examples,
                                          Dataset)
from carriersched_trainer.instances import (ROLE_CARRIER, ROLE_IDLE,
                                            ROLE_QUERY, build_features,
                                            parse_instance)

from conftest import PATH2, STAR2, tiny_dataset


class TestUnrolling:
    def test_trivial_path_single_example(self, path2):
        examples = unroll_examples(path2, [[(0, 1, 1)]])
        assert len(examples) == 1
        feats, labels = examples[0]
        # hosted, node id, min tag, degree PE
        assert feats.tolist() == [[1.0, 0.0, 1.0, 1.0], [0.0, 1.0, 0.0, 1.0]]
        assert labels.tolist() == [ROLE_QUERY, ROLE_CARRIER]

    def test_star_second_example_sees_tag_removed(self, star2):
        examples = unroll_examples(star2, [[(0, 1, 1)], [(0, 2, 1)]])
        assert len(examples) == 2
        first, second = examples
        assert first[0][0, 0] == 2.0   # both tags pending
        assert second[0][0, 0] == 1.0  # t1 interrogated
        assert second[0][0, 2] == 1.0  # min pending tag is now 2 (= max id)
        assert second[1].tolist() == [ROLE_QUERY, ROLE_CARRIER, ROLE_IDLE]

    def test_incomplete_schedule_rejected(self, star2):
        with pytest.raises(ValueError, match="every tag"):
            unroll_examples(star2, [[(0, 1, 1)]])


class TestSplit:
    def test_split_is_disjoint_at_instance_level(self):
        ds = tiny_dataset(copies=10)
        train_insts = set(ds.batch.instance_idx[ds.train_examples])
        val_insts = set(ds.batch.instance_idx[ds.val_examples])
        assert not (train_insts & val_insts)
        total = len(ds.train_examples) + len(ds.val_examples)
        assert total == ds.batch.num_examples

    def test_split_fraction_respected(self):
        idx = np.repeat(np.arange(100), 3)  # 100 instances, 3 slots each
        train, val = split_by_instance(idx, 0.2, seed=1)
        assert len(set(idx[val])) == 20

    def test_split_deterministic(self):
        idx = np.repeat(np.arange(50), 2)
        a = split_by_instance(idx, 0.2, seed=3)
        b = split_by_instance(idx, 0.2, seed=3)
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


class TestBatch:
    def test_select_offsets_node_indices(self):
        ds = tiny_dataset(copies=1)
        sub = ds.batch.select(np.array([1, 2]))
        assert sub.num_examples == 2
        # second example's edges must point past the first one's nodes
        first_nodes = sub.node_ptr[1]
        assert sub.src[sub.edge_ptr[1]:].min() >= first_nodes

    def test_save_load_round_trip(self, tmp_path):
        ds = tiny_dataset(copies=2)
        ds.save(tmp_path)
        loaded = Dataset.load(tmp_path)
        assert np.array_equal(loaded.batch.features, ds.batch.features)
        assert np.array_equal(loaded.batch.labels, ds.batch.labels)
        assert np.array_equal(loaded.train_examples, ds.train_examples)


class TestEndToEndGeneration:
    def test_generate_via_scheduler_cli(self, tmp_path):
        ds = generate_dataset(tmp_path / "ds", count=15, seed=77_000)
        assert ds.meta["count_used"] + ds.meta["skipped"] == 15
        assert ds.batch.num_examples >= ds.meta["count_used"]
        # every label vector marks at least one query and one carrier
        b = ds.batch
        for i in range(b.num_examples):
            labels = b.labels[b.node_ptr[i]:b.node_ptr[i + 1]]
            assert (labels == ROLE_QUERY).sum() >= 1
            assert (labels == ROLE_CARRIER).sum() >= 1
