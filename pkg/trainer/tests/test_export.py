import numpy as np
import pytest
import torch

from carriersched_trainer.export import (export_weights, load_model,
                                         pack_weights, read_weights)
from carriersched_trainer.model import ModelSpec, RoleClassifier

# the inference package is imported in tests only, to prove the two
# independent implementations of the container agree byte for byte
from carriersched.errors import WeightIntegrityError
from carriersched.weights import GnnModel, load_weights, save_weights
from carriersched.weights import GnnConfig

SPEC = ModelSpec(num_blocks=2, num_heads=3, hidden_dim=12)


def make_model(seed=0) -> RoleClassifier:
    model = RoleClassifier(SPEC)
    model.init_weights(seed)
    model.eval()
    return model


class TestRoundTrip:
    def test_export_read_reexport_byte_identical(self, tmp_path):
        model = make_model()
        path = tmp_path / "w.rgwt"
        export_weights(model, path)
        spec, tensors = read_weights(path)
        assert spec == SPEC
        again = pack_weights(tensors, spec)
        assert again == path.read_bytes()

    def test_load_model_restores_forward(self, tmp_path):
        model = make_model(seed=3)
        path = tmp_path / "w.rgwt"
        export_weights(model, path)
        restored = load_model(path)
        feats = torch.rand(4, 4, dtype=torch.float64,
                           generator=torch.Generator().manual_seed(0))
        src = torch.tensor([0, 1, 2, 3, 0, 1])
        dst = torch.tensor([0, 1, 2, 3, 1, 0])
        a = model(feats, src, dst)
        b = restored(feats, src, dst)
        # restored weights went through float32; small drift is expected
        assert torch.max(torch.abs(a - b)) < 1e-5


class TestCrossPackageFormat:
    def test_writer_matches_inference_packages_writer_byte_for_byte(self):
        model = make_model(seed=5)
        tensors32 = {name: np.ascontiguousarray(arr, dtype=np.float32)
                     for name, arr in model.export_tensors().items()}
        config = GnnConfig(num_blocks=SPEC.num_blocks,
                           num_heads=SPEC.num_heads,
                           hidden_dim=SPEC.hidden_dim)
        theirs = save_weights(GnnModel(config, tensors32))
        ours = pack_weights(model.export_tensors(), SPEC)
        assert ours == theirs

    def test_inference_package_loads_our_export(self, tmp_path):
        model = make_model(seed=6)
        path = tmp_path / "w.rgwt"
        export_weights(model, path)
        loaded = load_weights(path.read_bytes())
        assert loaded.config.num_blocks == SPEC.num_blocks
        for name, arr in model.export_tensors().items():
            assert np.array_equal(loaded.tensors[name],
                                  arr.astype(np.float32))

    def test_transposed_tensor_rejected_by_inference_loader(self):
        model = make_model(seed=7)
        tensors = model.export_tensors()
        tensors["embed.w"] = tensors["embed.w"].T.copy()
        blob = pack_weights(tensors, SPEC)
        with pytest.raises(WeightIntegrityError, match="embed.w"):
            load_weights(blob)
