"""Tests for versioned model serialization."""

import json

import numpy as np
import pytest

from twinreg import data as data_mod
from twinreg import hierarchy as hier_mod
from twinreg import tsvr
from twinreg.hierarchy import HierarchyConfig
from twinreg.model_io import (
    CorruptModel,
    ModelIOError,
    SchemaVersionMismatch,
    load_model,
    save_model,
)
from twinreg.tsvr import KernelSpec, TrainingSet, TsvrParams


def linear_model(seed=0):
    rng = np.random.default_rng(seed)
    ts = TrainingSet(rng.normal(size=(12, 2)), rng.normal(size=12))
    return tsvr.train(ts, TsvrParams(1.0, 2.0, 0.1, 0.2, 0.05, 0.1))


def kernel_model(seed=1):
    rng = np.random.default_rng(seed)
    ts = TrainingSet(rng.normal(size=(10, 1)), rng.normal(size=10))
    return tsvr.train(
        ts, TsvrParams(1.0, 1.0, 0.1, 0.1, 0.05, 0.05, KernelSpec("gaussian", 1.3))
    )


def hierarchy_model(seed=2):
    ds = data_mod.generate(data_mod.sinc_spec(seed=seed, n_train=50, n_test=10))
    return hier_mod.train_hierarchy(ds.train, HierarchyConfig(max_layers=3))


class TestRoundTrip:
    @pytest.mark.parametrize("factory", [linear_model, kernel_model])
    def test_tsvr_predictions_identical(self, tmp_path, factory):
        model = factory()
        path = tmp_path / "model.json"
        save_model(model, path)
        loaded = load_model(path)
        rng = np.random.default_rng(9)
        x = rng.normal(size=(100, model.input_dim))
        np.testing.assert_allclose(
            tsvr.predict(loaded, x), tsvr.predict(model, x), atol=1e-12
        )

    def test_tsvr_diagnostics_preserved(self, tmp_path):
        model = linear_model()
        path = tmp_path / "model.json"
        save_model(model, path)
        loaded = load_model(path)
        np.testing.assert_array_equal(
            loaded.diagnostics.alpha, model.diagnostics.alpha
        )
        np.testing.assert_array_equal(
            loaded.diagnostics.gamma, model.diagnostics.gamma
        )
        assert loaded.diagnostics.xi_star_norm == model.diagnostics.xi_star_norm
        assert loaded.diagnostics.dual_objective_down == \
            model.diagnostics.dual_objective_down
        assert loaded.params == model.params

    def test_hierarchy_round_trip(self, tmp_path):
        model = hierarchy_model()
        path = tmp_path / "model.json"
        save_model(model, path)
        loaded = load_model(path)
        assert len(loaded.layers) == len(model.layers)
        rng = np.random.default_rng(4)
        x = rng.uniform(-12, 12, size=(100, 1))
        np.testing.assert_allclose(
            hier_mod.predict_hierarchy(loaded, x),
            hier_mod.predict_hierarchy(model, x),
            atol=1e-12,
        )
        for la, lb in zip(loaded.layers, model.layers):
            assert la.b_v == lb.b_v
            assert la.b_v_prime == lb.b_v_prime
            assert la.second_pass_adopted == lb.second_pass_adopted
            np.testing.assert_array_equal(la.pruned_indices, lb.pruned_indices)
        assert loaded.training_report["stop_reason"] == \
            model.training_report["stop_reason"]


class TestFailureModes:
    def test_truncated_file_is_corrupt(self, tmp_path):
        path = tmp_path / "model.json"
        save_model(linear_model(), path)
        text = path.read_text()
        path.write_text(text[: len(text) // 2])
        with pytest.raises(CorruptModel):
            load_model(path)

    def test_unknown_version_rejected(self, tmp_path):
        path = tmp_path / "model.json"
        save_model(linear_model(), path)
        record = json.loads(path.read_text())
        record["format_version"] = 99
        path.write_text(json.dumps(record))
        with pytest.raises(SchemaVersionMismatch):
            load_model(path)

    def test_tampered_payload_fails_checksum(self, tmp_path):
        path = tmp_path / "model.json"
        save_model(linear_model(), path)
        record = json.loads(path.read_text())
        record["payload"]["b1"] = record["payload"]["b1"] + 1.0
        path.write_text(json.dumps(record))
        with pytest.raises(CorruptModel):
            load_model(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ModelIOError):
            load_model(tmp_path / "nope.json")

    def test_unserializable_type_rejected(self, tmp_path):
        with pytest.raises(TypeError):
            save_model(object(), tmp_path / "x.json")
