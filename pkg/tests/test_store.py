"""Container format integrity and dataset/checkpoint/report round trips."""

import os

import numpy as np
import pytest

from shwave.dataset import default_manifest, generate_dataset
from shwave.evaluate import BenchmarkRecord, BenchmarkReport
from shwave.forward import ReflectionSpectrum, WavenumberGrid
from shwave.netinv.model import build_model, predict
from shwave.store import (
    DatasetFile,
    StoreError,
    checkpoint_from_model,
    load_checkpoint,
    load_dataset,
    load_report,
    model_from_checkpoint,
    read_container,
    save_checkpoint,
    save_dataset,
    save_report,
    write_container,
)


def small_arrays():
    rng = np.random.default_rng(0)
    return {
        "floats": rng.normal(size=(3, 4)),
        "complexes": rng.normal(size=5) + 1j * rng.normal(size=5),
        "ints": np.arange(6, dtype=np.int64).reshape(2, 3),
    }


class TestContainer:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "c.bin"
        arrays = small_arrays()
        meta = {"alpha": 1, "nested": {"s": "text", "v": [1.5, 2.5]}}
        write_container(path, "demo", arrays, meta)
        got, got_meta, kind = read_container(path)
        assert kind == "demo"
        assert got_meta == meta
        for name, arr in arrays.items():
            np.testing.assert_array_equal(got[name], arr)
            assert got[name].dtype == arr.dtype

    def test_small_int_dtypes_widen_to_i8(self, tmp_path):
        path = tmp_path / "c.bin"
        write_container(path, "demo", {"x": np.array([1, 2], dtype=np.int32)}, {})
        got, _, _ = read_container(path)
        assert got["x"].dtype == np.int64
        np.testing.assert_array_equal(got["x"], [1, 2])

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "c.bin"
        path.write_bytes(b"something else entirely\n")
        with pytest.raises(StoreError, match="magic"):
            read_container(path)

    def test_payload_corruption_detected(self, tmp_path):
        path = tmp_path / "c.bin"
        write_container(path, "demo", small_arrays(), {})
        raw = bytearray(path.read_bytes())
        raw[-1] ^= 0xFF
        path.write_bytes(bytes(raw))
        with pytest.raises(StoreError, match="checksum"):
            read_container(path)

    def test_truncated_payload_detected(self, tmp_path):
        path = tmp_path / "c.bin"
        write_container(path, "demo", small_arrays(), {})
        raw = path.read_bytes()
        path.write_bytes(raw[:-16])
        with pytest.raises(StoreError, match="checksum"):
            read_container(path)

    def test_truncated_header_detected(self, tmp_path):
        path = tmp_path / "c.bin"
        write_container(path, "demo", small_arrays(), {})
        raw = path.read_bytes()
        path.write_bytes(raw[:40])
        with pytest.raises(StoreError):
            read_container(path)

    def test_kind_mismatch_rejected(self, tmp_path):
        path = tmp_path / "c.bin"
        write_container(path, "demo", {"x": np.ones(2)}, {})
        with pytest.raises(StoreError, match="kind"):
            read_container(path, expect_kind="dataset")

    def test_unsupported_version_rejected(self, tmp_path):
        path = tmp_path / "c.bin"
        write_container(path, "demo", {"x": np.ones(2)}, {})
        raw = path.read_bytes()
        patched = raw.replace(b'"version":1', b'"version":9', 1)
        assert patched != raw
        path.write_bytes(patched)
        with pytest.raises(StoreError, match="version"):
            read_container(path)

    def test_no_temp_files_left_behind(self, tmp_path):
        path = tmp_path / "c.bin"
        write_container(path, "demo", small_arrays(), {})
        assert sorted(os.listdir(tmp_path)) == ["c.bin"]

    def test_object_dtype_rejected(self, tmp_path):
        with pytest.raises(StoreError):
            write_container(tmp_path / "c.bin", "demo", {"x": np.array(["a", "b"])}, {})


@pytest.fixture(scope="module")
def tiny():
    return generate_dataset(default_manifest(count=6, seed=77))


class TestDatasetFile:
    def test_round_trip_bitwise(self, tmp_path, tiny):
        path = tmp_path / "d.bin"
        save_dataset(path, tiny)
        back = load_dataset(path)
        assert back.manifest == tiny.manifest
        np.testing.assert_array_equal(back.depths, tiny.depths)
        np.testing.assert_array_equal(back.spectra, tiny.spectra)
        np.testing.assert_array_equal(back.family_codes, tiny.family_codes)
        np.testing.assert_array_equal(back.spec_params, tiny.spec_params)

    def test_grid_and_band_properties(self, tiny):
        assert tiny.n_samples == 6
        assert tiny.grid_x.shape == (128,)
        assert tiny.grid_x[0] == -4.0
        assert tiny.xi_samples.shape == (64,)
        assert tiny.xi_samples[0] == pytest.approx(0.2)
        assert tiny.xi_samples[-1] == pytest.approx(3.0)

    def test_family_names_follow_codes(self, tiny):
        names = tiny.family_names()
        manifest_families = tiny.manifest["families"]
        assert names == [manifest_families[int(c)] for c in tiny.family_codes]

    def test_misaligned_arrays_rejected(self, tiny):
        with pytest.raises(StoreError):
            DatasetFile(
                manifest=tiny.manifest,
                depths=tiny.depths,
                spectra=tiny.spectra[:3],
                family_codes=tiny.family_codes,
                spec_params=tiny.spec_params,
            )
        with pytest.raises(StoreError):
            DatasetFile(
                manifest=tiny.manifest,
                depths=tiny.depths,
                spectra=tiny.spectra,
                family_codes=tiny.family_codes,
                spec_params=tiny.spec_params[:, :2],
            )

    def test_loading_other_kind_as_dataset_fails(self, tmp_path):
        path = tmp_path / "x.bin"
        write_container(path, "checkpoint", {"x": np.ones(2)}, {})
        with pytest.raises(StoreError):
            load_dataset(path)


def trained_like_model():
    """A small model dressed with the prediction-time artifacts."""
    model = build_model(seed=3, n_in=16, n_out=16)
    rng = np.random.default_rng(1)
    model.input_mean = rng.normal(size=16)
    model.input_scale = np.abs(rng.normal(size=16)) + 0.5
    model.output_grid = np.linspace(-1.0, 1.0, 16)
    model.clamp_max = 0.8
    return model


class TestCheckpoint:
    def test_round_trip_preserves_predictions(self, tmp_path):
        model = trained_like_model()
        ckpt = checkpoint_from_model(model, train_config={"learning_rate": 1e-3}, best_val_mse=0.01)
        path = tmp_path / "m.bin"
        save_checkpoint(path, ckpt)
        back = model_from_checkpoint(load_checkpoint(path))

        grid = WavenumberGrid(np.linspace(0.5, 2.0, 8))
        rng = np.random.default_rng(9)
        spec = ReflectionSpectrum(grid, rng.normal(size=8) + 1j * rng.normal(size=8))
        np.testing.assert_array_equal(predict(back, spec).depths, predict(model, spec).depths)

    def test_meta_round_trip(self, tmp_path):
        model = trained_like_model()
        ckpt = checkpoint_from_model(model, train_config={"batch_size": 4}, best_val_mse=0.5)
        path = tmp_path / "m.bin"
        save_checkpoint(path, ckpt)
        back = load_checkpoint(path)
        assert back.train_config == {"batch_size": 4}
        assert back.best_val_mse == 0.5
        assert back.clamp_max == 0.8
        assert back.architecture == model.describe()

    def test_missing_statistics_rejected(self):
        model = build_model(seed=0, n_in=16, n_out=16)
        with pytest.raises(StoreError):
            checkpoint_from_model(model)

    def test_parameter_count_mismatch_rejected(self, tmp_path):
        model = trained_like_model()
        ckpt = checkpoint_from_model(model)
        ckpt.parameters.pop()
        with pytest.raises(StoreError):
            model_from_checkpoint(ckpt)

    def test_parameter_shape_mismatch_rejected(self):
        model = trained_like_model()
        ckpt = checkpoint_from_model(model)
        ckpt.parameters[0] = np.zeros((2, 2))
        with pytest.raises(StoreError):
            model_from_checkpoint(ckpt)


class TestReport:
    def test_round_trip_with_errors(self, tmp_path):
        report = BenchmarkReport(
            records=[
                BenchmarkRecord(0, "gaussian", "netinv", 21.5, 0.001),
                BenchmarkRecord(0, "gaussian", "wnst", 8.25, 0.002),
                BenchmarkRecord(1, "vee", "netinv", float("nan"), 0.003, error="boom"),
            ]
        )
        path = tmp_path / "r.bin"
        save_report(path, report, meta={"note": "unit"})
        back, meta = load_report(path)
        assert meta["note"] == "unit"
        assert "family" in meta["table"]
        assert len(back.records) == 3
        assert back.records[0] == report.records[0]
        assert back.records[2].error == "boom"
        assert np.isnan(back.records[2].snr_db)
