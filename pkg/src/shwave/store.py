"""Persistence: one self-describing container format for datasets, model
checkpoints, and benchmark reports.

File layout (all integers decimal ASCII, payload little-endian):

    line 1   magic  ``#shwave-container v1``
    line 2   decimal byte length of the JSON header
    then     the JSON header (UTF-8, sorted keys), a single newline,
    then     the raw binary payload.

The header carries the container kind, a directory of arrays (name, dtype,
shape, byte offset, byte count) into the payload, a SHA-256 checksum of the
payload, and a free-form ``meta`` object (the manifest).  Files are written
atomically: to a temporary file in the target directory, then renamed over
the destination.  Loads verify magic, version, and checksum before any
object is constructed, so a truncated or corrupted file never yields
partial data.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "StoreError",
    "DatasetFile",
    "Checkpoint",
    "save_dataset",
    "load_dataset",
    "save_checkpoint",
    "load_checkpoint",
    "save_report",
    "load_report",
    "write_container",
    "read_container",
]

MAGIC = b"#shwave-container v1"
VERSION = 1

# dtypes permitted in the payload; everything is little-endian on disk
_ALLOWED_DTYPES = {"<f8", "<c16", "<i8"}


class StoreError(ValueError):
    """Raised for version, checksum, or dimension problems in stored files."""


def _canonical_dtype(arr: np.ndarray) -> str:
    kind = arr.dtype.kind
    if kind == "f":
        return "<f8"
    if kind == "c":
        return "<c16"
    if kind in ("i", "u", "b"):
        return "<i8"
    raise StoreError(f"unsupported array dtype {arr.dtype}")


def write_container(path, kind: str, arrays: dict[str, np.ndarray], meta: dict) -> None:
    """Serialize named arrays plus a manifest to ``path`` atomically."""
    directory = []
    chunks = []
    offset = 0
    for name in sorted(arrays):
        arr = np.ascontiguousarray(arrays[name])
        dtype = _canonical_dtype(arr)
        data = arr.astype(dtype, copy=False).tobytes()
        directory.append(
            {
                "name": name,
                "dtype": dtype,
                "shape": list(arr.shape),
                "offset": offset,
                "nbytes": len(data),
            }
        )
        chunks.append(data)
        offset += len(data)
    payload = b"".join(chunks)
    header = {
        "format": "shwave-container",
        "version": VERSION,
        "kind": kind,
        "byte_order": "little",
        "checksum": {"algorithm": "sha256", "payload": hashlib.sha256(payload).hexdigest()},
        "arrays": directory,
        "meta": meta,
    }
    header_bytes = json.dumps(header, sort_keys=True, separators=(",", ":")).encode()

    path = os.fspath(path)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(os.path.abspath(path)) or ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(MAGIC + b"\n")
            fh.write(str(len(header_bytes)).encode() + b"\n")
            fh.write(header_bytes)
            fh.write(b"\n")
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_container(path, expect_kind: str | None = None):
    """Read and verify a container; returns (arrays dict, meta dict, kind)."""
    with open(path, "rb") as fh:
        if fh.readline().rstrip(b"\n") != MAGIC:
            raise StoreError(f"{path}: not a shwave container (bad magic)")
        try:
            header_len = int(fh.readline().strip())
        except ValueError as exc:
            raise StoreError(f"{path}: malformed header length") from exc
        header_bytes = fh.read(header_len)
        if len(header_bytes) != header_len or fh.read(1) != b"\n":
            raise StoreError(f"{path}: truncated header")
        try:
            header = json.loads(header_bytes)
        except json.JSONDecodeError as exc:
            raise StoreError(f"{path}: corrupt header JSON") from exc
        if header.get("version") != VERSION:
            raise StoreError(
                f"{path}: unsupported container version {header.get('version')!r}"
            )
        if expect_kind is not None and header.get("kind") != expect_kind:
            raise StoreError(
                f"{path}: expected kind {expect_kind!r}, found {header.get('kind')!r}"
            )
        payload = fh.read()

    recorded = header["checksum"]["payload"]
    actual = hashlib.sha256(payload).hexdigest()
    if actual != recorded:
        raise StoreError(f"{path}: payload checksum mismatch (file corrupt or truncated)")

    arrays = {}
    for entry in header["arrays"]:
        dtype = entry["dtype"]
        if dtype not in _ALLOWED_DTYPES:
            raise StoreError(f"{path}: disallowed dtype {dtype!r}")
        start, nbytes = entry["offset"], entry["nbytes"]
        if start + nbytes > len(payload):
            raise StoreError(f"{path}: array {entry['name']!r} overruns payload")
        arr = np.frombuffer(payload[start : start + nbytes], dtype=dtype)
        expected = int(np.prod(entry["shape"], dtype=np.int64)) if entry["shape"] else 1
        if arr.size != expected:
            raise StoreError(f"{path}: array {entry['name']!r} size mismatch")
        arrays[entry["name"]] = arr.reshape(entry["shape"]).copy()
    return arrays, header["meta"], header["kind"]


# ---------------------------------------------------------------------------
# datasets
# ---------------------------------------------------------------------------


@dataclass
class DatasetFile:
    """Synthetic dataset: manifest plus aligned per-sample arrays.

    arrays: ``depths`` (N, P) float, ``spectra`` (N, M) complex,
    ``family_codes`` (N,) int indexing into manifest["families"],
    ``spec_params`` (N, 3) float columns (center, width, max_depth).
    The manifest fully determines the dataset: regenerating with its seed
    and settings reproduces every array bit for bit.
    """

    manifest: dict
    depths: np.ndarray
    spectra: np.ndarray
    family_codes: np.ndarray
    spec_params: np.ndarray

    def __post_init__(self):
        n, p = self.depths.shape
        m = self.spectra.shape[1]
        if self.spectra.shape[0] != n or self.family_codes.shape != (n,):
            raise StoreError("dataset arrays misaligned")
        if self.spec_params.shape != (n, 3):
            raise StoreError("dataset arrays misaligned")
        if p != int(self.manifest["grid"]["n_points"]) or m != int(self.manifest["band"]["m_samples"]):
            raise StoreError("dataset arrays do not match manifest dimensions")

    @property
    def n_samples(self) -> int:
        return self.depths.shape[0]

    @property
    def grid_x(self) -> np.ndarray:
        g = self.manifest["grid"]
        return g["x_start"] + g["spacing"] * np.arange(int(g["n_points"]))

    @property
    def xi_samples(self) -> np.ndarray:
        b = self.manifest["band"]
        return np.linspace(b["xi_min"], b["xi_max"], int(b["m_samples"]))

    def family_names(self) -> list[str]:
        names = self.manifest["families"]
        return [names[int(c)] for c in self.family_codes]


def save_dataset(path, dataset: DatasetFile) -> None:
    write_container(
        path,
        "dataset",
        {
            "depths": dataset.depths,
            "spectra": dataset.spectra,
            "family_codes": dataset.family_codes,
            "spec_params": dataset.spec_params,
        },
        dataset.manifest,
    )


def load_dataset(path) -> DatasetFile:
    arrays, meta, _ = read_container(path, expect_kind="dataset")
    for key in ("depths", "spectra", "family_codes", "spec_params"):
        if key not in arrays:
            raise StoreError(f"{path}: dataset missing array {key!r}")
    return DatasetFile(
        manifest=meta,
        depths=arrays["depths"],
        spectra=arrays["spectra"],
        family_codes=arrays["family_codes"],
        spec_params=arrays["spec_params"],
    )


# ---------------------------------------------------------------------------
# checkpoints
# ---------------------------------------------------------------------------


@dataclass
class Checkpoint:
    """Trained-model snapshot: architecture, parameters, input statistics."""

    architecture: dict
    parameters: list[np.ndarray]
    input_mean: np.ndarray
    input_scale: np.ndarray
    output_grid: np.ndarray
    clamp_max: float
    train_config: dict = field(default_factory=dict)
    best_val_mse: float = float("nan")


def save_checkpoint(path, ckpt: Checkpoint) -> None:
    arrays = {f"param_{i:03d}": p for i, p in enumerate(ckpt.parameters)}
    arrays["input_mean"] = ckpt.input_mean
    arrays["input_scale"] = ckpt.input_scale
    arrays["output_grid"] = ckpt.output_grid
    meta = {
        "architecture": ckpt.architecture,
        "n_parameters": len(ckpt.parameters),
        "clamp_max": ckpt.clamp_max,
        "train_config": ckpt.train_config,
        "best_val_mse": ckpt.best_val_mse,
    }
    write_container(path, "checkpoint", arrays, meta)


def load_checkpoint(path) -> Checkpoint:
    arrays, meta, _ = read_container(path, expect_kind="checkpoint")
    n_params = int(meta["n_parameters"])
    params = []
    for i in range(n_params):
        key = f"param_{i:03d}"
        if key not in arrays:
            raise StoreError(f"{path}: checkpoint missing parameter array {key}")
        params.append(arrays[key])
    return Checkpoint(
        architecture=meta["architecture"],
        parameters=params,
        input_mean=arrays["input_mean"],
        input_scale=arrays["input_scale"],
        output_grid=arrays["output_grid"],
        clamp_max=float(meta["clamp_max"]),
        train_config=meta.get("train_config", {}),
        best_val_mse=float(meta.get("best_val_mse", float("nan"))),
    )


def checkpoint_from_model(model, train_config: dict | None = None, best_val_mse: float = float("nan")) -> Checkpoint:
    """Snapshot a trained model (see netinv.model.Model)."""
    if model.input_mean is None or model.output_grid is None:
        raise StoreError("model is missing standardization statistics or output grid")
    return Checkpoint(
        architecture=model.describe(),
        parameters=[p.copy() for p in model.parameters()],
        input_mean=model.input_mean.copy(),
        input_scale=model.input_scale.copy(),
        output_grid=model.output_grid.copy(),
        clamp_max=model.clamp_max,
        train_config=dict(train_config or {}),
        best_val_mse=best_val_mse,
    )


def model_from_checkpoint(ckpt: Checkpoint):
    """Rebuild a ready-to-predict model from a checkpoint."""
    from .netinv.model import build_from_descriptor

    model = build_from_descriptor(ckpt.architecture)
    expected = len(model.parameters())
    if len(ckpt.parameters) != expected:
        raise StoreError(
            f"checkpoint has {len(ckpt.parameters)} parameter arrays, architecture needs {expected}"
        )
    try:
        model.set_parameters(ckpt.parameters)
    except ValueError as exc:
        raise StoreError(f"checkpoint parameters do not fit architecture: {exc}") from exc
    model.input_mean = ckpt.input_mean.copy()
    model.input_scale = ckpt.input_scale.copy()
    model.output_grid = ckpt.output_grid.copy()
    model.clamp_max = ckpt.clamp_max
    return model


# ---------------------------------------------------------------------------
# benchmark reports
# ---------------------------------------------------------------------------


def save_report(path, report, meta: dict | None = None) -> None:
    """Persist a BenchmarkReport's records as columnar arrays."""
    records = report.records
    methods = sorted({r.method for r in records})
    families = sorted({r.family for r in records})
    arrays = {
        "sample_id": np.array([r.sample_id for r in records], dtype=np.int64),
        "family_code": np.array([families.index(r.family) for r in records], dtype=np.int64),
        "method_code": np.array([methods.index(r.method) for r in records], dtype=np.int64),
        "snr_db": np.array([r.snr_db for r in records], dtype=float),
        "wall_time_s": np.array([r.wall_time_s for r in records], dtype=float),
    }
    full_meta = {
        "methods": methods,
        "families": families,
        "errors": {str(i): r.error for i, r in enumerate(records) if r.error},
        "table": report.render_text(),
    }
    full_meta.update(meta or {})
    write_container(path, "report", arrays, full_meta)


def load_report(path):
    from .evaluate import BenchmarkRecord, BenchmarkReport

    arrays, meta, _ = read_container(path, expect_kind="report")
    report = BenchmarkReport()
    errors = meta.get("errors", {})
    for i in range(arrays["sample_id"].size):
        report.records.append(
            BenchmarkRecord(
                sample_id=int(arrays["sample_id"][i]),
                family=meta["families"][int(arrays["family_code"][i])],
                method=meta["methods"][int(arrays["method_code"][i])],
                snr_db=float(arrays["snr_db"][i]),
                wall_time_s=float(arrays["wall_time_s"][i]),
                error=errors.get(str(i), ""),
            )
        )
    return report, meta
