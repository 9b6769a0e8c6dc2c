"""Command-line pipeline: generate, train, reconstruct, benchmark, plot.

Configuration precedence is flags > JSON config file (--config) > built-in
defaults.  Every command writes a run manifest (the effective settings)
next to its outputs, and commands are deterministic given their flags and
seed.  Exit code 0 means all outputs were fully written.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__, evaluate, wnst
from .dataset import default_manifest, generate_dataset, split_indices
from .defect import DefectSpec, sample_profile
from .forward import ReflectionSpectrum, WavenumberGrid, reflection_modes
from .netinv import TrainConfig, features_from_coefficients, predict, train
from .store import (
    checkpoint_from_model,
    load_checkpoint,
    load_dataset,
    model_from_checkpoint,
    save_checkpoint,
    save_dataset,
    save_report,
)
from .waveguide import PlateSpec

DEFAULT_SPECTRA_BAND = (4.1 * np.pi, 4.9 * np.pi, 120)


class CliError(Exception):
    """User-facing command failure: message printed, nonzero exit."""


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"config file is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise CliError("config file must contain a JSON object")
    return cfg


def _effective(args: argparse.Namespace, config: dict, key: str, default):
    """flags > config file > default (flags parsed with None sentinels)."""
    value = getattr(args, key.replace("-", "_"), None)
    if value is not None:
        return value
    if key in config:
        return config[key]
    return default


def _write_run_manifest(out_base: str, command: str, effective: dict) -> None:
    manifest = {
        "command": command,
        "settings": effective,
        "package_version": __version__,
        "numpy_version": np.__version__,
    }
    with open(f"{out_base}.run.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_generate(args) -> int:
    config = _load_config(args.config)
    count = int(_effective(args, config, "count", 800))
    if count <= 0:
        raise CliError("--count must be a positive integer")
    seed = int(_effective(args, config, "seed", 20240811))
    noise_std = float(_effective(args, config, "noise-std", 0.0))
    manifest = default_manifest(count=count, seed=seed, noise_std=noise_std)
    n_modes = _effective(args, config, "n-modes", None)
    segments = _effective(args, config, "segments", None)
    if n_modes is not None:
        manifest["solver"]["n_modes"] = int(n_modes)
    if segments is not None:
        manifest["solver"]["segments"] = int(segments)

    t0 = time.perf_counter()
    dataset = generate_dataset(manifest)
    elapsed = time.perf_counter() - t0
    save_dataset(args.out, dataset)
    _write_run_manifest(args.out, "generate", manifest)

    names = dataset.manifest["families"]
    counts = np.bincount(dataset.family_codes, minlength=len(names))
    for name, c in zip(names, counts):
        print(f"{name:12s} {int(c)}")
    print(f"total        {dataset.n_samples}")
    print(f"wall time    {elapsed:.1f} s")
    print(f"wrote {args.out}")
    return 0


def cmd_train(args) -> int:
    config = _load_config(args.config)
    dataset = _open_dataset(args.dataset)
    tc = TrainConfig(
        learning_rate=float(_effective(args, config, "learning-rate", 1e-3)),
        weight_decay_lambda=float(_effective(args, config, "weight-decay", 1e-5)),
        batch_size=int(_effective(args, config, "batch-size", 32)),
        max_epochs=int(_effective(args, config, "max-epochs", 400)),
        early_stop_patience=int(_effective(args, config, "patience", 40)),
        seed=int(_effective(args, config, "seed", dataset.manifest["seed"])),
        optimizer=str(_effective(args, config, "optimizer", "adam")),
    )
    split = split_indices(dataset, seed=tc.seed)
    features = features_from_coefficients(dataset.spectra)
    clamp = 0.8 * dataset.manifest["plate"]["half_thickness_b"] * 2.0

    t0 = time.perf_counter()
    model, history = train(
        features,
        dataset.depths,
        split,
        tc,
        output_grid=dataset.grid_x,
        clamp_max=clamp,
    )
    elapsed = time.perf_counter() - t0

    ckpt = checkpoint_from_model(model, train_config=_trainconfig_dict(tc), best_val_mse=history["best_val_mse"])
    save_checkpoint(args.out, ckpt)
    from .plots import write_columns

    write_columns(
        f"{args.out}.history.tsv",
        {
            "epoch": np.arange(len(history["train_mse"])),
            "train_mse": np.array(history["train_mse"]),
            "val_mse": np.array(history["val_mse"]),
        },
    )
    _write_run_manifest(
        args.out,
        "train",
        {"dataset": args.dataset, "config": _trainconfig_dict(tc), "split_sizes": {k: int(v.size) for k, v in split.items()}},
    )
    print(f"epochs run     {len(history['train_mse'])}")
    print(f"best epoch     {history['best_epoch']}")
    print(f"best val MSE   {history['best_val_mse']:.3e}")
    print(f"wall time      {elapsed:.1f} s")
    print(f"wrote {args.out}")
    return 0


def _trainconfig_dict(tc: TrainConfig) -> dict:
    return {
        "learning_rate": tc.learning_rate,
        "weight_decay_lambda": tc.weight_decay_lambda,
        "batch_size": tc.batch_size,
        "max_epochs": tc.max_epochs,
        "early_stop_patience": tc.early_stop_patience,
        "seed": tc.seed,
        "optimizer": tc.optimizer,
    }


def _open_dataset(path: str):
    try:
        return load_dataset(path)
    except FileNotFoundError as exc:
        raise CliError(f"dataset file not found: {path}") from exc


def _open_checkpoint(path: str | None):
    if not path:
        raise CliError("--checkpoint is required for method netinv")
    try:
        return load_checkpoint(path)
    except FileNotFoundError as exc:
        raise CliError(f"checkpoint file not found: {path}") from exc


def _sample_spectrum(dataset, index: int) -> ReflectionSpectrum:
    if not 0 <= index < dataset.n_samples:
        raise CliError(f"sample index {index} outside dataset (0..{dataset.n_samples - 1})")
    grid = WavenumberGrid(dataset.xi_samples)
    return ReflectionSpectrum(grid=grid, coefficients=dataset.spectra[index])


def cmd_reconstruct(args) -> int:
    dataset = _open_dataset(args.dataset)
    spectrum = _sample_spectrum(dataset, args.sample)
    plate = PlateSpec(**dataset.manifest["plate"])
    truth = dataset.depths[args.sample]
    grid_x = dataset.grid_x

    t0 = time.perf_counter()
    if args.method == "wnst":
        recon = wnst.reconstruct(spectrum, grid_x, plate)
    else:
        model = model_from_checkpoint(_open_checkpoint(args.checkpoint))
        recon = predict(model, spectrum)
    elapsed = time.perf_counter() - t0

    value = evaluate.snr_db(truth, recon.depths)
    from .plots import plot_profiles, write_columns

    write_columns(
        f"{args.out}.tsv",
        {"x": grid_x, "true": truth, args.method: recon.depths},
    )
    if args.plot:
        plot_profiles(grid_x, truth, {args.method: recon.depths}, f"{args.out}.svg", f"{args.out}.tsv")
    _write_run_manifest(
        args.out,
        "reconstruct",
        {
            "dataset": args.dataset,
            "sample": args.sample,
            "method": args.method,
            "checkpoint": args.checkpoint,
            "snr_db": value,
            "wall_time_s": elapsed,
        },
    )
    print(f"sample {args.sample} ({dataset.family_names()[args.sample]})")
    print(f"method {args.method}")
    print(f"SNR    {value:.2f} dB")
    print(f"time   {elapsed * 1000:.1f} ms")
    print(f"wrote {args.out}.tsv")
    return 0


def cmd_benchmark(args) -> int:
    dataset = _open_dataset(args.dataset)
    ckpt = _open_checkpoint(args.checkpoint)
    model = model_from_checkpoint(ckpt)
    plate = PlateSpec(**dataset.manifest["plate"])
    grid_x = dataset.grid_x
    split = split_indices(dataset, seed=args.seed)
    test_idx = split["test"]

    names = dataset.family_names()
    samples = []
    for i in test_idx:
        samples.append((int(i), names[i], dataset.depths[i], _sample_spectrum(dataset, int(i))))
    methods = {
        "wnst": lambda s: wnst.reconstruct(s, grid_x, plate),
        "netinv": lambda s: predict(model, s),
    }
    report = evaluate.benchmark(samples, methods)

    save_report(f"{args.out}.report", report, meta={"dataset": args.dataset, "checkpoint": args.checkpoint})
    table = report.render_text()
    with open(f"{args.out}.txt", "w") as fh:
        fh.write(table)
    from .plots import write_columns

    write_columns(
        f"{args.out}.tsv",
        {
            "sample_id": np.array([r.sample_id for r in report.records], dtype=np.int64),
            "method": np.array([0 if r.method == "netinv" else 1 for r in report.records], dtype=np.int64),
            "snr_db": np.array([r.snr_db for r in report.records]),
            "wall_time_s": np.array([r.wall_time_s for r in report.records]),
        },
    )
    _write_run_manifest(
        args.out,
        "benchmark",
        {"dataset": args.dataset, "checkpoint": args.checkpoint, "n_test": int(test_idx.size)},
    )
    print(table, end="")
    print(f"wrote {args.out}.txt")
    return 0


def cmd_plot(args) -> int:
    from . import plots

    if args.target == "spectra":
        plate = PlateSpec()
        lo, hi, n = args.omega_band
        spec = DefectSpec(args.family, args.center, args.width, args.dmax)
        grid_x = np.linspace(-4.0, 4.0, 257)
        profile = sample_profile(spec, grid_x, plate)
        omegas = np.linspace(lo, hi, int(n))
        xi_b, mag = reflection_modes(plate, profile, omegas, n_report=5, n_modes=16)
        plots.plot_spectra(xi_b, mag, f"{args.out}.svg", f"{args.out}.tsv")
        _write_run_manifest(
            args.out,
            "plot",
            {
                "target": "spectra",
                "family": args.family,
                "center": args.center,
                "width": args.width,
                "dmax": args.dmax,
                "omega_band": [lo, hi, int(n)],
            },
        )
    elif args.target == "profiles":
        dataset = _open_dataset(args.dataset)
        spectrum = _sample_spectrum(dataset, args.sample)
        plate = PlateSpec(**dataset.manifest["plate"])
        grid_x = dataset.grid_x
        truth = dataset.depths[args.sample]
        recons = {"wnst": wnst.reconstruct(spectrum, grid_x, plate).depths}
        if args.checkpoint:
            model = model_from_checkpoint(_open_checkpoint(args.checkpoint))
            recons["netinv"] = predict(model, spectrum).depths
        plots.plot_profiles(grid_x, truth, recons, f"{args.out}.svg", f"{args.out}.tsv")
        _write_run_manifest(
            args.out,
            "plot",
            {"target": "profiles", "dataset": args.dataset, "sample": args.sample, "checkpoint": args.checkpoint},
        )
    else:  # history
        rows = np.genfromtxt(args.history, delimiter="\t", names=True)
        if rows.size == 0:
            raise CliError(f"history file {args.history} is empty")
        plots.plot_history(rows["train_mse"], rows["val_mse"], f"{args.out}.svg", f"{args.out}.tsv")
        _write_run_manifest(args.out, "plot", {"target": "history", "history": args.history})
    print(f"wrote {args.out}.svg")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _omega_band(text: str):
    try:
        lo, hi, n = text.split(":")
        return float(lo), float(hi), int(n)
    except ValueError as exc:
        raise argparse.ArgumentTypeError("expected LO:HI:N") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shwave",
        description="Guided-wave defect simulation, inversion, and benchmarking.",
    )
    parser.add_argument("--version", action="version", version=f"shwave {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a synthetic dataset")
    p.add_argument("--count", type=int, default=None, help="number of defects (default 800)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--n-modes", type=int, default=None)
    p.add_argument("--segments", type=int, default=None)
    p.add_argument("--noise-std", type=float, default=None, help="additive complex noise on spectra")
    p.add_argument("--config", default=None, help="JSON config file")
    p.add_argument("--out", required=True, help="output dataset path")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("train", help="train the inversion network")
    p.add_argument("--dataset", required=True)
    p.add_argument("--learning-rate", type=float, default=None)
    p.add_argument("--weight-decay", type=float, default=None)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--max-epochs", type=int, default=None)
    p.add_argument("--patience", type=int, default=None)
    p.add_argument("--optimizer", choices=("adam", "sgd"), default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--out", required=True, help="output checkpoint path")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("reconstruct", help="reconstruct one defect")
    p.add_argument("--dataset", required=True)
    p.add_argument("--sample", type=int, required=True)
    p.add_argument("--method", choices=("wnst", "netinv"), required=True)
    p.add_argument("--checkpoint", default=None)
    p.add_argument("--plot", action="store_true")
    p.add_argument("--out", required=True, help="output base path")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("benchmark", help="run both methods over the test split")
    p.add_argument("--dataset", required=True)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--seed", type=int, default=None, help="split seed (default: dataset seed)")
    p.add_argument("--out", required=True, help="output base path")
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("plot", help="emit figures with columnar data")
    p.add_argument("--target", choices=("spectra", "profiles", "history"), required=True)
    p.add_argument("--family", choices=("rectangular", "gaussian", "vee"), default="vee")
    p.add_argument("--center", type=float, default=0.0)
    p.add_argument("--width", type=float, default=2.0)
    p.add_argument("--dmax", type=float, default=0.6)
    p.add_argument("--omega-band", type=_omega_band, default=DEFAULT_SPECTRA_BAND, help="LO:HI:N sweep")
    p.add_argument("--dataset", default=None)
    p.add_argument("--sample", type=int, default=0)
    p.add_argument("--checkpoint", default=None)
    p.add_argument("--history", default=None)
    p.add_argument("--out", required=True, help="output base path")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "plot":
        if args.target == "profiles" and not args.dataset:
            parser.error("plot --target profiles requires --dataset")
        if args.target == "history" and not args.history:
            parser.error("plot --target history requires --history")
    out_dir = os.path.dirname(getattr(args, "out", "") or "")
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - report, nonzero exit
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
