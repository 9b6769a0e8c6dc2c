"""Figure output: vector graphics plus plain columnar data for every plot.

Each plotting helper writes an SVG and a tab-separated table carrying the
exact plotted numbers, so figures can be regenerated or inspected without
any plotting runtime.  SVG output is made byte-stable (fixed hash salt, no
embedded date).
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["write_columns", "plot_spectra", "plot_profiles", "plot_history"]

plt.rcParams["svg.hashsalt"] = "shwave"


def write_columns(path, columns: dict[str, np.ndarray]) -> None:
    """Write named columns as a TSV file with a header row."""
    names = list(columns)
    arrays = [np.asarray(columns[n]) for n in names]
    rows = arrays[0].shape[0]
    if any(a.shape != (rows,) for a in arrays):
        raise ValueError("all columns must be 1-D and equally long")
    with open(path, "w") as fh:
        fh.write("\t".join(names) + "\n")
        for i in range(rows):
            fh.write("\t".join(format(a[i], ".17g") for a in arrays) + "\n")


def _save(fig, out_svg):
    fig.savefig(out_svg, format="svg", metadata={"Date": None})
    plt.close(fig)


def plot_spectra(xi_b: np.ndarray, magnitudes: np.ndarray, out_svg, out_tsv) -> None:
    """Reflection magnitude of several modes against the dimensionless
    wavenumber xi_n * b of each mode.

    ``xi_b`` and ``magnitudes`` have shape (n_frequencies, n_modes).
    """
    xi_b = np.asarray(xi_b)
    mag = np.asarray(magnitudes)
    n_modes = xi_b.shape[1]
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for n in range(n_modes):
        ax.plot(xi_b[:, n], mag[:, n], label=f"n = {n}")
    ax.set_xlabel(r"$\xi_n b$")
    ax.set_ylabel(r"$|C^{\mathrm{ref}}_n|$")
    ax.set_ylim(0.0, 1.05)
    ax.legend(frameon=False)
    ax.grid(alpha=0.3)
    _save(fig, out_svg)

    columns = {}
    for n in range(n_modes):
        columns[f"xi_b_n{n}"] = xi_b[:, n]
        columns[f"mag_n{n}"] = mag[:, n]
    write_columns(out_tsv, columns)


def plot_profiles(x: np.ndarray, truth: np.ndarray | None, recons: dict[str, np.ndarray], out_svg, out_tsv) -> None:
    """Overlay a true depth profile with one or more reconstructions."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    if truth is not None:
        ax.plot(x, truth, "k-", lw=2, label="true")
    for name, values in recons.items():
        ax.plot(x, values, lw=1.2, label=name)
    ax.set_xlabel(r"$x_1$")
    ax.set_ylabel("depth d(x)")
    ax.legend(frameon=False)
    ax.grid(alpha=0.3)
    _save(fig, out_svg)

    columns = {"x": np.asarray(x)}
    if truth is not None:
        columns["true"] = np.asarray(truth)
    columns.update({k: np.asarray(v) for k, v in recons.items()})
    write_columns(out_tsv, columns)


def plot_history(train_mse, val_mse, out_svg, out_tsv) -> None:
    """Training and validation loss curves per epoch."""
    train_mse = np.asarray(train_mse, dtype=float)
    val_mse = np.asarray(val_mse, dtype=float)
    epochs = np.arange(train_mse.size)
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.semilogy(epochs, train_mse, label="train MSE")
    ax.semilogy(epochs, val_mse, label="validation MSE")
    ax.set_xlabel("epoch")
    ax.set_ylabel("MSE")
    ax.legend(frameon=False)
    ax.grid(alpha=0.3)
    _save(fig, out_svg)
    write_columns(out_tsv, {"epoch": epochs, "train_mse": train_mse, "val_mse": val_mse})
