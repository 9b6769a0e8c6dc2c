"""Reconstruction quality metric, dataset splitting, and benchmark reports.

The quality metric is a scale-optimal signal-to-noise ratio

    SNR(x, xhat) = max_a 10 log10( ||x||^2 / ||x - a xhat||^2 ),

whose inner maximum has the closed form a* = <x, xhat> / ||xhat||^2.  The
metric is invariant to any nonzero rescaling of the reconstruction and is
bounded below by 0 dB (a = 0 is always admissible).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .defect import DepthProfile

__all__ = [
    "SNR_CAP_DB",
    "snr_db",
    "split_dataset",
    "BenchmarkRecord",
    "BenchmarkReport",
    "benchmark",
]

SNR_CAP_DB = 300.0

SPLIT_FRACTIONS = (0.875, 0.075, 0.05)  # train / validation / test
SPLIT_NAMES = ("train", "validation", "test")


def _as_values(x) -> np.ndarray:
    if isinstance(x, DepthProfile):
        return x.depths
    return np.asarray(x, dtype=float)


def snr_db(x, xhat) -> float:
    """Optimally scaled SNR in dB between a reference and a reconstruction.

    The scale a applied to the reconstruction is chosen to minimize the
    residual, a* = <x, xhat>/||xhat||^2 (taken as 0 for a zero
    reconstruction).  A numerically zero residual returns the cap value
    ``SNR_CAP_DB``.
    """
    xv = _as_values(x)
    hv = _as_values(xhat)
    if xv.shape != hv.shape:
        raise ValueError("profiles must share a grid")
    energy = float(xv @ xv)
    if energy == 0.0:
        raise ValueError("reference profile has zero norm")
    hh = float(hv @ hv)
    a_star = float(xv @ hv) / hh if hh > 0.0 else 0.0
    residual = xv - a_star * hv
    res_energy = float(residual @ residual)
    if res_energy == 0.0:
        return SNR_CAP_DB
    return min(SNR_CAP_DB, 10.0 * np.log10(energy / res_energy))


def split_dataset(families, seed: int):
    """Deterministic stratified train/validation/test split.

    Parameters
    ----------
    families : sequence of hashable family labels, one per sample
        Only the labels matter; indices into this sequence are returned.
    seed : int
        Seeds the shuffle; the same seed always yields the same split.

    Returns
    -------
    dict with keys "train", "validation", "test", each a sorted integer
    index array.  Split sizes are the proportional 87.5 / 7.5 / 5 percent
    rounding of the total (so 800 samples give 700 / 60 / 40), stratified
    so each family lands in each split as proportionally as integer counts
    allow.
    """
    labels = list(families)
    n = len(labels)
    if n < 20:
        raise ValueError("dataset too small to split (need >= 20 samples)")

    totals = _split_totals(n)
    fams = sorted(set(labels), key=str)
    fam_indices = {f: [i for i, lab in enumerate(labels) if lab == f] for f in fams}
    counts = _stratified_counts([len(fam_indices[f]) for f in fams], totals)

    rng = np.random.default_rng(seed)
    out = {name: [] for name in SPLIT_NAMES}
    for fi, f in enumerate(fams):
        idx = np.array(fam_indices[f])
        rng.shuffle(idx)
        start = 0
        for si, name in enumerate(SPLIT_NAMES):
            take = counts[fi][si]
            out[name].extend(idx[start : start + take].tolist())
            start += take
    return {name: np.array(sorted(vals), dtype=int) for name, vals in out.items()}


def _split_totals(n: int) -> list[int]:
    """Global split sizes: proportional rounding with the test split absorbing the slack."""
    train = round(SPLIT_FRACTIONS[0] * n)
    val = round(SPLIT_FRACTIONS[1] * n)
    return [train, val, n - train - val]


def _stratified_counts(fam_sizes: list[int], totals: list[int]) -> list[list[int]]:
    """Apportion each family across splits with exact row and column sums.

    Largest-remainder rounding of the per-family quotas fixes the row sums
    (each family is fully assigned); column deviations from the requested
    split totals are then repaired by moving single samples between splits
    within the family whose quota is least violated by the move.
    """
    n = sum(fam_sizes)
    quotas = [[fs * t / n for t in totals] for fs in fam_sizes]
    counts = []
    for fi, fs in enumerate(fam_sizes):
        floors = [int(np.floor(q)) for q in quotas[fi]]
        short = fs - sum(floors)
        remainders = sorted(
            range(len(totals)),
            key=lambda si: (quotas[fi][si] - np.floor(quotas[fi][si]), -si),
            reverse=True,
        )
        for si in remainders[:short]:
            floors[si] += 1
        counts.append(floors)

    # repair column sums, preserving row sums
    for _ in range(4 * len(fam_sizes) * len(totals)):
        col = [sum(c[si] for c in counts) for si in range(len(totals))]
        over = [si for si in range(len(totals)) if col[si] > totals[si]]
        under = [si for si in range(len(totals)) if col[si] < totals[si]]
        if not over:
            break
        s_over, s_under = over[0], under[0]
        best = min(
            (fi for fi in range(len(fam_sizes)) if counts[fi][s_over] > 0),
            key=lambda fi: (quotas[fi][s_over] - (counts[fi][s_over] - 1))
            - ((counts[fi][s_under] + 1) - quotas[fi][s_under]),
        )
        counts[best][s_over] -= 1
        counts[best][s_under] += 1
    return counts


@dataclass(frozen=True)
class BenchmarkRecord:
    """One reconstruction outcome."""

    sample_id: int
    family: str
    method: str
    snr_db: float
    wall_time_s: float
    error: str = ""


@dataclass
class BenchmarkReport:
    """Per-sample records plus per-family aggregates for each method."""

    records: list[BenchmarkRecord] = field(default_factory=list)

    def aggregates(self) -> dict:
        """Per (family, method): mean/std/count of SNR over successful runs."""
        table: dict[tuple[str, str], dict] = {}
        keys = sorted({(r.family, r.method) for r in self.records})
        for fam, meth in keys:
            vals = np.array(
                [r.snr_db for r in self.records if r.family == fam and r.method == meth and not r.error]
            )
            table[(fam, meth)] = {
                "mean_snr_db": float(vals.mean()) if vals.size else float("nan"),
                "std_snr_db": float(vals.std(ddof=0)) if vals.size else float("nan"),
                "count": int(vals.size),
            }
        return table

    def render_text(self) -> str:
        """Plain-text table: one row per family, one column pair per method."""
        methods = sorted({r.method for r in self.records})
        fams = sorted({r.family for r in self.records})
        agg = self.aggregates()
        header = ["family"] + [f"{m} mean(std) dB [n]" for m in methods]
        widths = [max(12, len(h)) for h in header]
        lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
        for fam in fams:
            cells = [fam]
            for m in methods:
                a = agg.get((fam, m), {"mean_snr_db": float("nan"), "std_snr_db": float("nan"), "count": 0})
                cells.append(f"{a['mean_snr_db']:.2f} ({a['std_snr_db']:.2f}) [{a['count']}]")
            lines.append("  ".join(c.ljust(w) for c, w in zip(cells, widths)))
        return "\n".join(lines) + "\n"


def benchmark(samples, methods: dict) -> BenchmarkReport:
    """Run reconstruction methods over a test set and collect SNRs.

    Parameters
    ----------
    samples : iterable of (sample_id, family, truth_profile, spectrum)
    methods : mapping from method name to a callable spectrum -> DepthProfile

    Per-sample failures are recorded (with the exception text) rather than
    aborting the run.
    """
    report = BenchmarkReport()
    for sample_id, family, truth, spectrum in samples:
        for name in sorted(methods):
            fn = methods[name]
            t0 = time.perf_counter()
            try:
                recon = fn(spectrum)
                elapsed = time.perf_counter() - t0
                value = snr_db(truth, recon)
                record = BenchmarkRecord(sample_id, family, name, value, elapsed)
            except Exception as exc:  # noqa: BLE001 - flag, don't abort
                elapsed = time.perf_counter() - t0
                record = BenchmarkRecord(sample_id, family, name, float("nan"), elapsed, error=str(exc))
            report.records.append(record)
    return report
