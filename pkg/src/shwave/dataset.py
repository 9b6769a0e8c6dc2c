"""Synthetic dataset generation driven by a self-contained manifest.

A manifest records everything needed to rebuild a dataset bit for bit:
plate, spatial grid, wavenumber band, defect families and draw ranges,
solver settings, and the master seed.  Each sample gets an independent

child seed spawned from the master, so results do not depend on evaluation
order or worker count.
"""

from __future__ import annotations

import numpy as np

from . import defect as defect_mod
from .defect import FAMILIES, random_spec, sample_profile
from .forward import DEFAULT_N_MODES, DEFAULT_SEGMENTS, WavenumberGrid, solve_reflection
from .store import DatasetFile
from .waveguide import PlateSpec

__all__ = ["default_manifest", "generate_dataset", "split_indices"]


def default_manifest(count: int = 800, seed: int = 20240811, noise_std: float = 0.0) -> dict:
    """Manifest with the documented defaults (single-mode inversion band)."""
    plate = PlateSpec()
    b = plate.half_thickness_b
    gaussian_cap = min(
        defect_mod.WIDTH_RANGE[1],
        0.999 * 2.0 / (np.sqrt(np.log(1.0 / defect_mod.GAUSSIAN_FLOOR) / np.log(2.0)) / 2.0) / plate.depth,
    )
    return {
        "plate": {
            "half_thickness_b": plate.half_thickness_b,
            "shear_velocity_Vs": plate.shear_velocity_Vs,
            "shear_modulus_mu": plate.shear_modulus_mu,
        },
        "grid": {"n_points": 128, "x_start": -4.0, "spacing": 0.0625},
        "band": {"xi_min": 0.1 / b, "xi_max": 1.5 / b, "m_samples": 64},
        "families": list(FAMILIES),
        "count": int(count),
        "seed": int(seed),
        "solver": {"n_modes": DEFAULT_N_MODES, "segments": DEFAULT_SEGMENTS},
        "noise_std": float(noise_std),
        "ranges": {
            "max_depth_per_plate_depth": list(defect_mod.DEPTH_RANGE),
            "width_per_plate_depth": list(defect_mod.WIDTH_RANGE),
            "gaussian_width_cap_per_plate_depth": float(gaussian_cap),
            "center_rule": "support inside the central half of the window",
        },
    }


def _plate_from(manifest: dict) -> PlateSpec:
    p = manifest["plate"]
    return PlateSpec(
        half_thickness_b=p["half_thickness_b"],
        shear_velocity_Vs=p["shear_velocity_Vs"],
        shear_modulus_mu=p["shear_modulus_mu"],
    )


def generate_dataset(manifest: dict, progress=None) -> DatasetFile:
    """Generate profiles and full-wave reflection spectra per the manifest.

    ``progress``, when given, is called as progress(done, total) after each
    sample; generation order never affects results.
    """
    plate = _plate_from(manifest)
    g = manifest["grid"]
    n_points = int(g["n_points"])
    grid_x = g["x_start"] + g["spacing"] * np.arange(n_points)
    window = (float(g["x_start"]), float(g["x_start"] + g["spacing"] * n_points))
    band = manifest["band"]
    wn_grid = WavenumberGrid(np.linspace(band["xi_min"], band["xi_max"], int(band["m_samples"])))
    families = list(manifest["families"])
    count = int(manifest["count"])
    if count < 1:
        raise ValueError("count must be >= 1")
    n_modes = int(manifest["solver"]["n_modes"])
    segments = int(manifest["solver"]["segments"])
    noise_std = float(manifest.get("noise_std", 0.0))

    children = np.random.SeedSequence(int(manifest["seed"])).spawn(count)
    depths = np.empty((count, n_points))
    spectra = np.empty((count, len(wn_grid)), dtype=complex)
    family_codes = np.empty(count, dtype=np.int64)
    spec_params = np.empty((count, 3))

    for i in range(count):
        rng = np.random.default_rng(children[i])
        family = families[i % len(families)]
        spec = random_spec(rng, family, window, plate)
        profile = sample_profile(spec, grid_x, plate)
        spectrum = solve_reflection(plate, profile, wn_grid, n_modes, segments)
        coeff = spectrum.coefficients
        if noise_std > 0.0:
            noise = rng.normal(scale=noise_std, size=(2, coeff.size))
            coeff = coeff + noise[0] + 1j * noise[1]
        depths[i] = profile.depths
        spectra[i] = coeff
        family_codes[i] = families.index(family)
        spec_params[i] = (spec.center_c, spec.width_w, spec.max_depth)
        if progress is not None:
            progress(i + 1, count)

    return DatasetFile(
        manifest=manifest,
        depths=depths,
        spectra=spectra,
        family_codes=family_codes,
        spec_params=spec_params,
    )


def split_indices(dataset: DatasetFile, seed: int | None = None) -> dict:
    """Stratified train/validation/test indices for a stored dataset."""
    from .evaluate import split_dataset

    if seed is None:
        seed = int(dataset.manifest["seed"])
    return split_dataset(dataset.family_names(), seed)
