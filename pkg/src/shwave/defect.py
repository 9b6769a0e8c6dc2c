"""Parametric thinning defects and sampled depth profiles.

Three single-sided defect families are supported: rectangular, Gaussian
curved, and V shaped.  A defect is described by its center, width, and
maximum depth; profiles are the depth d(x) >= 0 removed from one plate face,
sampled on a uniform grid that is much wider than the defect itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .waveguide import PlateSpec

__all__ = [
    "FAMILIES",
    "DefectSpec",
    "DepthProfile",
    "uniform_grid",
    "sample_profile",
    "random_spec",
]

FAMILIES = ("rectangular", "gaussian", "vee")

# Gaussian profiles are truncated to exact zero below this fraction of the
# peak so the flaw-free region is identically zero.
GAUSSIAN_FLOOR = 1e-6

# Depth and width draw ranges for random_spec, in units of plate depth.
DEPTH_RANGE = (0.05, 0.8)
WIDTH_RANGE = (0.5, 4.0)


@dataclass(frozen=True)
class DefectSpec:
    """Parametric description of one thinning defect."""

    family: str
    center_c: float
    width_w: float
    max_depth: float

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown defect family {self.family!r}")
        if self.width_w <= 0:
            raise ValueError("width_w must be positive")
        if self.max_depth <= 0:
            raise ValueError("max_depth must be positive")

    def support_halfwidth(self) -> float:
        """Half width of the interval where the profile is nonzero."""
        if self.family == "gaussian":
            sigma = self.width_w / (2.0 * np.sqrt(2.0 * np.log(2.0)))
            return sigma * np.sqrt(2.0 * np.log(1.0 / GAUSSIAN_FLOOR))
        return self.width_w / 2.0


@dataclass(frozen=True)
class DepthProfile:
    """Defect depth d(x) sampled on a uniform spatial grid."""

    grid_x: np.ndarray
    depths: np.ndarray

    def __post_init__(self):
        gx = np.asarray(self.grid_x, dtype=float)
        d = np.asarray(self.depths, dtype=float)
        if gx.ndim != 1 or d.shape != gx.shape:
            raise ValueError("grid_x and depths must be 1-D arrays of equal length")
        if gx.size >= 2:
            dx = np.diff(gx)
            if not np.allclose(dx, dx[0], rtol=1e-9, atol=0.0):
                raise ValueError("grid_x must be uniformly spaced")
        if np.any(d < 0):
            raise ValueError("depths must be nonnegative")
        object.__setattr__(self, "grid_x", gx)
        object.__setattr__(self, "depths", d)

    @property
    def spacing(self) -> float:
        return float(self.grid_x[1] - self.grid_x[0])

    def max_depth(self) -> float:
        return float(self.depths.max(initial=0.0))

    @classmethod
    def reconstruction(cls, grid_x: np.ndarray, values: np.ndarray) -> "DepthProfile":
        """Container for reconstructed profiles, which may be locally negative.

        Band-limited linear inversion oscillates about zero in the flaw-free
        region, so reconstructed "depths" are signed.  Grid checks still
        apply; only the nonnegativity requirement is waived.
        """
        gx = np.asarray(grid_x, dtype=float)
        v = np.asarray(values, dtype=float)
        prof = object.__new__(cls)
        object.__setattr__(prof, "grid_x", gx)
        object.__setattr__(prof, "depths", np.zeros_like(gx))
        cls.__post_init__(prof)  # validates the grid
        object.__setattr__(prof, "depths", v)
        if v.shape != gx.shape:
            raise ValueError("grid_x and depths must be 1-D arrays of equal length")
        return prof


def uniform_grid(n_points: int = 128, x_start: float = -4.0, spacing: float = 0.0625) -> np.ndarray:
    """Default reconstruction grid: P points covering 8 plate depths."""
    return x_start + spacing * np.arange(n_points)


def sample_profile(spec: DefectSpec, grid: np.ndarray, plate: PlateSpec | None = None) -> DepthProfile:
    """Sample a defect's depth function on a uniform grid.

    Shapes:
      rectangular:  d = max_depth on |x - c| <= w/2, else 0
      gaussian:     d = max_depth * exp(-(x-c)^2 / (2 sigma^2)),
                    sigma = w / (2 sqrt(2 ln 2))  (w is FWHM),
                    truncated to 0 below GAUSSIAN_FLOOR * max_depth
      vee:          d = max_depth * max(0, 1 - 2|x - c| / w)

    Raises
    ------
    ValueError
        If the grid does not cover the defect support, or the defect is
        deeper than the plate.
    """
    x = np.asarray(grid, dtype=float)
    if plate is not None and spec.max_depth >= plate.depth:
        raise ValueError("defect depth must be smaller than the plate depth")
    lo = spec.center_c - spec.support_halfwidth()
    hi = spec.center_c + spec.support_halfwidth()
    if lo < x[0] or hi > x[-1]:
        raise ValueError(
            f"grid [{x[0]:g}, {x[-1]:g}] does not cover defect support [{lo:g}, {hi:g}]"
        )
    u = x - spec.center_c
    if spec.family == "rectangular":
        d = np.where(np.abs(u) <= spec.width_w / 2.0, spec.max_depth, 0.0)
    elif spec.family == "gaussian":
        sigma = spec.width_w / (2.0 * np.sqrt(2.0 * np.log(2.0)))
        d = spec.max_depth * np.exp(-(u**2) / (2.0 * sigma**2))
        d = np.where(d < GAUSSIAN_FLOOR * spec.max_depth, 0.0, d)
    else:  # vee
        d = spec.max_depth * np.maximum(0.0, 1.0 - 2.0 * np.abs(u) / spec.width_w)
    return DepthProfile(grid_x=x, depths=d)


def random_spec(
    rng: np.random.Generator,
    family: str,
    window: tuple[float, float],
    plate: PlateSpec | None = None,
) -> DefectSpec:
    """Draw a random defect of the given family.

    Depth is uniform in [0.05, 0.8] plate depths and width uniform in
    [0.5, 4] plate depths, with the Gaussian family's width capped so its
    truncated support still fits the placement region.  The center is drawn
    so the support stays inside the central half of the window.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown defect family {family!r}")
    x_lo, x_hi = float(window[0]), float(window[1])
    if not x_hi > x_lo:
        raise ValueError("window must be a nonempty interval")
    depth_unit = plate.depth if plate is not None else 1.0

    # placement region: central half of the window
    mid = 0.5 * (x_lo + x_hi)
    quarter = 0.25 * (x_hi - x_lo)
    region_lo, region_hi = mid - quarter, mid + quarter

    max_depth = rng.uniform(*DEPTH_RANGE) * depth_unit
    w_lo, w_hi = WIDTH_RANGE
    if family == "gaussian":
        # support radius is ~2.2322 * FWHM; cap the width so the truncated
        # support can fit the placement region
        blowup = np.sqrt(np.log(1.0 / GAUSSIAN_FLOOR) / np.log(2.0)) / 2.0
        w_hi = min(w_hi, 0.999 * (region_hi - region_lo) / (2.0 * blowup) / depth_unit)
    width = rng.uniform(w_lo, w_hi) * depth_unit

    spec = DefectSpec(family=family, center_c=0.0, width_w=width, max_depth=max_depth)
    half = spec.support_halfwidth()
    c_lo, c_hi = region_lo + half, region_hi - half
    if c_hi < c_lo:
        raise ValueError("window too small for the drawn defect width")
    center = rng.uniform(c_lo, c_hi)
    return DefectSpec(family=family, center_c=center, width_w=width, max_depth=max_depth)
