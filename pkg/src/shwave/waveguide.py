"""Modal machinery for SH waves in a traction-free elastic plate.

A plate of depth 2b supports shear-horizontal guided modes with transverse
wavenumbers beta_n = n*pi/(2b) and axial wavenumbers

    xi_n = sqrt(omega^2 / Vs^2 - beta_n^2),

real for propagating modes and positive imaginary for evanescent ones.  The
transverse shapes are cos(beta_n x2) for even n and sin(beta_n x2) for odd n,
with x2 measured from the midplane.  Everything here is nondimensionalized by
default: plate depth 2b = 1, shear velocity Vs = 1, shear modulus mu = 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "PlateSpec",
    "Mode",
    "axial_wavenumber",
    "mode_shape",
    "propagating_mode_count",
    "mode_norm",
    "mode_table",
]


@dataclass(frozen=True)
class PlateSpec:
    """Plate geometry and material.

    Attributes
    ----------
    half_thickness_b : float
        Half thickness b; plate depth is 2b.  Default 0.5 so the depth is 1.
    shear_velocity_Vs : float
        Bulk shear wave velocity.
    shear_modulus_mu : float
        Shear modulus (scales tractions; cancels in amplitude ratios).
    """

    half_thickness_b: float = 0.5
    shear_velocity_Vs: float = 1.0
    shear_modulus_mu: float = 1.0

    def __post_init__(self):
        if self.half_thickness_b <= 0:
            raise ValueError("half_thickness_b must be positive")
        if self.shear_velocity_Vs <= 0:
            raise ValueError("shear_velocity_Vs must be positive")
        if self.shear_modulus_mu <= 0:
            raise ValueError("shear_modulus_mu must be positive")

    @property
    def depth(self) -> float:
        """Full plate depth 2b."""
        return 2.0 * self.half_thickness_b


@dataclass(frozen=True)
class Mode:
    """One guided SH mode at a fixed frequency."""

    order_n: int
    beta_n: float
    xi_n: complex
    kind: str  # "propagating" | "evanescent" | "cutoff"


def transverse_wavenumber(plate: PlateSpec, n) -> np.ndarray | float:
    """beta_n = n*pi / (2b)."""
    return np.asarray(n) * np.pi / plate.depth


def axial_wavenumber(plate: PlateSpec, n, omega: float):
    """Axial wavenumber xi_n = sqrt(omega^2/Vs^2 - beta_n^2).

    The branch is fixed so that Re(xi) >= 0 for propagating modes and
    xi = +i*sqrt(beta_n^2 - omega^2/Vs^2) below cutoff, which makes
    e^{+i xi x} decay toward +infinity.

    Parameters
    ----------
    n : int or array of int
        Mode order(s), n >= 0.
    omega : float
        Angular frequency, omega >= 0.

    Returns
    -------
    complex or complex ndarray matching the shape of ``n``.
    """
    n_arr = np.asarray(n)
    if np.any(n_arr < 0):
        raise ValueError("mode order must be nonnegative")
    if omega < 0:
        raise ValueError("omega must be nonnegative")
    beta = transverse_wavenumber(plate, n_arr)
    disc = (omega / plate.shear_velocity_Vs) ** 2 - beta**2
    xi = np.where(
        disc >= 0.0,
        np.sqrt(np.maximum(disc, 0.0)) + 0.0j,
        1.0j * np.sqrt(np.maximum(-disc, 0.0)),
    )
    if np.isscalar(n) or n_arr.ndim == 0:
        return complex(xi)
    return xi


def mode_shape(n: int, argument):
    """Transverse mode shape f_n: cos for even n, sin for odd n."""
    if n < 0:
        raise ValueError("mode order must be nonnegative")
    if n % 2 == 0:
        return np.cos(argument)
    return np.sin(argument)


def propagating_mode_count(plate: PlateSpec, omega: float) -> int:
    """Number of modes with strictly real nonzero axial wavenumber.

    Modes sitting exactly at cutoff (xi = 0) are excluded.
    """
    if omega < 0:
        raise ValueError("omega must be nonnegative")
    if omega == 0:
        return 0
    # xi_n real and nonzero iff n < 2b*omega/(pi*Vs); count integers strictly
    # below the bound, treating exact integers as cutoffs.
    bound = plate.depth * omega / (np.pi * plate.shear_velocity_Vs)
    count = int(np.ceil(bound)) if not float(bound).is_integer() else int(bound)
    return count


def mode_norm(plate: PlateSpec, n) -> np.ndarray | float:
    """Norm integral of f_n over the plate cross-section.

    integral_{-b}^{b} f_n(beta_n x2)^2 dx2 = 2b for n = 0 and b for n >= 1.
    """
    n_arr = np.asarray(n)
    if np.any(n_arr < 0):
        raise ValueError("mode order must be nonnegative")
    norm = np.where(n_arr == 0, plate.depth, plate.half_thickness_b)
    if np.isscalar(n) or n_arr.ndim == 0:
        return float(norm)
    return norm.astype(float)


def mode_table(plate: PlateSpec, omega: float, n_modes: int) -> list[Mode]:
    """First ``n_modes`` modes at frequency omega, classified by kind."""
    modes = []
    for n in range(n_modes):
        beta = float(transverse_wavenumber(plate, n))
        xi = axial_wavenumber(plate, n, omega)
        if xi == 0:
            kind = "cutoff"
        elif xi.imag == 0:
            kind = "propagating"
        else:
            kind = "evanescent"
        modes.append(Mode(order_n=n, beta_n=beta, xi_n=xi, kind=kind))
    return modes
