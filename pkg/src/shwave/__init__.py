"""Guided SH-wave scattering from plate thinnings and two inverse methods.

The package simulates reflection spectra of the fundamental shear-horizontal
plate mode scattered by one-sided thinning defects (staircase mode-matching
with scattering-matrix cascades), and reconstructs defect depth profiles
from those spectra by

* band-limited Born-approximation inversion (``wnst``), and
* a small convolutional network trained on synthetic data (``netinv``),

benchmarked with a scale-optimal SNR metric (``evaluate``).
"""

from . import dataset, defect, evaluate, forward, netinv, store, waveguide, wnst
from .defect import DefectSpec, DepthProfile
from .forward import ReflectionSpectrum, WavenumberGrid
from .waveguide import PlateSpec

__version__ = "0.1.0"

__all__ = [
    "waveguide",
    "defect",
    "forward",
    "wnst",
    "netinv",
    "evaluate",
    "store",
    "dataset",
    "PlateSpec",
    "DefectSpec",
    "DepthProfile",
    "WavenumberGrid",
    "ReflectionSpectrum",
    "__version__",
]
