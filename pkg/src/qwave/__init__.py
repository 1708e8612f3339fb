"""Holistic colour-image processing with quaternion-valued wavelets.

Colour images embed into quaternion grids (NIR + R*e1 + G*e2 + B*e12),
which a non-separable quaternionic filter bank decomposes and perfectly
reconstructs.  Compression, enhancement, edge detection and denoising
act on the coefficients in between; a Douglas-Rachford solver covers the
projection machinery the wavelet construction rests on.

Submodules
----------
quaternion   scalar and array quaternion arithmetic, polar form
image        channel model, embedding and extraction
filters      filter banks, the QWFB file format, round-trip certificates
engine       multi-level analysis/synthesis and pyramid serialization
pipelines    compression, enhancement, edges, denoising
metrics      energy profiles, PSNR, SSIM, polar visualization export
feasibility  projection/reflection operators and the DR solver
pngio        PNG/PGM codecs used by the CLI
cli          the ``qwave`` command-line entry point
"""

from . import cli, engine, feasibility, filters, image, metrics, pipelines, pngio, quaternion
from .engine import WaveletPyramid, decompose, reconstruct
from .filters import FilterBank, builtin, load_bank, save_bank, validate_pr
from .image import ChannelImage, embed, extract
from .metrics import cumulative_profile, energy, polar_surface, psnr, ssim
from .pipelines import (
    compress,
    denoise,
    edges,
    enhance,
    hard_threshold,
    soft_threshold,
    visu_threshold,
)
from .quaternion import PolarForm, Quaternion

__version__ = "0.1.0"

__all__ = [
    "quaternion", "image", "filters", "engine", "pipelines", "metrics",
    "feasibility", "pngio", "cli",
    "Quaternion", "PolarForm", "ChannelImage", "FilterBank", "WaveletPyramid",
    "embed", "extract", "builtin", "load_bank", "save_bank", "validate_pr",
    "decompose", "reconstruct",
    "compress", "enhance", "edges", "denoise", "soft_threshold",
    "hard_threshold", "visu_threshold",
    "energy", "cumulative_profile", "psnr", "ssim", "polar_surface",
    "__version__",
]
