"""Energy accounting, full-reference quality metrics, polar export.

The energy of a quaternion grid (or of a whole pyramid) is the sum of
squared moduli.  An orthonormal bank conserves it across decomposition,
and the cumulative energy profile, the normalized running sum of squared
moduli sorted in decreasing order, makes the transform's energy
compaction visible: on natural and smooth images the decomposition's
profile dominates the raw image's profile.

PSNR uses peak 1.0 and pools all channel planes into a single MSE.
SSIM is the standard single-scale index with an 11x11 Gaussian window
(sigma 1.5, K1 = 0.01, K2 = 0.03, dynamic range 1.0), computed on the
valid interior and averaged over channels.

``polar_surface`` exports the data behind the polar visualization of a
quaternion-valued field: per pixel the modulus as a height and the
(e1, e2, e12) components of axis*angle injected into RGB after one
affine min/max rescale over the whole image.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .engine import WaveletPyramid
from .image import ChannelImage
from .quaternion import modulus, polar_parts

__all__ = [
    "EnergyProfile",
    "PolarSurface",
    "energy",
    "cumulative_profile",
    "psnr",
    "ssim",
    "polar_surface",
    "write_profiles_csv",
    "write_polar_csv",
]


def energy(x) -> float:
    """Sum of squared moduli over a quaternion grid or a whole pyramid."""
    if isinstance(x, WaveletPyramid):
        return float(sum(np.sum(g * g) for _, g in x.blocks()))
    x = np.asarray(x, dtype=float)
    return float(np.sum(x * x))


@dataclass(frozen=True, eq=False)
class EnergyProfile:
    """Nondecreasing cumulative normalized energies, ending at 1."""

    values: np.ndarray
    source: str

    def __len__(self):
        return len(self.values)

    def count_to_reach(self, level: float) -> int:
        """Smallest number of coefficients whose energy share >= level."""
        return int(np.searchsorted(self.values, level) + 1)


def cumulative_profile(x) -> EnergyProfile:
    """Cumulative energy profile of a grid or pyramid.

    Moduli are sorted in decreasing order, squared, cumulatively summed
    and normalized by the total, so the sequence is nondecreasing and
    its last entry is exactly 1.  Zero-energy input has no profile and
    raises.
    """
    if isinstance(x, WaveletPyramid):
        moduli = np.concatenate([modulus(g).ravel() for _, g in x.blocks()])
        source = "pyramid"
    else:
        moduli = modulus(np.asarray(x, dtype=float)).ravel()
        source = "image"
    sq = np.sort(moduli)[::-1] ** 2
    cs = np.cumsum(sq)
    if cs[-1] == 0.0:
        raise ValueError("cumulative profile undefined for zero-energy input")
    return EnergyProfile(values=cs / cs[-1], source=source)


def _as_planes(img) -> np.ndarray:
    if isinstance(img, ChannelImage):
        return img.stack()
    arr = np.asarray(img, dtype=float)
    if arr.ndim == 2:
        return arr[None]
    if arr.ndim == 3:
        # treat the trailing axis (channels or quaternion parts) as planes
        return np.moveaxis(arr, -1, 0)
    raise ValueError(f"cannot interpret shape {arr.shape} as image planes")


def psnr(ref, test) -> float:
    """Peak signal-to-noise ratio in dB, peak 1.0, MSE pooled over all
    pixels and channels.  Returns ``inf`` when the images are identical.
    """
    a = _as_planes(ref)
    b = _as_planes(test)
    if a.shape != b.shape:
        raise ValueError(f"image shapes disagree: {a.shape} vs {b.shape}")
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return float("inf")
    return float(10.0 * np.log10(1.0 / mse))


def _gaussian_window(size: int = 11, sigma: float = 1.5) -> np.ndarray:
    half = (size - 1) / 2.0
    coords = np.arange(size) - half
    g = np.exp(-(coords**2) / (2.0 * sigma**2))
    w = np.outer(g, g)
    return w / w.sum()


def _ssim_plane(x, y, window, c1, c2) -> float:
    mu_x = fftconvolve(x, window, mode="valid")
    mu_y = fftconvolve(y, window, mode="valid")
    xx = fftconvolve(x * x, window, mode="valid") - mu_x * mu_x
    yy = fftconvolve(y * y, window, mode="valid") - mu_y * mu_y
    xy = fftconvolve(x * y, window, mode="valid") - mu_x * mu_y
    num = (2.0 * mu_x * mu_y + c1) * (2.0 * xy + c2)
    den = (mu_x * mu_x + mu_y * mu_y + c1) * (xx + yy + c2)
    return float(np.mean(num / den))


def ssim(ref, test, window_size: int = 11, sigma: float = 1.5,
         k1: float = 0.01, k2: float = 0.03, peak: float = 1.0) -> float:
    """Mean structural similarity, averaged over channels.

    Both images must have matching shapes and channel sets and sides of
    at least ``window_size``.
    """
    a = _as_planes(ref)
    b = _as_planes(test)
    if a.shape != b.shape:
        raise ValueError(f"image shapes disagree: {a.shape} vs {b.shape}")
    if min(a.shape[1:]) < window_size:
        raise ValueError(
            f"image sides {a.shape[1:]} smaller than the {window_size}-pixel window"
        )
    window = _gaussian_window(window_size, sigma)
    c1 = (k1 * peak) ** 2
    c2 = (k2 * peak) ** 2
    return float(np.mean([_ssim_plane(x, y, window, c1, c2) for x, y in zip(a, b)]))


@dataclass(frozen=True, eq=False)
class PolarSurface:
    """Height field and colours of the polar visualization.

    ``height`` is the per-pixel modulus.  ``components`` holds the raw
    (e1, e2, e12) parts of axis*angle; ``colour`` is the same data after
    one affine min/max rescale into [0, 1] shared by all three
    components (a constant field rescales to zeros).
    """

    height: np.ndarray
    components: np.ndarray
    colour: np.ndarray


def polar_surface(img) -> PolarSurface:
    """Polar-form visualization data of a quaternion grid."""
    img = np.asarray(img, dtype=float)
    m, axis, angle = polar_parts(img)
    comps = axis * angle[..., None]
    lo = float(comps.min())
    hi = float(comps.max())
    if hi > lo:
        colour = (comps - lo) / (hi - lo)
    else:
        colour = np.zeros_like(comps)
    return PolarSurface(height=m, components=comps, colour=colour)


def write_profiles_csv(path, profiles: dict[str, EnergyProfile | np.ndarray]) -> None:
    """Write profiles as CSV: a ``rank`` column then one column each."""
    columns = {
        name: (p.values if isinstance(p, EnergyProfile) else np.asarray(p))
        for name, p in profiles.items()
    }
    lengths = {len(v) for v in columns.values()}
    if len(lengths) != 1:
        raise ValueError(f"profiles disagree in length: {sorted(lengths)}")
    n = lengths.pop()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("rank," + ",".join(columns) + "\n")
        for i in range(n):
            fh.write(str(i + 1) + "," +
                     ",".join(f"{col[i]:.12g}" for col in columns.values()) + "\n")


def write_polar_csv(surface: PolarSurface, path) -> None:
    """Write polar-surface data as CSV rows ``row,col,height,r,g,b``."""
    h, w = surface.height.shape
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("row,col,height,r,g,b\n")
        for i in range(h):
            for j in range(w):
                r, g, b = surface.colour[i, j]
                fh.write(
                    f"{i},{j},{surface.height[i, j]:.12g},"
                    f"{r:.12g},{g:.12g},{b:.12g}\n"
                )
