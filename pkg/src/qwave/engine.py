"""Multi-level non-separable quaternionic wavelet transform.

One analysis level convolves a square quaternion grid with the four
filters of a bank (one low-pass, three high-pass) and keeps the even
output phase:

    y_F(m, n) = sum_{k,l} F(k, l) * x((2m+k) mod s, (2n+l) mod s)

with quaternion taps multiplying from the left and periodic (circular)
indexing.  One synthesis level upsamples each coefficient grid by zero
insertion, circularly convolves with the bank's synthesis taps (again
from the left) and sums the four subbands:

    x(m, n) = sum_F sum_{k,l} F~(k, l) * c_F((m-k)/2 mod s/2, (n-l)/2 mod s/2)

restricted to even m-k, n-l.  For a bank whose synthesis taps are the
elementwise conjugates of orthonormal analysis taps, synthesis is the
adjoint of analysis and the round trip is exact to machine precision.

Inputs must be square with a power-of-two side; no padding is performed,
which keeps the perfect-reconstruction and energy contracts exact.  The
downsampling phase is a fixed convention; ``phase=(pr, pc)`` shifts the
sampling grid for compatibility experiments with externally produced
coefficients.

Pyramid serialization (``save_pyramid``/``load_pyramid``) uses a flat
binary layout: a 64-byte header

    bytes  0..7   magic b"QPYR1\\x00\\x00\\x00"
    bytes  8..11  uint32 LE  number of levels L
    bytes 12..15  uint32 LE  original side s
    bytes 16..23  uint64 LE  bank-name hash (first 8 bytes of SHA-256)
    bytes 24..55  bank name, UTF-8, zero padded (truncated at 32 bytes)
    bytes 56..63  zero padding

followed by float64 LE coefficients: the approximation grid first, then
for each level 1 (finest) .. L (coarsest) the three detail grids, each
grid row-major with the four components (a, b, c, d) per coefficient.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass

import numpy as np

__all__ = [
    "WaveletPyramid",
    "analyze_level",
    "synthesize_level",
    "decompose",
    "reconstruct",
    "max_levels",
    "save_pyramid",
    "load_pyramid",
]

_MAGIC = b"QPYR1\x00\x00\x00"


def _is_pow2(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def _left_mul_matrix(p) -> np.ndarray:
    """4x4 real matrix of y = p*x acting on component columns."""
    a, b, c, d = p
    return np.array(
        [
            [a, -b, -c, -d],
            [b, a, -d, c],
            [c, d, a, -b],
            [d, -c, b, a],
        ]
    )


def _analysis_matrix(bank, k: int, l: int) -> np.ndarray:
    """(4, 16) map sending a pixel row-vector to the four filters'
    contributions at tap (k, l), concatenated."""
    return np.hstack([_left_mul_matrix(bank.analysis[f, k, l]).T for f in range(4)])


def _synthesis_matrix(bank, k: int, l: int) -> np.ndarray:
    """(16, 4) map sending the four stacked subband coefficients to
    their summed contribution at tap (k, l)."""
    return np.vstack([_left_mul_matrix(bank.synthesis[f, k, l]).T for f in range(4)])


def _check_grid(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 3 or x.shape[-1] != 4:
        raise ValueError(f"expected an (s, s, 4) quaternion grid, got {x.shape}")
    s0, s1 = x.shape[:2]
    if s0 != s1:
        raise ValueError(f"grid must be square, got {s0}x{s1}")
    if not _is_pow2(s0):
        raise ValueError(f"grid side must be a power of two, got {s0}")
    return x


@dataclass
class WaveletPyramid:
    """Level-indexed subband store produced by :func:`decompose`.

    ``details[i]`` holds the three detail grids (d1, d2, d3) of level
    ``i + 1``; level 1 is the finest (side s/2), level L the coarsest.
    ``approx`` is the level-L approximation grid.  The total coefficient
    count always equals the pixel count of the original image.
    """

    approx: np.ndarray
    details: list[tuple[np.ndarray, np.ndarray, np.ndarray]]
    bank_name: str
    original_size: tuple[int, int]

    @property
    def levels(self) -> int:
        return len(self.details)

    @property
    def coefficient_count(self) -> int:
        n = self.approx.shape[0] * self.approx.shape[1]
        for grids in self.details:
            for g in grids:
                n += g.shape[0] * g.shape[1]
        return n

    def copy(self) -> "WaveletPyramid":
        return WaveletPyramid(
            approx=self.approx.copy(),
            details=[tuple(g.copy() for g in grids) for grids in self.details],
            bank_name=self.bank_name,
            original_size=self.original_size,
        )

    def blocks(self):
        """Yield ((level, subband), grid) in canonical ascending order.

        Detail subbands are numbered 1..3 at their level; the
        approximation is addressed as (L, 0).  The canonical order sorts
        by the (level, subband) pair, which fixes coefficient-ranking
        tie-breaks and export layouts.
        """
        entries = []
        for lvl, grids in enumerate(self.details, start=1):
            for sb, g in enumerate(grids, start=1):
                entries.append(((lvl, sb), g))
        entries.append(((self.levels, 0), self.approx))
        entries.sort(key=lambda item: item[0])
        return entries


def analyze_level(x, bank, phase=(0, 0)):
    """One analysis level: filter with the four analysis taps, keep the
    even phase.

    Parameters
    ----------
    x : ndarray (s, s, 4)
        Square quaternion grid, s a power of two, s >= the tap grid.
    bank : FilterBank
    phase : (int, int)
        Optional sampling-phase offset (rows, cols) for compatibility
        experiments; the default is the standard even phase.

    Returns
    -------
    (approx, d1, d2, d3) : four (s/2, s/2, 4) arrays
    """
    x = _check_grid(x)
    s = x.shape[0]
    tr, tc = bank.taps_shape
    if s < max(tr, tc):
        raise ValueError(f"grid side {s} is smaller than the {tr}x{tc} taps")
    if s % 2:
        raise ValueError(f"grid side {s} is not even")
    half = s // 2
    # one small matrix product per tap position covers all four filters
    out = np.zeros((half * half, 16))
    pr, pc = phase
    for k in range(tr):
        kk = k + pr
        rows = x[kk % 2 :: 2]
        if kk // 2:
            rows = np.roll(rows, -(kk // 2), axis=0)
        for l in range(tc):
            ll = l + pc
            z = rows[:, ll % 2 :: 2]
            if ll // 2:
                z = np.roll(z, -(ll // 2), axis=1)
            out += z.reshape(-1, 4) @ _analysis_matrix(bank, k, l)
    return tuple(
        out[:, 4 * f : 4 * f + 4].reshape(half, half, 4) for f in range(4)
    )


def synthesize_level(approx, d1, d2, d3, bank, phase=(0, 0)):
    """One synthesis level: upsample by zero insertion, filter with the
    synthesis taps, sum the four subbands.

    The four inputs must share one (n, n, 4) shape; the result is
    (2n, 2n, 4).  Inverse of :func:`analyze_level` for valid banks.
    """
    coeffs = [np.asarray(c, dtype=float) for c in (approx, d1, d2, d3)]
    shapes = {c.shape for c in coeffs}
    if len(shapes) != 1:
        raise ValueError(f"subband grids disagree in shape: {sorted(shapes)}")
    if coeffs[0].ndim != 3 or coeffs[0].shape[-1] != 4:
        raise ValueError(f"expected (n, n, 4) grids, got {coeffs[0].shape}")
    n = coeffs[0].shape[0]
    if coeffs[0].shape[1] != n:
        raise ValueError("subband grids must be square")
    s = 2 * n
    tr, tc = bank.taps_shape
    out = np.zeros((s, s, 4))
    stacked = np.concatenate([c.reshape(-1, 4) for c in coeffs], axis=1)
    pr, pc = phase
    for k in range(tr):
        kk = k + pr
        for l in range(tc):
            ll = l + pc
            acc = (stacked @ _synthesis_matrix(bank, k, l)).reshape(n, n, 4)
            if kk // 2 or ll // 2:
                acc = np.roll(acc, (kk // 2, ll // 2), axis=(0, 1))
            out[kk % 2 :: 2, ll % 2 :: 2] += acc
    return out


def max_levels(side: int, bank) -> int:
    """Deepest admissible decomposition of a side x side image."""
    tr, tc = bank.taps_shape
    t = max(tr, tc)
    return int(np.log2(side)) - int(np.ceil(np.log2(t))) + 1


def decompose(img, bank, levels: int) -> WaveletPyramid:
    """Multi-level analysis: re-filter the approximation ``levels`` times.

    ``img`` is a square power-of-two (s, s, 4) quaternion grid.  Raises
    if ``levels`` exceeds the maximum admissible depth for the image
    side and tap size.
    """
    img = _check_grid(img)
    s = img.shape[0]
    if levels < 1:
        raise ValueError("levels must be at least 1")
    admissible = max_levels(s, bank)
    if levels > admissible:
        raise ValueError(
            f"levels={levels} too deep for a {s}x{s} image with "
            f"{bank.taps_shape[0]}x{bank.taps_shape[1]} taps; maximum is {admissible}"
        )
    details = []
    approx = img
    for _ in range(levels):
        approx, d1, d2, d3 = analyze_level(approx, bank)
        details.append((d1, d2, d3))
    return WaveletPyramid(
        approx=approx,
        details=details,
        bank_name=bank.name,
        original_size=(s, s),
    )


def reconstruct(pyr: WaveletPyramid, bank) -> np.ndarray:
    """Multi-level synthesis from the deepest level up.

    Returns a quaternion grid of the pyramid's original size.  Raises if
    the bank does not match the pyramid (name or incompatible shapes).
    """
    if pyr.bank_name != bank.name:
        raise ValueError(
            f"pyramid was built with bank {pyr.bank_name!r}, got {bank.name!r}"
        )
    s = pyr.original_size[0]
    expected = s >> pyr.levels
    if pyr.approx.shape[0] != expected:
        raise ValueError(
            f"approximation grid {pyr.approx.shape[0]} inconsistent with "
            f"{pyr.levels} levels of a {s}x{s} image"
        )
    x = pyr.approx
    for d1, d2, d3 in reversed(pyr.details):
        x = synthesize_level(x, d1, d2, d3, bank)
    if x.shape[:2] != pyr.original_size:
        raise ValueError("reconstructed size disagrees with original_size")
    return x


def _name_hash(name: str) -> int:
    digest = hashlib.sha256(name.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def save_pyramid(pyr: WaveletPyramid, path) -> None:
    """Write a pyramid in the QPYR1 binary layout (module docstring)."""
    name_bytes = pyr.bank_name.encode("utf-8")[:32]
    header = _MAGIC
    header += struct.pack("<II", pyr.levels, pyr.original_size[0])
    header += struct.pack("<Q", _name_hash(pyr.bank_name))
    header += name_bytes.ljust(32, b"\x00")
    header += b"\x00" * (64 - len(header))
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(pyr.approx, dtype="<f8").tobytes())
        for grids in pyr.details:
            for g in grids:
                fh.write(np.ascontiguousarray(g, dtype="<f8").tobytes())


def load_pyramid(path) -> WaveletPyramid:
    """Read a pyramid written by :func:`save_pyramid`."""
    with open(path, "rb") as fh:
        header = fh.read(64)
        if len(header) != 64 or header[:8] != _MAGIC:
            raise ValueError(f"{path}: not a QPYR1 pyramid file")
        levels, side = struct.unpack("<II", header[8:16])
        (name_hash,) = struct.unpack("<Q", header[16:24])
        bank_name = header[24:56].rstrip(b"\x00").decode("utf-8")
        if _name_hash(bank_name) != name_hash:
            raise ValueError(f"{path}: bank-name hash mismatch")
        payload = np.frombuffer(fh.read(), dtype="<f8").astype(float)
    if not _is_pow2(side) or levels < 1 or side >> levels < 1:
        raise ValueError(f"{path}: invalid header (levels={levels}, side={side})")
    expected = side * side * 4
    if payload.size != expected:
        raise ValueError(
            f"{path}: payload holds {payload.size} floats, expected {expected}"
        )
    pos = 0

    def take(n):
        nonlocal pos
        grid = payload[pos : pos + n * n * 4].reshape(n, n, 4)
        pos += n * n * 4
        return grid

    approx = take(side >> levels)
    details = []
    for lvl in range(1, levels + 1):
        n = side >> lvl
        details.append((take(n), take(n), take(n)))
    return WaveletPyramid(
        approx=approx,
        details=details,
        bank_name=bank_name,
        original_size=(side, side),
    )
