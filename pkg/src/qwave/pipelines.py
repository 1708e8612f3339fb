"""Coefficient-domain processing between decomposition and reconstruction.

Four pipelines operate on a :class:`~qwave.engine.WaveletPyramid`:

* ``compress``: keep the largest-modulus fraction of ALL coefficients
  (approximation and details pooled), zero the rest.
* ``enhance``: scale every detail coefficient by a real gain > 1,
  leaving the approximation untouched.
* ``edges``: discard the approximation entirely, keep the details.
* ``denoise``: soft or hard threshold every detail coefficient with a
  modulus threshold, e.g. the universal threshold sigma*sqrt(2 ln n).

The thresholding operators act on the quaternion modulus and preserve
the quaternion direction, so they are invariant under left
multiplication by unit quaternions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .engine import WaveletPyramid
from .quaternion import Quaternion, modulus

__all__ = [
    "ThresholdReport",
    "LocationComparison",
    "soft_threshold",
    "hard_threshold",
    "compress",
    "enhance",
    "edges",
    "visu_threshold",
    "denoise",
    "location_overhead",
    "write_report",
]


def soft_threshold(x, t: float):
    """Shrink the modulus by t, preserving the quaternion direction.

    Returns (x/|x|) * max(|x| - t, 0) elementwise, and 0 where |x| = 0.
    Accepts a Quaternion or any (..., 4) array.
    """
    if t < 0:
        raise ValueError("threshold must be nonnegative")
    if isinstance(x, Quaternion):
        return Quaternion.from_array(soft_threshold(x.as_array(), t))
    x = np.asarray(x, dtype=float)
    m = modulus(x)
    safe = np.where(m > 0.0, m, 1.0)
    scale = np.where(m > 0.0, np.maximum(m - t, 0.0) / safe, 0.0)
    return x * scale[..., None]


def hard_threshold(x, t: float):
    """Keep x where |x| > t, zero otherwise."""
    if t < 0:
        raise ValueError("threshold must be nonnegative")
    if isinstance(x, Quaternion):
        return Quaternion.from_array(hard_threshold(x.as_array(), t))
    x = np.asarray(x, dtype=float)
    keep = modulus(x) > t
    return x * keep[..., None]


def visu_threshold(sigma: float, n: int) -> float:
    """Universal threshold sigma * sqrt(2 ln n) for n >= 2 samples."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if n < 2:
        raise ValueError("n must be at least 2")
    return float(sigma * np.sqrt(2.0 * np.log(n)))


@dataclass(eq=False)
class ThresholdReport:
    """Bookkeeping of one percentile-threshold compression.

    ``kept_locations`` is a (kept_count, 4) int array of
    (level, subband, row, col) rows, deduplicated and lexicographically
    sorted; subband 0 addresses the approximation block at the deepest
    level, 1..3 the detail subbands of their level.
    """

    kept_count: int
    total_count: int
    threshold_value: float
    kept_locations: np.ndarray

    def location_set(self) -> set[tuple[int, int, int, int]]:
        return {tuple(int(v) for v in row) for row in self.kept_locations}


def _flatten_blocks(pyr: WaveletPyramid):
    """Moduli and (level, subband, row, col) coordinates of every
    coefficient, concatenated in the pyramid's canonical block order."""
    moduli = []
    coords = []
    for (lvl, sb), grid in pyr.blocks():
        m = modulus(grid).ravel()
        rows, cols = grid.shape[:2]
        rr, cc = np.divmod(np.arange(m.size), cols)
        block_coords = np.empty((m.size, 4), dtype=np.int64)
        block_coords[:, 0] = lvl
        block_coords[:, 1] = sb
        block_coords[:, 2] = rr
        block_coords[:, 3] = cc
        moduli.append(m)
        coords.append(block_coords)
    return np.concatenate(moduli), np.concatenate(coords)


def compress(pyr: WaveletPyramid, keep_fraction: float):
    """Zero all but the top ``keep_fraction`` of coefficients by modulus.

    All coefficients (approximation and details) are ranked together,
    ties broken by ascending (level, subband, row, col); exactly
    K = floor(keep_fraction * total) survive.

    Returns
    -------
    (WaveletPyramid, ThresholdReport)
    """
    if not 0.0 < keep_fraction <= 1.0:
        raise ValueError(f"keep_fraction must lie in (0, 1], got {keep_fraction}")
    flat, coords = _flatten_blocks(pyr)
    total = flat.size
    kept_n = int(np.floor(keep_fraction * total))
    # concatenation order is canonical, so a stable sort breaks ties
    # by ascending coordinate
    order = np.argsort(-flat, kind="stable")
    kept_idx = order[:kept_n]
    mask = np.zeros(total, dtype=bool)
    mask[kept_idx] = True

    out = pyr.copy()
    pos = 0
    for (_lvl, _sb), grid in out.blocks():
        n = grid.shape[0] * grid.shape[1]
        grid *= mask[pos : pos + n].reshape(grid.shape[:2])[..., None]
        pos += n

    kept_coords = coords[kept_idx]
    kept_coords = kept_coords[np.lexsort(kept_coords.T[::-1])]
    threshold = float(flat[order[kept_n - 1]]) if kept_n >= 1 else float("inf")
    report = ThresholdReport(
        kept_count=kept_n,
        total_count=total,
        threshold_value=threshold,
        kept_locations=kept_coords,
    )
    return out, report


def enhance(pyr: WaveletPyramid, gain: float) -> WaveletPyramid:
    """Scale every detail coefficient by ``gain``; approximation untouched.

    Gains above 1 sharpen edges; gain 1 is the identity (useful for
    testing).  Nonpositive gains are rejected.
    """
    if gain <= 0:
        raise ValueError(f"gain must be positive, got {gain}")
    out = pyr.copy()
    out.details = [tuple(g * gain for g in grids) for grids in out.details]
    return out


def edges(pyr: WaveletPyramid) -> WaveletPyramid:
    """Zero the approximation, keep the details.  Idempotent."""
    out = pyr.copy()
    out.approx = np.zeros_like(out.approx)
    return out


def denoise(pyr: WaveletPyramid, t: float, mode: str = "soft") -> WaveletPyramid:
    """Threshold every detail coefficient, leaving the approximation
    untouched (shrinking the coarse approximation would destroy the
    image luminance).

    ``mode`` selects :func:`soft_threshold` or :func:`hard_threshold`.
    """
    if mode not in ("soft", "hard"):
        raise ValueError(f"mode must be 'soft' or 'hard', got {mode!r}")
    op = soft_threshold if mode == "soft" else hard_threshold
    out = pyr.copy()
    out.details = [tuple(op(g, t) for g in grids) for grids in out.details]
    return out


@dataclass(frozen=True)
class LocationComparison:
    """Quaternionic vs channel-by-channel nonzero-location bookkeeping.

    ``union_count`` is the size of the union of the four channels' kept
    location sets; ``ratio`` = union_count / quaternionic_count, in
    [1, 4] when all runs kept the same count.
    """

    quaternionic_count: int
    channel_counts: tuple[int, ...]
    union_count: int
    ratio: float


def location_overhead(q_report: ThresholdReport, channel_reports) -> LocationComparison:
    """Compare one quaternionic compression against four per-channel runs.

    All five reports must describe the same pyramid geometry (equal
    ``total_count``).  The channel runs are expected to come from
    compressing the four channel planes independently with a real bank.
    """
    channel_reports = list(channel_reports)
    if len(channel_reports) != 4:
        raise ValueError(f"expected 4 channel reports, got {len(channel_reports)}")
    totals = {r.total_count for r in channel_reports} | {q_report.total_count}
    if len(totals) != 1:
        raise ValueError(f"reports disagree on total coefficient count: {sorted(totals)}")
    if q_report.kept_count == 0:
        raise ValueError("quaternionic report kept no coefficients")
    stacked = np.vstack([r.kept_locations for r in channel_reports])
    union = np.unique(stacked, axis=0).shape[0]
    return LocationComparison(
        quaternionic_count=q_report.kept_count,
        channel_counts=tuple(r.kept_count for r in channel_reports),
        union_count=int(union),
        ratio=union / q_report.kept_count,
    )


def write_report(report: ThresholdReport, path) -> None:
    """Export a threshold report as text: one header line, then one
    ``level subband row col`` line per kept coefficient."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(
            f"kept {report.kept_count} total {report.total_count} "
            f"threshold {report.threshold_value!r}\n"
        )
        for lvl, sb, row, col in report.kept_locations:
            fh.write(f"{lvl} {sb} {row} {col}\n")
