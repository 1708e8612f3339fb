"""Colour-image channel model and quaternion embedding.

A colour image is a set of real planes with values in [0, 1]: either
{R, G, B} or {NIR, R, G, B}.  Embedding packs each pixel into one
quaternion

    NIR + R*e1 + G*e2 + B*e12

so an embedded image is an ndarray of shape (height, width, 4) with the
component order (scalar, e1, e2, e12).  RGB-only images embed as pure
quaternions (zero scalar part).

Extraction is the inverse on in-range data; values pushed outside [0, 1]
by coefficient processing are clamped at extraction time only, never
inside the transform, so unaltered round trips stay exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["ChannelImage", "embed", "extract"]

# quaternion component slots of the embedded channels
NIR_SLOT, R_SLOT, G_SLOT, B_SLOT = 0, 1, 2, 3


@dataclass(frozen=True, eq=False)
class ChannelImage:
    """Labelled real-valued planes of one colour image.

    All planes share one (height, width) shape; ``nir`` is optional.
    Values are expected in [0, 1] (1.0 is the PSNR peak).
    """

    r: np.ndarray
    g: np.ndarray
    b: np.ndarray
    nir: np.ndarray | None = None

    def __post_init__(self):
        for name in ("r", "g", "b", "nir"):
            plane = getattr(self, name)
            if plane is None:
                continue
            plane = np.asarray(plane, dtype=float)
            if plane.ndim != 2 or plane.size == 0:
                raise ValueError(f"channel {name!r} must be a non-empty 2-D plane")
            object.__setattr__(self, name, plane)
        shapes = {p.shape for p in self.planes()}
        if len(shapes) != 1:
            raise ValueError(f"channel planes disagree in shape: {sorted(shapes)}")

    @property
    def height(self) -> int:
        return self.r.shape[0]

    @property
    def width(self) -> int:
        return self.r.shape[1]

    @property
    def has_nir(self) -> bool:
        return self.nir is not None

    def channel_names(self):
        return ("NIR", "R", "G", "B") if self.has_nir else ("R", "G", "B")

    def planes(self):
        """Present planes in (NIR,) R, G, B order."""
        out = [] if self.nir is None else [self.nir]
        out.extend([self.r, self.g, self.b])
        return out

    def stack(self) -> np.ndarray:
        """Present planes stacked along a leading channel axis."""
        return np.stack(self.planes(), axis=0)

    def isclose(self, other: "ChannelImage", tol: float = 0.0) -> bool:
        if self.has_nir != other.has_nir:
            return False
        return all(
            np.max(np.abs(a - b)) <= tol
            for a, b in zip(self.planes(), other.planes())
        )


def embed(img: ChannelImage) -> np.ndarray:
    """Embed a channel image into a quaternion grid.

    Returns an (height, width, 4) array with the near-infrared plane in
    the scalar slot (zero when absent) and R, G, B in the e1, e2, e12
    slots.
    """
    q = np.zeros(img.r.shape + (4,), dtype=float)
    if img.nir is not None:
        q[..., NIR_SLOT] = img.nir
    q[..., R_SLOT] = img.r
    q[..., G_SLOT] = img.g
    q[..., B_SLOT] = img.b
    return q


def extract(q: np.ndarray, want_nir: bool = True) -> ChannelImage:
    """Extract channel planes from a quaternion grid, clamping to [0, 1].

    Inverse of :func:`embed` for in-range images.  Out-of-range values
    (possible after coefficient processing) are clipped here and only
    here.
    """
    q = np.asarray(q, dtype=float)
    if q.ndim != 3 or q.shape[-1] != 4:
        raise ValueError(f"expected an (H, W, 4) quaternion grid, got {q.shape}")
    clip = lambda plane: np.clip(plane, 0.0, 1.0)
    return ChannelImage(
        r=clip(q[..., R_SLOT]),
        g=clip(q[..., G_SLOT]),
        b=clip(q[..., B_SLOT]),
        nir=clip(q[..., NIR_SLOT]) if want_nir else None,
    )
