"""Convex feasibility via Douglas-Rachford projections.

Given closed convex sets K1, ..., Kr in R^n with a common point, the
solver looks for some x* in their intersection.  For two sets it
iterates the reflect-reflect-average operator

    T(x) = (x + R_{K2}(R_{K1}(x))) / 2,      R_C = 2 P_C - Id,

whose shadow sequence P_{K1}(x_k) converges to a feasible point.  For
more than two sets it uses the product-space reformulation: one copy of
R^n per set, the diagonal D = {(x, ..., x)} playing the role of K1
(projection: replicate the blockwise mean) and the product set
C = K1 x ... x Kr playing K2 (projection: componentwise), so the shadow
is the mean block.

Iteration stops when the shadow's largest distance to any of the sets
drops to the tolerance; hitting the iteration cap yields a trace with
``converged=False`` rather than an exception.

Supported set kinds are balls, boxes and affine hyperplanes, which all
have closed-form nearest-point projections.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Ball",
    "Box",
    "Hyperplane",
    "DRTrace",
    "project",
    "reflect",
    "dr_step",
    "solve",
    "load_sets",
    "write_trace_csv",
]


def _vec(x, dim=None) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError(f"expected a flat vector, got shape {x.shape}")
    if dim is not None and x.size != dim:
        raise ValueError(f"dimension mismatch: vector has {x.size}, set lives in {dim}")
    return x


@dataclass(frozen=True, eq=False)
class Ball:
    """Closed Euclidean ball {x : |x - center| <= radius}."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _vec(self.center))
        if self.radius <= 0:
            raise ValueError("ball radius must be positive")

    @property
    def dim(self) -> int:
        return self.center.size

    def project(self, x) -> np.ndarray:
        x = _vec(x, self.dim)
        offset = x - self.center
        dist = float(np.linalg.norm(offset))
        if dist <= self.radius:
            return x.copy()
        return self.center + offset * (self.radius / dist)


@dataclass(frozen=True, eq=False)
class Box:
    """Axis-aligned box {x : lo <= x <= hi} (componentwise)."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lo", _vec(self.lo))
        object.__setattr__(self, "hi", _vec(self.hi, self.lo.size))
        if np.any(self.lo > self.hi):
            raise ValueError("box bounds must satisfy lo <= hi componentwise")

    @property
    def dim(self) -> int:
        return self.lo.size

    def project(self, x) -> np.ndarray:
        return np.clip(_vec(x, self.dim), self.lo, self.hi)


@dataclass(frozen=True, eq=False)
class Hyperplane:
    """Affine hyperplane {x : <normal, x> = offset}."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        object.__setattr__(self, "normal", _vec(self.normal))
        if not np.any(self.normal):
            raise ValueError("hyperplane normal must be nonzero")

    @property
    def dim(self) -> int:
        return self.normal.size

    def project(self, x) -> np.ndarray:
        x = _vec(x, self.dim)
        n = self.normal
        return x - ((x @ n - self.offset) / (n @ n)) * n


def project(convex_set, x) -> np.ndarray:
    """Nearest point of ``convex_set`` to ``x`` (unique: sets are closed
    convex)."""
    return convex_set.project(x)


def reflect(convex_set, x) -> np.ndarray:
    """Reflection 2 P(x) - x of ``x`` with respect to ``convex_set``."""
    x = _vec(x, convex_set.dim)
    return 2.0 * convex_set.project(x) - x


def dr_step(k1, k2, x) -> np.ndarray:
    """One reflect-reflect-average step (x + R_{k2}(R_{k1}(x))) / 2."""
    x = _vec(x, k1.dim)
    return 0.5 * (x + reflect(k2, reflect(k1, x)))


@dataclass
class DRTrace:
    """Record of one solver run.

    ``iterates`` holds the raw iterates: n-vectors for two sets, (r, n)
    product-space points for the product reformulation.  ``shadows``
    always holds n-vectors (P_{K1} of the iterate, or the mean block).
    ``residual`` is the final shadow's largest distance to any set.
    """

    iterates: list = field(default_factory=list)
    shadows: list = field(default_factory=list)
    converged: bool = False
    residual: float = float("inf")

    @property
    def iterations(self) -> int:
        return len(self.iterates) - 1


def _residual(sets, point) -> float:
    return max(float(np.linalg.norm(point - s.project(point))) for s in sets)


def solve(sets, x0, tol: float = 1e-6, max_iter: int = 1000) -> DRTrace:
    """Douglas-Rachford feasibility run from ``x0``.

    Two sets iterate :func:`dr_step` directly; more sets go through the
    product-space reformulation.  Stops as soon as the shadow is within
    ``tol`` of every set (so a feasible ``x0`` converges in 0
    iterations), or after ``max_iter`` steps with ``converged=False``.
    """
    sets = list(sets)
    if len(sets) < 2:
        raise ValueError("need at least two sets")
    if tol <= 0:
        raise ValueError("tol must be positive")
    dims = {s.dim for s in sets}
    if len(dims) != 1:
        raise ValueError(f"sets disagree on ambient dimension: {sorted(dims)}")
    x0 = _vec(x0, dims.pop())

    if len(sets) == 2:
        k1, k2 = sets
        x = x0
        shadow = k1.project(x)

        def step(z):
            return dr_step(k1, k2, z)

        def shadow_of(z):
            return k1.project(z)

    else:
        # product space: diagonal plays K1, the product set plays K2
        x = np.tile(x0, (len(sets), 1))
        shadow = x.mean(axis=0)

        def step(z):
            mean = z.mean(axis=0)
            rd = 2.0 * mean - z
            rc = np.stack([s.project(row) for s, row in zip(sets, rd)])
            return 0.5 * (z + (2.0 * rc - rd))

        def shadow_of(z):
            return z.mean(axis=0)

    trace = DRTrace(iterates=[x], shadows=[shadow])
    for _ in range(max_iter):
        if _residual(sets, trace.shadows[-1]) <= tol:
            trace.converged = True
            break
        x = step(x)
        trace.iterates.append(x)
        trace.shadows.append(shadow_of(x))
    else:
        trace.converged = _residual(sets, trace.shadows[-1]) <= tol
    trace.residual = _residual(sets, trace.shadows[-1])
    return trace


def load_sets(path):
    """Parse a set-specification file.

    One set per line; ``#`` starts a comment.  Formats::

        ball <center...> <radius>
        box <lo...> <hi...>
        hyperplane <normal...> <offset>

    Returns the list of sets in file order.
    """
    sets = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            kind, *rest = text.split()
            try:
                values = [float(tok) for tok in rest]
            except ValueError:
                raise ValueError(f"{path} line {lineno}: non-numeric value") from None
            if kind == "ball":
                if len(values) < 2:
                    raise ValueError(f"{path} line {lineno}: ball needs center and radius")
                sets.append(Ball(center=values[:-1], radius=values[-1]))
            elif kind == "box":
                if len(values) < 2 or len(values) % 2:
                    raise ValueError(f"{path} line {lineno}: box needs lo... hi...")
                half = len(values) // 2
                sets.append(Box(lo=values[:half], hi=values[half:]))
            elif kind == "hyperplane":
                if len(values) < 2:
                    raise ValueError(f"{path} line {lineno}: hyperplane needs normal and offset")
                sets.append(Hyperplane(normal=values[:-1], offset=values[-1]))
            else:
                raise ValueError(f"{path} line {lineno}: unknown set kind {kind!r}")
    if not sets:
        raise ValueError(f"{path}: no sets found")
    return sets


def write_trace_csv(trace: DRTrace, path) -> None:
    """Export iterate and shadow coordinates, one row per iteration."""
    n = np.asarray(trace.shadows[0]).size
    it_cols = np.asarray(trace.iterates[0]).size
    with open(path, "w", encoding="utf-8") as fh:
        header = ["iteration"]
        header += [f"x{i}" for i in range(it_cols)]
        header += [f"shadow{i}" for i in range(n)]
        fh.write(",".join(header) + "\n")
        for k, (it, sh) in enumerate(zip(trace.iterates, trace.shadows)):
            row = [str(k)]
            row += [f"{v:.12g}" for v in np.asarray(it).ravel()]
            row += [f"{v:.12g}" for v in np.asarray(sh).ravel()]
            fh.write(",".join(row) + "\n")
