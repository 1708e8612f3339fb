"""Quaternion arithmetic over numpy arrays.

A quaternion ``a + b*e1 + c*e2 + d*e12`` is stored as four float64
components along the last axis of an ndarray, so an array of shape
``(..., 4)`` is an array of quaternions and a single quaternion is a
shape ``(4,)`` vector.  The imaginary units satisfy

    e1*e1 = e2*e2 = e12*e12 = e1*e2*e12 = -1,

which forces ``e1*e2 = e12 = -e2*e1`` (the ordinary Hamilton algebra
with the units relabelled).  Multiplication is associative but not
commutative; the left factor always multiplies from the left.

The array functions (:func:`mul`, :func:`conj`, :func:`modulus`, ...)
are the workhorses used by the transform engine.  The :class:`Quaternion`
class is a thin scalar wrapper for interactive work and for the polar
decomposition, which yields a :class:`PolarForm`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Quaternion",
    "PolarForm",
    "mul",
    "conj",
    "modulus",
    "normalize",
    "exp_pure",
    "polar_parts",
    "ONE",
    "E1",
    "E2",
    "E12",
]


def mul(p, q):
    """Hamilton product of two quaternion arrays, broadcasting like ``*``.

    Parameters
    ----------
    p, q : array_like, shape (..., 4)
        Left and right factors; ``p`` multiplies from the left.

    Returns
    -------
    ndarray, shape broadcast(p, q)
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    pa, pb, pc, pd = p[..., 0], p[..., 1], p[..., 2], p[..., 3]
    qa, qb, qc, qd = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    out = np.empty(np.broadcast(pa, qa).shape + (4,), dtype=float)
    out[..., 0] = pa * qa - pb * qb - pc * qc - pd * qd
    out[..., 1] = pa * qb + pb * qa + pc * qd - pd * qc
    out[..., 2] = pa * qc - pb * qd + pc * qa + pd * qb
    out[..., 3] = pa * qd + pb * qc - pc * qb + pd * qa
    return out


def conj(q):
    """Quaternion conjugate: negates the e1, e2, e12 parts."""
    q = np.asarray(q, dtype=float)
    return q * np.array([1.0, -1.0, -1.0, -1.0])


def modulus(q):
    """Euclidean modulus sqrt(a^2 + b^2 + c^2 + d^2), shape (...)."""
    q = np.asarray(q, dtype=float)
    return np.sqrt(np.sum(q * q, axis=-1))


def normalize(q):
    """Unit quaternion q/|q|.  Raises on zero input."""
    q = np.asarray(q, dtype=float)
    m = modulus(q)
    if np.any(m == 0.0):
        raise ValueError("cannot normalize a zero quaternion")
    return q / m[..., None]


def exp_pure(axis, angle):
    """Exponential of the pure quaternion ``axis * angle``.

    Closed form ``cos(angle) + axis*sin(angle)`` for a unit (or zero)
    imaginary direction ``axis``; no series evaluation.

    Parameters
    ----------
    axis : array_like, shape (..., 3)
        Components along (e1, e2, e12).
    angle : array_like, shape (...)

    Returns
    -------
    ndarray, shape (..., 4)
    """
    axis = np.asarray(axis, dtype=float)
    angle = np.asarray(angle, dtype=float)
    out = np.empty(np.broadcast(axis[..., 0], angle).shape + (4,), dtype=float)
    out[..., 0] = np.cos(angle)
    out[..., 1:] = axis * np.sin(angle)[..., None]
    return out


def polar_parts(q):
    """Vectorized polar decomposition q = modulus * exp(axis * angle).

    Returns
    -------
    modulus : ndarray, shape (...)
    axis : ndarray, shape (..., 3)
        Unit imaginary direction, or zeros where the imaginary part
        vanishes (zero and pure-real inputs).
    angle : ndarray, shape (...)
        In [0, pi]; 0 for zero input, pi for negative pure-real input.
    """
    q = np.asarray(q, dtype=float)
    m = modulus(q)
    imag = q[..., 1:]
    imag_norm = np.sqrt(np.sum(imag * imag, axis=-1))
    with np.errstate(invalid="ignore", divide="ignore"):
        cos_angle = np.where(m > 0.0, q[..., 0] / np.where(m > 0.0, m, 1.0), 1.0)
        axis = np.where(
            imag_norm[..., None] > 0.0,
            imag / np.where(imag_norm[..., None] > 0.0, imag_norm[..., None], 1.0),
            0.0,
        )
    angle = np.arccos(np.clip(cos_angle, -1.0, 1.0))
    angle = np.where(m > 0.0, angle, 0.0)
    return m, axis, angle


@dataclass(frozen=True, eq=False)
class PolarForm:
    """Polar decomposition of one quaternion: modulus * exp(axis * angle).

    ``axis`` holds the (e1, e2, e12) components of the unit imaginary
    direction; it is all zeros for degenerate inputs (zero or pure-real
    quaternions), in which case ``degenerate`` is set.  ``angle`` lies in
    [0, pi].  The product axis*angle is the pure quaternion whose
    components feed the colour channels of the polar visualization.
    """

    modulus: float
    axis: np.ndarray
    angle: float
    degenerate: bool = False

    def rgb_components(self):
        """(e1, e2, e12) components of axis*angle as a length-3 array."""
        return self.axis * self.angle

    def to_quaternion(self) -> "Quaternion":
        """Reconstruct the original quaternion from the polar data."""
        return Quaternion.from_array(self.modulus * exp_pure(self.axis, self.angle))


@dataclass(frozen=True)
class Quaternion:
    """One quaternion a + b*e1 + c*e2 + d*e12 with float64 components.

    Instances are immutable.  Arithmetic follows the Hamilton rules of
    the module docstring; ``*`` accepts another Quaternion or a real.
    """

    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    d: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "c", float(self.c))
        object.__setattr__(self, "d", float(self.d))

    @classmethod
    def from_array(cls, arr) -> "Quaternion":
        arr = np.asarray(arr, dtype=float)
        if arr.shape != (4,):
            raise ValueError(f"expected shape (4,), got {arr.shape}")
        return cls(*arr)

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c, self.d])

    def conj(self) -> "Quaternion":
        return Quaternion(self.a, -self.b, -self.c, -self.d)

    def modulus(self) -> float:
        return float(np.sqrt(self.a**2 + self.b**2 + self.c**2 + self.d**2))

    __abs__ = modulus

    def inverse(self) -> "Quaternion":
        m2 = self.a**2 + self.b**2 + self.c**2 + self.d**2
        if m2 == 0.0:
            raise ZeroDivisionError("zero quaternion has no inverse")
        return Quaternion(self.a / m2, -self.b / m2, -self.c / m2, -self.d / m2)

    def polar(self) -> PolarForm:
        """Polar form; see :func:`polar_parts` for the conventions."""
        m, axis, angle = polar_parts(self.as_array())
        imag_zero = self.b == 0.0 and self.c == 0.0 and self.d == 0.0
        return PolarForm(
            modulus=float(m),
            axis=axis,
            angle=float(angle),
            degenerate=imag_zero,
        )

    def __add__(self, other):
        if isinstance(other, Quaternion):
            return Quaternion(self.a + other.a, self.b + other.b,
                              self.c + other.c, self.d + other.d)
        if isinstance(other, (int, float)):
            return Quaternion(self.a + other, self.b, self.c, self.d)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (Quaternion, int, float)):
            return self + (-other if isinstance(other, Quaternion) else -float(other))
        return NotImplemented

    def __neg__(self):
        return Quaternion(-self.a, -self.b, -self.c, -self.d)

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return Quaternion.from_array(mul(self.as_array(), other.as_array()))
        if isinstance(other, (int, float)):
            return Quaternion(self.a * other, self.b * other,
                              self.c * other, self.d * other)
        return NotImplemented

    def __rmul__(self, other):
        # other is real here (Quaternion * Quaternion goes through __mul__),
        # so the order of the factors does not matter.
        if isinstance(other, (int, float)):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, Quaternion):
            return self * other.inverse()
        if isinstance(other, (int, float)):
            return Quaternion(self.a / other, self.b / other,
                              self.c / other, self.d / other)
        return NotImplemented

    def isclose(self, other: "Quaternion", tol: float = 1e-12) -> bool:
        return bool(np.all(np.abs(self.as_array() - other.as_array()) <= tol))

    def __repr__(self):
        return (f"Quaternion({self.a:g}, {self.b:g}e1, "
                f"{self.c:g}e2, {self.d:g}e12)")


ONE = Quaternion(1.0)
E1 = Quaternion(0.0, 1.0)
E2 = Quaternion(0.0, 0.0, 1.0)
E12 = Quaternion(0.0, 0.0, 0.0, 1.0)
