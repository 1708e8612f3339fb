"""Quaternion arithmetic and the polar form.

Walks through the algebra the whole toolkit is built on: the three
imaginary units, non-commutativity, the modulus, and the polar
decomposition q = |q| exp(axis * angle) whose axis*angle components
drive the colour-coded surface plots of quaternion-valued fields.
"""

import os

import numpy as np

from qwave.metrics import polar_surface, write_polar_csv
from qwave.quaternion import E1, E2, E12, Quaternion

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

print("== unit relations ==")
print("e1*e1  =", E1 * E1)
print("e1*e2  =", E1 * E2, " (equals e12)")
print("e2*e1  =", E2 * E1, " (order matters: the product flips sign)")
print("e1*e2*e12 =", E1 * E2 * E12)

print("\n== modulus and inverse ==")
q = Quaternion(1.0, 1.0, 1.0, 1.0)
print("q =", q, " |q| =", q.modulus())
print("q * conj(q) / |q|^2 =", q * q.conj() * (1.0 / q.modulus() ** 2))

print("\n== polar form ==")
for sample in (Quaternion(0, 2), Quaternion(5), Quaternion(-3), Quaternion(1, 1, 2, -1)):
    p = sample.polar()
    back = p.to_quaternion()
    print(
        f"{sample}: modulus {p.modulus:.4f}, angle {p.angle:.4f}, "
        f"axis {np.round(p.axis, 4)}, reconstructs to {back}"
    )

print("\n== polar surface export ==")
# a small quaternion-valued field: heights are moduli, colours come from
# the axis*angle components injected into RGB
side = 16
i = np.arange(side)
field = np.zeros((side, side, 4))
field[..., 0] = np.sin(np.pi * i / side)[:, None]
field[..., 1] = np.cos(np.pi * i / side)[None, :]
field[..., 3] = 0.5
surface = polar_surface(field)
path = os.path.join(OUT, "polar_surface.csv")
write_polar_csv(surface, path)
print(f"heights in [{surface.height.min():.3f}, {surface.height.max():.3f}], "
      f"colour components rescaled into [0, 1]")
print("wrote", path, "(columns row,col,height,r,g,b; plot with any 3-D tool)")
