"""Douglas-Rachford feasibility: reflect, reflect, average.

Runs the two-disk instance bundled in data/two_disks.sets step by step,
then a three-set problem through the product-space reformulation, and
writes the iterate/shadow trajectories as CSV for plotting.
"""

import os

import numpy as np

from qwave.feasibility import Ball, dr_step, load_sets, project, reflect, solve, write_trace_csv

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)
DATA = os.path.join(os.path.dirname(__file__), "..", "data", "two_disks.sets")

k1, k2 = load_sets(DATA)
x0 = np.array([-5.2347, 3.9969])
print(f"two disks: centers {k1.center}/{k2.center}, radii {k1.radius}/{k2.radius}")
print(f"start x0 = {x0}")

print("\none step by hand:")
r1 = reflect(k1, x0)
r2 = reflect(k2, r1)
x1 = 0.5 * (x0 + r2)
print(f"  reflect in K1:      {np.round(r1, 4)}")
print(f"  reflect in K2:      {np.round(r2, 4)}")
print(f"  average with x0:    {np.round(x1, 4)}")
assert np.allclose(x1, dr_step(k1, k2, x0))

trace = solve([k1, k2], x0, tol=1e-9, max_iter=1000)
shadow = trace.shadows[-1]
print(f"\nsolved in {trace.iterations} iterations, residual {trace.residual:.2e}")
print(f"shadow point {np.round(shadow, 6)} lies in both disks:")
for s in (k1, k2):
    print(f"  distance to set: {np.linalg.norm(shadow - project(s, shadow)):.2e}")
path = os.path.join(OUT, "two_disks_trace.csv")
write_trace_csv(trace, path)
print("wrote", path)

print("\nthree balls through the product space (diagonal + product set):")
common = np.array([0.25, -0.5, 0.75])
balls = [Ball(center=common + d, radius=1.25)
         for d in ([1.0, 0, 0], [0, 1.0, 0], [-0.5, 0.5, -0.5])]
trace3 = solve(balls, [8.0, -9.0, 10.0], tol=1e-8, max_iter=5000)
print(f"converged={trace3.converged} in {trace3.iterations} iterations, "
      f"residual {trace3.residual:.2e}")
path3 = os.path.join(OUT, "three_balls_trace.csv")
write_trace_csv(trace3, path3)
print("wrote", path3)
