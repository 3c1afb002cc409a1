"""
Polar decomposition and the nearest rotation
============================================

The rotation factor R of F = R U is the closest rotation to F in the
Frobenius norm, and the squared distance is ||U - 1||^2.
"""

import numpy as np

from geostrain.linalg import polar_decompose, random_glp, rot2
from geostrain.strain import dist_euclid_sq_to_SO

F = rot2(0.7) @ np.diag([2.0, 3.0])
f = polar_decompose(F)
print("R =\n", f.R)
print("U =\n", f.U)
print("Newton iterations:", f.iterations)

# compare with a brute-force search over planar rotations
th = np.linspace(-np.pi, np.pi, 20_001)
values = np.sum((F - rot2(th)) ** 2, axis=(-1, -2))
print("grid minimum      ", values.min(), "at angle", th[values.argmin()])
print("||U - 1||^2       ", dist_euclid_sq_to_SO(F))

# an ill-conditioned example still factors cleanly
G = random_glp(3, seed=4, cond_max=1e6)
g = polar_decompose(G)
print("cond", g.cond, "residual", np.linalg.norm(g.R @ g.U - G) / np.linalg.norm(G))
