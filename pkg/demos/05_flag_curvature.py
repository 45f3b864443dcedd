"""
Constant flag curvature
=======================

The flag curvature is computed from the geodesic spray of ``F^2`` with
nested finite differences. On the round sphere and the Funk disk it gives
the known constants; on the metric built from the Zoll sphere it gives 1.
"""

import math

import numpy as np

from zollfinsler.finsler import flag_curvature, flag_curvature_2d

# %% Sanity check on metrics with known curvature


def round_sphere(pts):
    x2 = pts[..., 0] ** 2 + pts[..., 1] ** 2
    y2 = pts[..., 2] ** 2 + pts[..., 3] ** 2
    return 4.0 * y2 / (1.0 + x2) ** 2


def funk(pts):
    x, y = pts[..., :2], pts[..., 2:]
    x2, y2, xy = (x * x).sum(-1), (y * y).sum(-1), (x * y).sum(-1)
    return ((np.sqrt(y2 - (x2 * y2 - xy * xy)) + xy) / (1.0 - x2)) ** 2


x = np.array([[0.2, -0.1]])
y = np.array([[0.6, 0.8]])
print("round sphere K:", flag_curvature_2d(round_sphere, x, y)[0])
print("Funk disk K:", flag_curvature_2d(funk, x, y)[0], "(exact -0.25)")

# %% The K = 1 metric
rng = np.random.default_rng(3)
for eps in (0.1, 0.25, 0.4):
    R = rng.uniform(-1.2, 1.2, 20)
    phi = rng.uniform(0, 2 * math.pi, 20)
    K, err = flag_curvature(eps, R, 0.0, np.cos(phi), np.sin(phi), return_error=True)
    print(f"eps={eps}: max |K - 1| = {np.abs(K - 1).max():.1e} (step-doubling estimate {err.max():.1e})")
