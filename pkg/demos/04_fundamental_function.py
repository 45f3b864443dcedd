"""
The fundamental function F
==========================

``F(R; v1, v2)`` is the positive root of the quartic. It equals 1 on the
indicatrix, scales linearly and has a positive definite fiber Hessian.
"""

import math

import numpy as np

from zollfinsler.finsler import f_eval, fundamental_function, hessian, homogeneity_defect
from zollfinsler.indicatrix import indicatrix_point

eps, R = 0.25, 0.3

# %% A full evaluation report
ev = f_eval(eps, R, 0.4, 0.7)
print(f"F = {ev.F!r}, backward error {ev.residual:.1e}, Newton fixed point {ev.polished!r}")
print("root census:", ev.census.tag, ev.census.signs, "positive roots:", ev.census.n_positive)

# %% F = 1 on the unit curve
r = np.linspace(abs(R), math.pi - abs(R), 7)
for ri in r:
    v1, v2 = indicatrix_point(eps, R, ri)
    print(f"r={ri:.3f}  v=({v1:+.4f}, {v2:+.4f})  F={fundamental_function(eps, R, v1, v2):.15f}")

# %% Homogeneity and convexity
for lam in (1e-3, 0.5, 2.0, 1e3):
    print(f"lambda={lam:g}: homogeneity defect {homogeneity_defect(eps, R, 0.4, 0.7, lam):.1e}")
g = hessian(eps, R, 0.4, 0.7)
print("fiber Hessian:\n", g, "\neigenvalues:", np.linalg.eigvalsh(g))

# %% The round limit
v = (1.0, 1.0)
print("eps=1e-9:", fundamental_function(1e-9, 0.5, *v), "vs", math.hypot(1.0, math.cos(0.5)))
