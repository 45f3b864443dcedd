"""
Unit curves of the Finsler metric on the space of geodesics
===========================================================

A point ``(R, theta)`` of the space of geodesics carries a unit curve
(the indicatrix) traced by the geodesic of Clairaut constant ``sin R`` as
its colatitude sweeps ``[|R|, pi - |R|]``.
"""

import math

import numpy as np

from zollfinsler.indicatrix import (
    appendix_integral,
    appendix_integral_quadrature,
    convexity_report,
    implicit_residual,
    indicatrix_curve,
    quartic_coefficients,
)

eps = 0.25

# %% The curve and the implicit equation it satisfies
for R in (-1.2, -0.4, 0.0, 0.7, 1.3):
    r, v1, v2 = indicatrix_curve(eps, R, n=300)
    res = np.max(np.abs(implicit_residual(eps, R, v1, v2)))
    rep = convexity_report(v1, v2)
    print(
        f"R={R:+.1f}: v2 in [{v2.min():+.4f}, {v2.max():+.4f}], |v1| <= {np.abs(v1).max():.4f}, "
        f"implicit residual {res:.1e}, convex={rep.strictly_convex}, winds once={rep.encloses_origin}"
    )

# %% As eps -> 0 the curve is the ellipse v1^2 + v2^2 cos^2 R = 1
R = 0.6
_, v1, v2 = indicatrix_curve(1e-12, R)
print("ellipse defect:", np.max(np.abs(v1**2 + v2**2 * math.cos(R) ** 2 - 1)))

# %% The integral behind v2
# Closed form against quadrature with the square-root endpoint handled as a
# weight function.
for r in (0.4, 0.9, 1.3, 2.0):
    a = appendix_integral(eps, 0.2, r)
    b = appendix_integral_quadrature(eps, 0.2, r)
    print(f"r={r}: closed {a:.15f}  quadrature {b:.15f}  diff {abs(a - b):.1e}")

# %% Homogenising v -> v / F turns the curve into a quartic in F
qc = quartic_coefficients(eps, 0.3, 0.5, 0.8)
print("quartic coefficients (A..E):", qc.astuple())
