"""
A Zoll sphere and its closed geodesics
======================================

The metric ``(1 + h(cos r))^2 dr^2 + sin^2 r dtheta^2`` with
``h(x) = eps x (1 - x^2)`` bends the round sphere while keeping every
geodesic closed with length ``2 pi``.
"""

import math

import numpy as np

from zollfinsler.zoll import (
    HParam,
    ZollSurface,
    closure_defect,
    darboux_check,
    first_return_length,
    gauss_curvature,
    integrate_geodesic,
    unit_state,
)

p = HParam(0.25)

# %% The deformation and the curvature it produces
x = np.linspace(-1, 1, 9)
print("x      G(x)")
for xi, G in zip(x, gauss_curvature(p, x)):
    print(f"{xi:+.2f}  {G:.6f}")

# The admissibility conditions: h odd, h(+-1) = 0, |h| < 1, G > 0
report = darboux_check(p)
print("conditions:", report.passed)
print("minimum curvature on the grid:", report.margins["curvature_positive"])

# %% Geodesics
# Start a few unit-speed geodesics at random and follow them for a bit more
# than one period; each comes back to its starting state.
surface = ZollSurface(p)
rng = np.random.default_rng(0)
for _ in range(5):
    r0 = rng.uniform(0.3, math.pi - 0.3)
    heading = rng.uniform(0.3, math.pi - 0.3)
    init = unit_state(surface, r0, 0.0, heading)
    traj = integrate_geodesic(surface, init, 2 * math.pi + 0.2)
    L = first_return_length(traj.states, traj.s)
    closed = integrate_geodesic(surface, init, 2 * math.pi)
    print(f"r0={r0:.3f} heading={heading:.3f}  first return at {L:.9f}  defect {closure_defect(closed):.2e}")

# The Clairaut integral sin^2 r theta' is conserved along the way
c = surface.clairaut(traj.r, traj.theta_dot)
print("Clairaut drift:", np.ptp(c))

# %% Meridians run straight through the poles
init = unit_state(surface, 1.0, 0.0, 0.0)
traj = integrate_geodesic(surface, init, 2 * math.pi)
print("meridian closure defect:", closure_defect(traj))
