"""Zoll metrics of revolution ``g = (1 + h(cos r))^2 dr^2 + sin^2 r dtheta^2``.

Covers the deformation ``h``, the Gauss curvature of ``g``, the Darboux
admissibility conditions, and a fixed-step RK4 geodesic integrator used to
confirm that geodesics close up with a common length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

__all__ = [
    "DarbouxReport",
    "GeodesicState",
    "HParam",
    "PoleApproachError",
    "Trajectory",
    "ZollSurface",
    "closure_defect",
    "darboux_check",
    "first_return_length",
    "gauss_curvature",
    "gauss_curvature_general",
    "h_eval",
    "integrate_geodesic",
    "integrate_geodesics",
    "state_distance",
    "unit_state",
]

TWO_PI = 2.0 * math.pi
#: closest a non-meridian geodesic may come to a pole (chart units)
POLE_MARGIN = 1e-3


class PoleApproachError(ValueError):
    """A non-meridian geodesic passes too close to a coordinate pole."""


@dataclass(frozen=True)
class HParam:
    """Deformation ``h(x) = epsilon * x * (1 - x^2)^n``.

    For ``n = 1`` the admissible range is ``0 < epsilon < 1/2``.  For
    ``n >= 2`` ``epsilon`` is a free coefficient (1 in the canonical family)
    and admissibility is left to :func:`darboux_check`.
    """

    epsilon: float
    n: int = 1

    def __post_init__(self):
        if not math.isfinite(self.epsilon):
            raise ValueError("epsilon must be finite")
        if self.n < 1:
            raise ValueError("exponent n must be >= 1")
        if self.n == 1 and not 0.0 < self.epsilon < 0.5:
            raise ValueError(f"epsilon must lie in (0, 1/2), got {self.epsilon}")


def _check_unit_interval(x):
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0) or not np.all(np.isfinite(x)):
        raise ValueError("x must lie in [-1, 1]")
    return x


def _h_raw(p, x):
    w = 1.0 - x * x
    if p.n == 1:
        return p.epsilon * x * w, p.epsilon * (1.0 - 3.0 * x * x)
    wn1 = w ** (p.n - 1)
    return p.epsilon * x * w * wn1, p.epsilon * wn1 * (w - 2.0 * p.n * x * x)


def h_eval(p: HParam, x):
    """Return ``(h(x), h'(x))``; ``x`` must lie in ``[-1, 1]``."""
    x = _check_unit_interval(x)
    h, dh = _h_raw(p, x)
    if h.ndim == 0:
        return float(h), float(dh)
    return h, dh


def gauss_curvature_general(p: HParam, x):
    """``(1 + h - x h') / (1 + h)^3`` at ``x = cos r``, for any ``h``."""
    x = _check_unit_interval(x)
    h, dh = _h_raw(p, x)
    out = (1.0 + h - x * dh) / (1.0 + h) ** 3
    return out if out.ndim else float(out)


def gauss_curvature(p: HParam, x):
    """Gauss curvature of the Zoll metric at ``x = cos r``.

    For ``n = 1`` this is the simplified rational form
    ``-(2 eps x^3 + 1) / (eps x^3 - eps x - 1)^3``; other exponents fall
    back to :func:`gauss_curvature_general`.
    """
    if p.n != 1:
        return gauss_curvature_general(p, x)
    x = _check_unit_interval(x)
    e = p.epsilon
    x3 = x**3
    out = -(2.0 * e * x3 + 1.0) / (e * x3 - e * x - 1.0) ** 3
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class DarbouxReport:
    """Per-condition outcome of :func:`darboux_check`.

    ``margins`` holds the worst case of each condition on the grid: the
    largest oddness defect, the largest ``|h(+-1)|``, ``1 - max|h|`` and the
    minimum Gauss curvature.
    """

    passed: dict
    margins: dict

    @property
    def ok(self):
        return all(self.passed.values())


def darboux_check(p: HParam, grid_size: int = 1001) -> DarbouxReport:
    """Check oddness, ``h(+-1) = 0``, ``|h| < 1`` and ``G > 0`` on a grid."""
    if grid_size < 3:
        raise ValueError("grid_size must be >= 3")
    x = np.linspace(-1.0, 1.0, grid_size)
    h, _ = _h_raw(p, x)
    h_neg, _ = _h_raw(p, -x)
    ends, _ = _h_raw(p, np.array([-1.0, 1.0]))
    G = gauss_curvature(p, x)
    margins = {
        "odd": float(np.max(np.abs(h + h_neg))),
        "endpoints": float(np.max(np.abs(ends))),
        "bounded": float(1.0 - np.max(np.abs(h))),
        "curvature_positive": float(np.min(G)),
    }
    passed = {
        "odd": margins["odd"] == 0.0,
        "endpoints": margins["endpoints"] == 0.0,
        "bounded": margins["bounded"] > 0.0,
        "curvature_positive": margins["curvature_positive"] > 0.0,
    }
    return DarbouxReport(passed=passed, margins=margins)


@dataclass(frozen=True)
class ZollSurface:
    """The sphere with metric ``(1 + h(cos r))^2 dr^2 + sin^2 r dtheta^2``."""

    h: HParam

    def profile(self, r):
        """``f(r) = 1 + h(cos r)`` and ``df/dr``."""
        c = np.cos(r)
        h, dh = _h_raw(self.h, c)
        return 1.0 + h, -np.sin(r) * dh

    def speed2(self, r, r_dot, theta_dot):
        f, _ = self.profile(r)
        return (f * r_dot) ** 2 + (np.sin(r) * theta_dot) ** 2

    def clairaut(self, r, theta_dot):
        return np.sin(r) ** 2 * theta_dot

    def geodesic_rhs(self, y, meridian):
        """Arclength derivative of ``(r, theta, r', theta')``.

        ``meridian`` rows keep ``theta' = 0`` and let ``r`` run through the
        poles as a signed colatitude.
        """
        r, _, rd, td = y.T
        f, df = self.profile(r)
        s, c = np.sin(r), np.cos(r)
        rdd = (-f * df * rd * rd + s * c * td * td) / (f * f)
        with np.errstate(divide="ignore", invalid="ignore"):
            tdd = np.where(meridian, 0.0, -2.0 * c / s * rd * td)
        return np.stack([rd, td, rdd, tdd], axis=-1)


@dataclass(frozen=True)
class GeodesicState:
    r: float
    theta: float
    r_dot: float
    theta_dot: float
    arclength: float = 0.0

    def as_array(self):
        return np.array([self.r, self.theta, self.r_dot, self.theta_dot])


def unit_state(surface: ZollSurface, r, theta, heading) -> GeodesicState:
    """Unit-speed state leaving ``(r, theta)`` at angle ``heading``.

    ``heading`` is measured from the ``+r`` direction in the orthonormal frame
    ``(dr / f, dtheta / sin r)``; ``heading = pi/2`` runs along a parallel.
    """
    f, _ = surface.profile(r)
    return GeodesicState(
        r=float(r),
        theta=float(theta),
        r_dot=float(math.cos(heading) / f),
        theta_dot=float(math.sin(heading) / math.sin(r)),
    )


@dataclass
class Trajectory:
    """Samples of a geodesic at arclength multiples of the step."""

    s: np.ndarray
    r: np.ndarray
    theta: np.ndarray
    r_dot: np.ndarray
    theta_dot: np.ndarray
    meridian: bool = field(default=False)

    def __len__(self):
        return len(self.s)

    def __getitem__(self, i):
        return GeodesicState(
            r=float(self.r[i]),
            theta=float(self.theta[i]),
            r_dot=float(self.r_dot[i]),
            theta_dot=float(self.theta_dot[i]),
            arclength=float(self.s[i]),
        )

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    @property
    def states(self):
        return np.stack([self.r, self.theta, self.r_dot, self.theta_dot], axis=-1)


def _to_chart(y):
    """Fold signed colatitudes back into ``r in [0, pi]``."""
    r = np.mod(y[..., 0], TWO_PI)
    flip = r > math.pi
    out = y.copy()
    out[..., 0] = np.where(flip, TWO_PI - r, r)
    out[..., 1] = np.where(flip, y[..., 1] + math.pi, y[..., 1])
    out[..., 2] = np.where(flip, -y[..., 2], y[..., 2])
    return out


def _validate_run(length, step):
    if not (math.isfinite(length) and length >= 0):
        raise ValueError("length must be finite and non-negative")
    if not 0.0 < step <= 1e-2:
        raise ValueError("step must lie in (0, 1e-2]")
    n = int(math.floor(length / step + 1e-9))
    last = length - n * step
    if last <= 1e-12 * max(1.0, length):
        last = 0.0
    return n, last


def _rk4_step(rhs, y, h, meridian):
    k1 = rhs(y, meridian)
    k2 = rhs(y + 0.5 * h * k1, meridian)
    k3 = rhs(y + 0.5 * h * k2, meridian)
    k4 = rhs(y + h * k3, meridian)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate_geodesics(surface: ZollSurface, inits, length: float, step: float = 1e-3):
    """Integrate a batch of geodesics with classical RK4.

    Samples are taken at multiples of ``step``; when ``length`` is not a
    multiple, one shorter final step lands exactly on ``length``.

    Returns an array of shape ``(n_samples, batch, 4)`` in chart coordinates,
    together with the meridian mask.
    """
    n, last = _validate_run(length, step)
    y = np.array([st.as_array() for st in inits], dtype=float).reshape(-1, 4)
    if np.any((y[:, 0] <= 0) | (y[:, 0] >= math.pi)):
        raise ValueError("initial r must lie strictly inside (0, pi)")
    meridian = y[:, 3] == 0.0
    sin_min = np.abs(surface.clairaut(y[:, 0], y[:, 3]))
    # at a turning point sin r = |sin^2 r theta'|
    close = ~meridian & (sin_min < math.sin(POLE_MARGIN))
    if np.any(close):
        raise PoleApproachError(
            f"geodesic comes within {POLE_MARGIN} of a pole; "
            "start it as an exact meridian (theta_dot = 0) instead"
        )
    out = np.empty((n + 1 + (last > 0),) + y.shape)
    out[0] = y
    rhs = surface.geodesic_rhs
    for i in range(n):
        y = _rk4_step(rhs, y, step, meridian)
        out[i + 1] = y
    if last > 0:
        out[-1] = _rk4_step(rhs, y, last, meridian)
    return _to_chart(out), meridian


def integrate_geodesic(
    surface: ZollSurface, init: GeodesicState, length: float, step: float = 1e-3
) -> Trajectory:
    """Integrate one geodesic by arclength with fixed-step RK4.

    Meridians (``theta_dot == 0``) are continued through the poles; every
    other geodesic must stay at least ``POLE_MARGIN`` away from them.
    """
    ys, meridian = integrate_geodesics(surface, [init], length, step)
    ys = ys[:, 0, :]
    s = step * np.arange(len(ys))
    s[-1] = min(s[-1], length)
    s = init.arclength + s
    return Trajectory(
        s=s,
        r=ys[:, 0],
        theta=ys[:, 1],
        r_dot=ys[:, 2],
        theta_dot=ys[:, 3],
        meridian=bool(meridian[0]),
    )


def _circle_diff(a, b):
    d = np.mod(a - b + math.pi, TWO_PI) - math.pi
    return d


def state_distance(y, y0):
    """Chart distance between states, comparing ``theta`` on the circle."""
    y = np.asarray(y, dtype=float)
    y0 = np.asarray(y0, dtype=float)
    d = y - y0
    d[..., 1] = _circle_diff(y[..., 1], y0[..., 1])
    return np.sqrt(np.sum(d * d, axis=-1))


def closure_defect(traj: Trajectory) -> float:
    """Distance between the first and last state of ``traj``."""
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    st = traj.states
    return float(state_distance(st[-1], st[0]))


def first_return_length(states, s, near=0.1, zero_tol=1e-6):
    """Arclength at which a sampled trajectory first returns to its start.

    ``states[i]`` is the chart state at arclength ``s[i]`` (uniform
    spacing).  After the trajectory has left the ``near`` neighbourhood of
    ``states[0]``, the first discrete local minimum of the distance inside
    it is refined on a componentwise quadratic interpolant of the states;
    it counts as a return when the refined distance is below ``zero_tol``.
    Returns ``nan`` when no return is found.
    """
    states = np.asarray(states, dtype=float)
    s = np.asarray(s, dtype=float)
    y0 = states[0]
    d = state_distance(states, y0)
    away = np.nonzero(d > near)[0]
    if len(away) == 0:
        return math.nan
    h = s[1] - s[0]
    for i in range(away[0], len(d) - 1):
        if not (d[i] < near and d[i] <= d[i - 1] and d[i] <= d[i + 1]):
            continue
        ym, yc, yp = states[i - 1], states[i], states[i + 1]
        # unwrap theta against the centre sample before interpolating
        ym = ym.copy()
        yp = yp.copy()
        ym[1] = yc[1] + _circle_diff(ym[1], yc[1])
        yp[1] = yc[1] + _circle_diff(yp[1], yc[1])
        c1 = 0.5 * (yp - ym)
        c2 = 0.5 * (yp - 2.0 * yc + ym)

        def dist(t):
            return float(state_distance(yc + c1 * t + c2 * t * t, y0))

        res = optimize.minimize_scalar(
            dist, bounds=(-1.0, 1.0), method="bounded", options={"xatol": 1e-10}
        )
        if res.fun <= zero_tol:
            return float(s[i] + res.x * h)
    return math.nan
