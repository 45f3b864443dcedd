"""Indicatrix curves of the K = 1 Finsler metric on the space of geodesics.

A point ``(R, theta)`` of the space of oriented geodesics labels the Zoll
geodesic whose Clairaut constant is ``c = sin R``.  Along that geodesic the
colatitude ``r`` sweeps ``[r_c, pi - r_c]`` (``r_c = |R|``) and traces the
unit curve of the Finsler norm in the fiber coordinates ``(v1, v2)``:

    v1 = +-sqrt(sin^2 r - c^2) / cos R
    v2 = cos r / cos^2 R - eps (sin^2 r - c^2) + eps c^2

Eliminating ``r`` gives the implicit curve
``(1 - v1^2) / cos^2 R = (v2 + eps v1^2 cos^2 R - eps c^2)^2`` and, after
substituting ``v -> v / F``, a quartic in ``F``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

__all__ = [
    "QuadratureError",
    "QuarticCoeffs",
    "TangentSample",
    "appendix_integral",
    "appendix_integral_quadrature",
    "convexity_report",
    "implicit_residual",
    "indicatrix_curve",
    "indicatrix_point",
    "quartic_coefficients",
    "turning_radius",
    "v2_closed_form",
    "v2_integral_form",
]

#: default distance kept from the chart boundary |R| = pi/2
CHART_MARGIN = 1e-3


class QuadratureError(ArithmeticError):
    """Adaptive quadrature failed to reach the requested accuracy."""


@dataclass(frozen=True)
class TangentSample:
    """A tangent vector ``(v1, v2)`` at the point ``(R, theta)``."""

    R: float
    theta: float
    v1: float
    v2: float
    margin: float = CHART_MARGIN

    def __post_init__(self):
        if not abs(self.R) <= math.pi / 2 - self.margin:
            raise ValueError(f"|R| must be at most pi/2 - {self.margin}")

    @property
    def c(self):
        return math.sin(self.R)


@dataclass(frozen=True)
class QuarticCoeffs:
    """``A F^4 + B F^3 + C F^2 + D F + E`` (entries may be arrays)."""

    A: np.ndarray | float
    B: np.ndarray | float
    C: np.ndarray | float
    D: np.ndarray | float
    E: np.ndarray | float

    def astuple(self):
        return (self.A, self.B, self.C, self.D, self.E)

    def __iter__(self):
        return iter(self.astuple())

    def __call__(self, F):
        """Evaluate the quartic at ``F``."""
        return (((self.A * F + self.B) * F + self.C) * F + self.D) * F + self.E


def turning_radius(R):
    """Smallest colatitude reached by the geodesic labelled ``R``."""
    return np.abs(R)


def _excursion(R, r):
    """``sin^2 r - sin^2 R`` in factored form (exact zero at the turning point)."""
    S = np.sin(r - R) * np.sin(r + R)
    if np.any(S < -1e-14):
        raise ValueError("r is not reached by this geodesic (sin^2 r < sin^2 R)")
    return np.maximum(S, 0.0)


def _scalar(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


def v2_closed_form(eps, R, r):
    """``cos r / cos^2 R - eps (sin^2 r - c^2) + eps c^2`` with ``c = sin R``."""
    S = _excursion(R, r)
    c2 = np.sin(R) ** 2
    return _scalar(np.cos(r) / np.cos(R) ** 2 - eps * S + eps * c2)


def indicatrix_point(eps, R, r, branch=1, cross_check=False):
    """Point ``(v1, v2)`` of the unit curve at colatitude ``r``.

    ``branch`` (+1 or -1) picks the sign of ``v1``.  With ``cross_check`` the
    value of ``v2`` is recomputed from the integral representation and a
    ``RuntimeError`` is raised if the two disagree by more than
    ``1e-10 * max(1, |v2|)``.
    """
    if branch not in (1, -1):
        raise ValueError("branch must be +1 or -1")
    S = _excursion(R, r)
    v1 = branch * np.sqrt(S) / np.cos(R)
    v2 = v2_closed_form(eps, R, r)
    if cross_check:
        alt = v2_integral_form(eps, R, r)
        if abs(alt - v2) > 1e-10 * max(1.0, abs(v2)):
            raise RuntimeError(
                f"integral form of v2 disagrees: {alt!r} vs closed form {v2!r}"
            )
    return _scalar(v1), v2


def appendix_integral(eps, R, r):
    """Closed form of ``int_{r_c}^r sin s (1 + 2 eps cos^3 s) / (cos^2 s sqrt(sin^2 s - c^2)) ds``.

    Equal to ``[sqrt(S)/cos r (1 + 2 eps cos^3 r) + 2 eps S^{3/2}] / cos^2 R``
    with ``S = sin^2 r - c^2``.  Past ``r = pi/2`` the integral itself
    diverges and this is its continuation through the pole of the integrand.
    """
    S = _excursion(R, r)
    cr = np.cos(r)
    with np.errstate(divide="ignore", invalid="ignore"):
        boundary = np.where(S == 0, 0.0, np.sqrt(S) / cr * (1.0 + 2.0 * eps * cr**3))
    return _scalar((boundary + 2.0 * eps * S**1.5) / np.cos(R) ** 2)


def _quad(f, a, b, **kw):
    kw.setdefault("epsabs", 0.0)
    kw.setdefault("epsrel", 1e-13)
    kw.setdefault("limit", 200)
    with np.errstate(all="ignore"):
        val, err, *rest = integrate.quad(f, a, b, full_output=1, **kw)
    info = rest[1] if len(rest) > 1 else ""
    if len(rest) > 1 and err > 1e-9 * max(1.0, abs(val)):
        raise QuadratureError(f"quadrature did not converge on [{a}, {b}]: {info}")
    return val


def _inv_sinc(x):
    # x / sin x, smooth through 0
    return 1.0 / np.sinc(x / math.pi)


def appendix_integral_quadrature(eps, R, r):
    """The same integral as :func:`appendix_integral`, by adaptive quadrature.

    The inverse square-root singularity at ``s = r_c`` is taken as the weight
    of a QAWS rule.  Once ``r`` approaches ``pi/2`` (where the integrand has
    a non-integrable pole) the integral is integrated by parts first and only
    the regular remainder ``6 eps int sin s cos s sqrt(sin^2 s - c^2) ds`` is
    computed numerically.

    Raises
    ------
    QuadratureError
        If QUADPACK reports non-convergence.
    """
    R = float(R)
    r = float(r)
    rc = abs(R)
    S = float(_excursion(R, r))
    if S == 0.0:
        return 0.0
    k = math.cos(R) ** 2
    cr = math.cos(r)

    if cr > 0.1 * math.cos(R):
        if rc == 0.0:
            # sqrt(sin^2 s) = sin s cancels the singularity
            return _quad(lambda s: (1.0 + 2.0 * eps * math.cos(s) ** 3) / math.cos(s) ** 2, 0.0, r)

        def smooth(s):
            t = s - rc
            return (
                math.sin(s) * (1.0 + 2.0 * eps * math.cos(s) ** 3) / math.cos(s) ** 2
                * math.sqrt(_inv_sinc(t) / math.sin(s + rc))
            )

        return _quad(smooth, rc, r, weight="alg", wvar=(-0.5, 0.0))

    boundary = math.sqrt(S) / cr * (1.0 + 2.0 * eps * cr**3)
    if eps == 0.0:
        return boundary / k
    if rc == 0.0:
        rem = _quad(lambda s: math.sin(s) * math.cos(s) * abs(math.sin(s)), 0.0, r)
    else:

        def smooth_rem(s):
            t = s - rc
            return math.sin(s) * math.cos(s) * math.sqrt(math.sin(s + rc) / _inv_sinc(t))

        rem = _quad(smooth_rem, rc, r, weight="alg", wvar=(0.5, 0.0))
    return (boundary + 6.0 * eps * rem) / k


def v2_integral_form(eps, R, r):
    """``v2`` from the integral representation along the geodesic.

    ``(1 + h(cos r)) / cos r - sqrt(sin^2 r - c^2) * I(r)`` with ``I`` from
    :func:`appendix_integral_quadrature`; undefined at ``r = pi/2``.
    """
    cr = math.cos(r)
    if abs(cr) < 1e-12:
        raise ValueError("integral representation is singular at r = pi/2")
    S = float(_excursion(R, r))
    h = eps * cr * (1.0 - cr * cr)
    return (1.0 + h) / cr - math.sqrt(S) * appendix_integral_quadrature(eps, R, r)


def implicit_residual(eps, R, v1, v2):
    """``(1 - v1^2)/cos^2 R - (v2 + eps v1^2 cos^2 R - eps c^2)^2``."""
    k = np.cos(R) ** 2
    c2 = np.sin(R) ** 2
    return _scalar((1.0 - v1 * v1) / k - (v2 + eps * v1 * v1 * k - eps * c2) ** 2)


def quartic_coefficients(eps, R, v1, v2) -> QuarticCoeffs:
    """Coefficients of the quartic satisfied by ``F(v1, v2)`` at ``R``.

    With ``c = sin R``::

        A = 1 - eps^2 (1 - c^2) c^4
        B = 2 eps c^2 (1 - c^2) v2
        C = (2 c^6 eps^2 - 4 c^4 eps^2 + 2 c^2 eps^2 - 1) v1^2 - (1 - c^2) v2^2
        D = -2 eps (1 - c^2)^2 v1^2 v2
        E = -eps^2 v1^4 (1 - c^2)^3
    """
    v1 = np.asarray(v1, dtype=float)
    v2 = np.asarray(v2, dtype=float)
    c2 = np.sin(R) ** 2
    k = np.cos(R) ** 2
    e2 = eps * eps
    v1s = v1 * v1
    A = 1.0 - e2 * k * c2 * c2
    B = 2.0 * eps * c2 * k * v2
    C = (2.0 * e2 * c2 * k * k - 1.0) * v1s - k * v2 * v2
    D = -2.0 * eps * k * k * v1s * v2
    E = -e2 * v1s * v1s * k**3
    A = A + np.zeros_like(B)
    return QuarticCoeffs(*(_scalar(x) for x in (A, B, C, D, E)))


def indicatrix_curve(eps, R, n=200, min_excursion=1e-8):
    """Closed polyline of the unit curve at ``R``.

    Each branch samples ``r`` uniformly on ``[r_c + dr, pi - r_c - dr]``,
    where ``dr`` keeps ``sqrt(sin^2 r - c^2)`` above ``min_excursion``; the
    curve is closed through the two ``v1 = 0`` endpoints, evaluated exactly.

    Returns
    -------
    r, v1, v2 : ndarray
        Counter-ordered samples: the ``+`` branch for increasing ``r``, then
        the ``-`` branch back.  The endpoints appear once each.
    """
    rc = float(turning_radius(R))
    half = math.pi / 2 - rc
    # sin^2 r - c^2 ~ sin(2 r_c) dr near the turning point
    slope = max(math.sin(2 * rc), 1e-300)
    dr = min(max(min_excursion**2 / slope, min_excursion), 0.25 * half)
    r_inner = np.linspace(rc + dr, math.pi - rc - dr, n)
    S = _excursion(R, r_inner)
    v1p = np.sqrt(S) / math.cos(R)
    v2i = v2_closed_form(eps, R, r_inner)
    r_ends = np.array([rc, math.pi - rc])
    v2_ends = v2_closed_form(eps, R, r_ends)

    r_all = np.concatenate([[r_ends[0]], r_inner, [r_ends[1]], r_inner[::-1]])
    v1_all = np.concatenate([[0.0], v1p, [0.0], -v1p[::-1]])
    v2_all = np.concatenate([[v2_ends[0]], v2i, [v2_ends[1]], v2i[::-1]])
    return r_all, v1_all, v2_all


@dataclass(frozen=True)
class ConvexityReport:
    total_turning: float
    min_turn: float
    max_turn: float
    winding_number: int

    @property
    def strictly_convex(self):
        same_sign = self.max_turn < 0 or self.min_turn > 0
        return same_sign and abs(abs(self.total_turning) - 2 * math.pi) < 1e-9

    @property
    def encloses_origin(self):
        return abs(self.winding_number) == 1


def convexity_report(v1, v2) -> ConvexityReport:
    """Turning-angle census of a closed polyline (last point joins the first).

    A simple strictly convex curve has exterior angles of one sign summing to
    ``+-2 pi``; ``winding_number`` counts turns of the curve around the origin.
    """
    P = np.stack([np.asarray(v1, float), np.asarray(v2, float)], axis=-1)
    edges = np.roll(P, -1, axis=0) - P
    edges = edges[np.hypot(edges[:, 0], edges[:, 1]) > 0]
    heading = np.arctan2(edges[:, 1], edges[:, 0])
    turn = np.mod(np.roll(heading, -1) - heading + math.pi, 2 * math.pi) - math.pi
    polar = np.arctan2(P[:, 1], P[:, 0])
    sweep = np.mod(np.roll(polar, -1) - polar + math.pi, 2 * math.pi) - math.pi
    return ConvexityReport(
        total_turning=float(turn.sum()),
        min_turn=float(turn.min()),
        max_turn=float(turn.max()),
        winding_number=int(round(sweep.sum() / (2 * math.pi))),
    )
