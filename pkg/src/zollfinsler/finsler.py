"""The fundamental function of the K = 1 Finsler metric and its checks.

``F(R; v1, v2)`` is the positive root of the quartic from
:func:`zollfinsler.indicatrix.quartic_coefficients`, written in radicals:

    F = ( s * sqrt(-z1) + [sqrt(-z2) + sqrt(-z3)] ) / 2 - B / (4A)

where ``z1 = P + Q + 2 alpha/3`` and ``z2, z3`` are the other resolvent roots
and ``s = -sign(beta)`` fixes the branch so that the three square roots
multiply to ``-beta``.  When ``z2, z3`` are complex conjugate the bracket is
``combine_conjugate_sqrts(Re(-z2), Im(-z2))``.

The metric does not depend on ``theta``, so every routine that accepts it
ignores it in the formula; it is kept in the signatures that differentiate
in the base.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import fd
from .indicatrix import CHART_MARGIN, QuarticCoeffs, quartic_coefficients
from .polyroots import (
    DepressedQuartic,
    ResolventSolution,
    RootPolishError,
    backward_error,
    combine_conjugate_sqrts,
    depress_quartic,
    polish_root,
    solve_resolvent,
)

__all__ = [
    "ConvexityViolation",
    "FinslerEval",
    "FormulaBranchError",
    "RootCensus",
    "depress",
    "f_eval",
    "flag_curvature",
    "flag_curvature_2d",
    "fundamental_function",
    "hessian",
    "homogeneity_defect",
    "radical_roots",
    "root_classify",
    "spray_coefficients",
]

#: backward-error tolerance on the quartic, relative to the largest monomial
RESIDUAL_TOL = 1e-8
#: agreement demanded between the radical value and the Newton fixed point
POLISH_AGREEMENT = 1e-7
#: |v1| below this fraction of |v| uses the exact quadratic factor
V1_DEGENERATE = 1e-10


class FormulaBranchError(ArithmeticError):
    """The radical formula produced a value that is not a root."""

    def __init__(self, message, diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class ConvexityViolation(ArithmeticError):
    """The fiber Hessian of ``F^2 / 2`` is not positive definite."""


def _check_point(eps, R, v1, v2, margin=CHART_MARGIN):
    if not 0.0 <= eps < 0.5:
        raise ValueError(f"epsilon must lie in [0, 1/2), got {eps}")
    if np.any(np.abs(R) > math.pi / 2 - margin):
        raise ValueError(f"|R| must be at most pi/2 - {margin}")
    if np.any((np.asarray(v1) == 0) & (np.asarray(v2) == 0)):
        raise ValueError("F is evaluated on non-zero vectors only")


def depress(qc: QuarticCoeffs) -> DepressedQuartic:
    """Depressed form ``X^4 + alpha X^2 + beta X + gamma`` with ``F = X - B/(4A)``."""
    if np.any(np.asarray(qc.A) <= 0):
        raise ValueError("leading coefficient A must be positive")
    return depress_quartic(*qc.astuple())


def _quadratic_root(qc):
    # positive root of A F^2 + B F + C with C < 0, without cancellation
    A, B, C = (np.asarray(x, dtype=float) for x in (qc.A, qc.B, qc.C))
    disc = np.sqrt(np.maximum(B * B - 4.0 * A * C, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(B > 0, -2.0 * C / (B + disc), (disc - B) / (2.0 * A))


def _newton(qc, x, iters):
    A, B, C, D, E = qc.astuple()
    for _ in range(iters):
        f = (((A * x + B) * x + C) * x + D) * x + E
        fp = ((4.0 * A * x + 3.0 * B) * x + 2.0 * C) * x + D
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(fp != 0, f / fp, 0.0)
        x = x - step
    return x


@dataclass(frozen=True)
class _Radicals:
    largest: np.ndarray
    smallest: np.ndarray
    second: np.ndarray
    first: np.ndarray
    depressed: DepressedQuartic
    resolvent: ResolventSolution


def _radicals(qc):
    dq = depress(qc)
    sol = solve_resolvent(dq.alpha, dq.beta, dq.gamma)
    # z1 <= 0 whenever the quartic has a real root
    sign = np.where(np.asarray(dq.beta) > 0, -1.0, 1.0)
    first = sign * np.sqrt(np.maximum(-sol.z1.real, 0.0))
    mz2 = -sol.z2
    conj_pair = np.asarray(sol.calB) > 0
    second = np.where(
        conj_pair,
        combine_conjugate_sqrts(mz2.real, mz2.imag),
        np.sqrt(np.maximum(mz2.real, 0.0)) + np.sqrt(np.maximum(-sol.z3.real, 0.0)),
    )
    largest = 0.5 * (first + second) - dq.shift
    smallest = 0.5 * (first - second) - dq.shift
    return _Radicals(largest, smallest, second, first, dq, sol)


def radical_roots(qc: QuarticCoeffs):
    """The largest and smallest real roots of the quartic in radicals.

    These are ``X_1`` and ``X_2`` of the resolvent assembly (minus the
    shift); in the geometric regime the first is ``F`` and the second is the
    unique negative root paired with it.
    """
    rad = _radicals(qc)
    return rad.largest, rad.smallest


def fundamental_function(eps, R, v1, v2, polish=False):
    """Vectorised ``F(R; v1, v2)`` from the radical formula.

    With ``polish`` two Newton steps are applied to the radical value; used by
    the finite-difference machinery, where round-off in ``F`` is amplified.
    """
    v1 = np.asarray(v1, dtype=float)
    v2 = np.asarray(v2, dtype=float)
    qc = quartic_coefficients(eps, R, v1, v2)
    F = _radicals(qc).largest
    norm = np.hypot(v1, v2)
    degenerate = np.abs(v1) < V1_DEGENERATE * norm
    if np.any(degenerate):
        F = np.where(degenerate, _quadratic_root(qc), F)
    if polish:
        F = _newton(qc, F, 2)
    return F if F.ndim else float(F)


@dataclass(frozen=True)
class RootCensus:
    """Real-root structure of the quartic.

    ``tag`` is ``"two-real"`` (a complex conjugate pair) or ``"four-real"``;
    ``signs`` lists the signs of the real roots in decreasing order.
    """

    tag: str
    roots: tuple
    signs: str
    n_positive: int
    product: float


def root_classify(qc: QuarticCoeffs, zero_tol=1e-14) -> RootCensus:
    """Classify the roots of one quartic.

    The extreme real roots come from the radical formula and are polished;
    dividing them out leaves a quadratic whose discriminant decides between
    a complex pair and two more real roots.
    """
    A, B, C, D, E = (float(x) for x in qc.astuple())
    if A <= 0:
        raise ValueError("leading coefficient A must be positive")
    if E == 0.0 and D == 0.0:
        # F^2 (A F^2 + B F + C)
        disc = B * B - 4 * A * C
        q = -0.5 * (B + math.copysign(math.sqrt(max(disc, 0.0)), B))
        pair = sorted([q / A, C / q if q != 0 else 0.0], reverse=True)
        roots = (pair[0], 0.0, 0.0, pair[1])
        return RootCensus("four-real", roots, _signs(roots, zero_tol), _npos(roots, zero_tol), 0.0)

    hi, lo = (float(x) for x in radical_roots(qc))
    hi = _safe_polish(qc, hi)
    lo = _safe_polish(qc, lo)
    s, p = hi + lo, hi * lo
    # (A F^2 + q1 F + q0)(F^2 - s F + p) = quartic; match constant and linear terms
    q0 = E / p
    q1 = (D + q0 * s) / p
    disc = q1 * q1 - 4.0 * A * q0
    if disc < 0:
        roots = (hi, lo)
        tag = "two-real"
    else:
        sq = math.sqrt(disc)
        q = -0.5 * (q1 + math.copysign(sq, q1))
        mid = (q / A, q0 / q) if q != 0 else (0.0, 0.0)
        roots = tuple(sorted((hi, lo) + mid, reverse=True))
        tag = "four-real"
    return RootCensus(tag, roots, _signs(roots, zero_tol), _npos(roots, zero_tol), float(np.prod(roots)))


def _safe_polish(qc, x):
    try:
        return polish_root(*qc.astuple(), x)
    except RootPolishError:
        return x


def _signs(roots, tol):
    scale = max(max(abs(r) for r in roots), 1.0)
    return "".join("+" if r > tol * scale else "-" if r < -tol * scale else "0" for r in roots)


def _npos(roots, tol):
    scale = max(max(abs(r) for r in roots), 1.0)
    return sum(r > tol * scale for r in roots)


@dataclass(frozen=True)
class FinslerEval:
    """Evaluation report for one tangent vector."""

    epsilon: float
    R: float
    v1: float
    v2: float
    F: float
    residual: float
    polished: float
    census: RootCensus
    depressed: DepressedQuartic
    resolvent: ResolventSolution
    coefficients: QuarticCoeffs
    degenerate: bool = False
    notes: list = field(default_factory=list)

    @property
    def root_multiset_signature(self):
        return self.census.tag

    @property
    def trusted(self):
        """Radical value is a root and agrees with its Newton fixed point."""
        return self.residual <= RESIDUAL_TOL and abs(self.F - self.polished) <= POLISH_AGREEMENT * max(1.0, abs(self.F))


def f_eval(eps, R, v1, v2, theta=0.0) -> FinslerEval:
    """Evaluate ``F`` with full diagnostics.

    Raises
    ------
    FormulaBranchError
        If neither the radical value nor its Newton polish satisfies the
        quartic to ``RESIDUAL_TOL``.
    """
    _check_point(eps, R, v1, v2)
    eps, R, v1, v2 = float(eps), float(R), float(v1), float(v2)
    qc = quartic_coefficients(eps, R, v1, v2)
    rad = _radicals(qc)
    degenerate = abs(v1) < V1_DEGENERATE * math.hypot(v1, v2)
    F = float(_quadratic_root(qc)) if degenerate else float(rad.largest)
    coeffs = qc.astuple()
    residual = float(backward_error(coeffs, F))
    diagnostics = {
        "coefficients": coeffs,
        "resolvent_roots": tuple(complex(z) for z in rad.resolvent.roots),
        "F": F,
        "residual": residual,
    }
    try:
        polished = polish_root(*coeffs, F)
    except RootPolishError as exc:
        if residual > RESIDUAL_TOL:
            raise FormulaBranchError("radical value is not a root and Newton failed", diagnostics) from exc
        polished = F
    if residual > RESIDUAL_TOL and float(backward_error(coeffs, polished)) > RESIDUAL_TOL:
        raise FormulaBranchError("radical value is not a root of the quartic", diagnostics)
    notes = []
    if abs(F - polished) > POLISH_AGREEMENT * max(1.0, abs(F)):
        notes.append("radical value and Newton fixed point disagree")
    return FinslerEval(
        epsilon=eps,
        R=R,
        v1=v1,
        v2=v2,
        F=F,
        residual=residual,
        polished=float(polished),
        census=root_classify(qc),
        depressed=rad.depressed,
        resolvent=rad.resolvent,
        coefficients=qc,
        degenerate=degenerate,
        notes=notes,
    )


def homogeneity_defect(eps, R, v1, v2, lam):
    """``|F(lam v) - lam F(v)| / (lam F(v))``."""
    if not np.all(np.asarray(lam) > 0):
        raise ValueError("lambda must be positive")
    _check_point(eps, R, v1, v2)
    F = fundamental_function(eps, R, v1, v2)
    Fl = fundamental_function(eps, R, lam * np.asarray(v1), lam * np.asarray(v2))
    return np.abs(Fl - lam * F) / (lam * F)


def _energy(eps):
    def L(pts):
        return fundamental_function(eps, pts[..., 0], pts[..., 2], pts[..., 3], polish=True) ** 2

    return L


def hessian(eps, R, v1, v2, rel_step=1e-4, return_error=False, check=True):
    """Fiber Hessian ``g_ij = (1/2) d^2 F^2 / dv_i dv_j``.

    Central differences with step ``rel_step * |v|`` at ``h`` and ``h/2``,
    combined by Richardson extrapolation (order 2 to 4).

    Returns
    -------
    g : ndarray, shape ``(..., 2, 2)``
    err : ndarray, shape ``(..., 2, 2)``, only with ``return_error``
        ``|g_extrapolated - g(h/2)|``.

    Raises
    ------
    ConvexityViolation
        If ``check`` and some ``g`` is not positive definite.
    """
    _check_point(eps, R, v1, v2)
    R_, v1_, v2_ = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (R, v1, v2)))
    shape = R_.shape
    z = np.stack([R_.ravel(), np.zeros(R_.size), v1_.ravel(), v2_.ravel()], axis=-1)
    norm = np.hypot(z[:, 2], z[:, 3])
    names = {"00": (2, 2), "11": (3, 3), "01": (2, 3)}
    L = _energy(eps)

    def at(step):
        h = np.zeros_like(z)
        h[:, 2:] = (step * norm)[:, None]
        st = {k: (ax, fd.partial(ax, 4, order=2)) for k, ax in names.items()}
        d = fd.apply(L, z, h, st)
        g = 0.5 * np.stack(
            [np.stack([d["00"], d["01"]], -1), np.stack([d["01"], d["11"]], -1)], -2
        )
        return g

    g_h = at(rel_step)
    g_h2 = at(rel_step / 2)
    g = (4.0 * g_h2 - g_h) / 3.0
    err = np.abs(g - g_h2)
    g = g.reshape(shape + (2, 2))
    err = err.reshape(shape + (2, 2))
    if check:
        eig = np.linalg.eigvalsh(g)
        if np.any(eig[..., 0] <= 0):
            raise ConvexityViolation(f"fiber Hessian not positive definite (min eigenvalue {eig[..., 0].min()!r})")
    return (g, err) if return_error else g


def spray_coefficients(L, z, h):
    """Geodesic spray ``G^i`` of the 2D Finsler energy ``L = F^2``.

    ``G^i = (1/4) g^{il} (L_{x^k y^l} y^k - L_{x^l})`` with
    ``g_ij = (1/2) L_{y^i y^j}``.  ``z`` has rows ``(x1, x2, y1, y2)``;
    ``h`` is the per-axis step.
    """
    st = {}
    for i in range(2):
        for j in range(i, 2):
            st[f"yy{i}{j}"] = ((2 + i, 2 + j), fd.partial((2 + i, 2 + j), 4))
        for l in range(2):
            st[f"xy{i}{l}"] = ((i, 2 + l), fd.partial((i, 2 + l), 4))
        st[f"x{i}"] = ((i,), fd.partial((i,), 4))
    d = fd.apply(L, z, h, st)
    y = z[:, 2:]
    g = 0.5 * np.stack(
        [np.stack([d["yy00"], d["yy01"]], -1), np.stack([d["yy01"], d["yy11"]], -1)], -2
    )
    rhs = np.stack(
        [d[f"xy0{l}"] * y[:, 0] + d[f"xy1{l}"] * y[:, 1] - d[f"x{l}"] for l in range(2)],
        axis=-1,
    )
    return 0.25 * np.linalg.solve(g, rhs[..., None])[..., 0]


def flag_curvature_2d(L, x, y, inner=2e-3, outer=1e-2, chunk=16):
    """Flag curvature of a 2D Finsler metric given its energy ``L = F^2``.

    Riemann curvature of the spray::

        R^i_k = 2 G^i_{x^k} - y^j G^i_{x^j y^k} + 2 G^j G^i_{y^j y^k}
                - G^i_{y^j} G^j_{y^k}

    and ``K = R^m_m / F^2``.  Derivatives of ``L`` (for ``G``) use step
    ``inner`` and derivatives of ``G`` use step ``outer``; both are absolute
    in the base and relative to ``|y|`` in the fiber.  All stencils are
    fourth-order central differences.

    ``L`` maps an array ``(..., 4)`` of rows ``(x1, x2, y1, y2)`` to ``(...)``.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.atleast_2d(np.asarray(y, dtype=float))
    x, y = np.broadcast_arrays(x, y)
    z = np.concatenate([x, y], axis=-1)
    out = np.empty(len(z))
    for start in range(0, len(z), chunk):
        out[start:start + chunk] = _flag_curvature_chunk(L, z[start:start + chunk], inner, outer)
    return out


def _steps(z, rel):
    norm = np.hypot(z[:, 2], z[:, 3])
    h = np.empty_like(z)
    h[:, :2] = rel
    h[:, 2:] = (rel * norm)[:, None]
    return h


def _flag_curvature_chunk(L, z, inner, outer):
    def G(pts):
        flat = pts.reshape(-1, 4)
        return spray_coefficients(L, flat, _steps(flat, inner)).reshape(pts.shape[:-1] + (2,))

    st = {"G": ((), {(0, 0, 0, 0): 1.0})}
    for k in range(2):
        st[f"x{k}"] = ((k,), fd.partial((k,), 4))
        st[f"y{k}"] = ((2 + k,), fd.partial((2 + k,), 4))
        for j in range(2):
            st[f"xy{j}{k}"] = ((j, 2 + k), fd.partial((j, 2 + k), 4))
            if j <= k:
                st[f"yy{j}{k}"] = ((2 + j, 2 + k), fd.partial((2 + j, 2 + k), 4))
    d = fd.apply(G, z, _steps(z, outer), st)

    def yy(j, k):
        return d[f"yy{min(j, k)}{max(j, k)}"]

    y = z[:, 2:]
    G0 = d["G"]
    trace = 0.0
    for i in range(2):
        k = i
        term = 2.0 * d[f"x{k}"][:, i]
        term = term - sum(y[:, j] * d[f"xy{j}{k}"][:, i] for j in range(2))
        term = term + 2.0 * sum(G0[:, j] * yy(j, k)[:, i] for j in range(2))
        term = term - sum(d[f"y{j}"][:, i] * d[f"y{k}"][:, j] for j in range(2))
        trace = trace + term
    return trace / L(z)


def flag_curvature(eps, R, theta, v1, v2, inner=2e-3, outer=1e-2, return_error=False):
    """Flag curvature of ``F`` at base point ``(R, theta)`` and direction ``(v1, v2)``.

    Coordinates on the space of geodesics are ``x = (R, theta)`` with fiber
    coordinates ``y = (v1, v2)``.  With ``return_error`` the result at the
    doubled steps is subtracted to give an error estimate.

    Raises
    ------
    ValueError
        If the base-point stencil would leave the chart.
    """
    R_, th_, v1_, v2_ = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (R, theta, v1, v2)))
    reach = 2.0 * (inner + outer) * (2.0 if return_error else 1.0)
    _check_point(eps, R_, v1_, v2_, margin=CHART_MARGIN + reach)
    L = _energy(eps)
    x = np.stack([R_.ravel(), th_.ravel()], -1)
    y = np.stack([v1_.ravel(), v2_.ravel()], -1)
    K = flag_curvature_2d(L, x, y, inner, outer).reshape(R_.shape)
    if not return_error:
        return K if K.ndim else float(K)
    K2 = flag_curvature_2d(L, x, y, 2 * inner, 2 * outer).reshape(R_.shape)
    err = np.abs(K - K2)
    if K.ndim == 0:
        return float(K), float(err)
    return K, err
