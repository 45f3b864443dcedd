"""Closed-form cubic and quartic solvers in radicals.

The quartic is handled with the Galois resolvent: the depressed quartic
``X^4 + alpha X^2 + beta X + gamma`` is paired with the cubic
``z^3 - 2 alpha z^2 + (alpha^2 - 4 gamma) z + beta^2`` whose roots are the
products ``(X_i + X_j)(X_k + X_l)``.  The cubic is solved with Cardano's
formulas and the quartic roots are assembled from ``sqrt(-z_i)``.

Every solver broadcasts over numpy arrays; scalar input gives scalar-shaped
output.  Root triples/quadruples are stacked along a new leading axis.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DegenerateDegreeError",
    "DepressedQuartic",
    "backward_error",
    "ResolventSolution",
    "RootPolishError",
    "combine_conjugate_sqrts",
    "depress_quartic",
    "polish_root",
    "solve_depressed_cubic",
    "solve_quartic",
    "solve_resolvent",
]

#: |calB| below this fraction of the cubic's scale counts as a double root.
DEGENERATE_DISCRIMINANT = 1e-12
#: absolute floor used by every scale-relative tolerance
ABS_FLOOR = 1e-14

_SQRT3_2 = np.sqrt(3.0) / 2.0


class DegenerateDegreeError(ValueError):
    """Leading coefficient is zero, so the polynomial is not a quartic."""


class RootPolishError(ArithmeticError):
    """Newton refinement did not reach the residual target."""

    def __init__(self, message, last_iterate, residual):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.residual = residual


@dataclass(frozen=True)
class DepressedQuartic:
    """``X^4 + alpha X^2 + beta X + gamma`` with ``F = X - shift``."""

    alpha: np.ndarray | float
    beta: np.ndarray | float
    gamma: np.ndarray | float
    shift: np.ndarray | float

    def monic_coefficients(self):
        """Coefficients of the monic quartic in ``F`` recovered by expansion.

        Returns ``(1, b, c, d, e)`` for ``F^4 + b F^3 + c F^2 + d F + e``.
        """
        s = self.shift
        a, b, g = self.alpha, self.beta, self.gamma
        # X = F + s
        return (
            np.ones_like(np.asarray(s, dtype=float)),
            4 * s,
            6 * s**2 + a,
            4 * s**3 + 2 * a * s + b,
            s**4 + a * s**2 + b * s + g,
        )


@dataclass(frozen=True)
class ResolventSolution:
    """Roots of the resolvent cubic together with the Cardano intermediates.

    ``calA`` and ``calB`` are the quantities under the cube and square roots:
    ``P = cbrt(calA + sqrt(calB))`` and ``Q = cbrt(calA - sqrt(calB))``.
    """

    z1: np.ndarray | complex
    z2: np.ndarray | complex
    z3: np.ndarray | complex
    P: np.ndarray | complex
    Q: np.ndarray | complex
    calA: np.ndarray | float
    calB: np.ndarray | float

    @property
    def roots(self):
        return np.stack([self.z1, self.z2, self.z3])

    @property
    def all_real(self):
        """True where the three resolvent roots are real (``calB <= 0``)."""
        return np.asarray(self.calB) <= 0


def _check_finite(*values):
    for v in values:
        if not np.all(np.isfinite(v)):
            raise ValueError("non-finite coefficient")


def _cardano(p, q):
    """Cardano radicals for ``w^3 + p w + q = 0``.

    Returns ``(P, Q, calA, calB)`` with the branch of ``Q`` tied to ``P`` so
    that ``P * Q = -p / 3``.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    # w = s u with s a power of two keeps p**3 and q**2 inside the float range
    with np.errstate(divide="ignore"):
        size = np.maximum(0.5 * np.log2(np.abs(p)), np.log2(np.abs(q)) / 3.0)
    s = np.exp2(np.where(np.isfinite(size), np.round(size), 0.0))
    p = p / s / s
    q = q / s / s / s
    calA = -q / 2.0
    calB = q * q / 4.0 + p**3 / 27.0
    scale = np.maximum(calA * calA, np.abs(p / 3.0) ** 3)
    calB = np.where(np.abs(calB) <= DEGENERATE_DISCRIMINANT * scale, 0.0, calB)

    # one real root: real cube root of the larger-modulus radicand
    sq = np.sqrt(np.maximum(calB, 0.0))
    radicand = calA + np.where(calA >= 0, sq, -sq)
    P_real = np.cbrt(radicand).astype(complex)
    # three real roots: principal complex cube root, Q becomes conj(P)
    P_cplx = np.power(calA + 1j * np.sqrt(np.maximum(-calB, 0.0)), 1.0 / 3.0)
    P = np.where(calB >= 0, P_real, P_cplx)

    with np.errstate(divide="ignore", invalid="ignore"):
        Q_paired = (-p / 3.0) / P
    # P == 0 only when calA == calB == 0, hence Q = cbrt(0) = 0 as well
    Q = np.where(P == 0, 0.0, Q_paired)
    # undo the scaling; an underflowing calB keeps its sign
    calB_out = calB * s * s * s * s * s * s
    calB_out = np.where((calB_out == 0) & (calB != 0), np.copysign(5e-324, calB), calB_out)
    return P * s, Q * s, calA * s * s * s, calB_out


def _cube_roots_from_radicals(P, Q):
    s = P + Q
    d = 1j * _SQRT3_2 * (P - Q)
    return s, -0.5 * s + d, -0.5 * s - d


def solve_depressed_cubic(p, q):
    """Roots of ``w^3 + p w + q = 0`` by Cardano's formulas.

    Parameters
    ----------
    p, q : float or array_like
        Linear and constant coefficients.

    Returns
    -------
    ndarray of complex, shape ``(3,) + broadcast(p, q).shape``
        ``P + Q``, ``omega P + omega^2 Q``, ``omega^2 P + omega Q``.
        When the discriminant is negative (three real roots) the
        imaginary parts are exactly zero.
    """
    _check_finite(p, q)
    P, Q, _, calB = _cardano(p, q)
    w = np.stack(_cube_roots_from_radicals(P, Q))
    return np.where(calB <= 0, w.real + 0j, w)


def _refine_real_root(alpha, beta, gamma, z, steps=2):
    # P + Q + 2 alpha/3 cancels when z is small against alpha; Newton on
    # the undepressed cubic restores its relative accuracy
    c2, c1, c0 = -2.0 * alpha, alpha * alpha - 4.0 * gamma, beta * beta
    f = ((z + c2) * z + c1) * z + c0
    for _ in range(steps):
        fp = (3.0 * z + 2.0 * c2) * z + c1
        with np.errstate(divide="ignore", invalid="ignore"):
            cand = np.where(fp != 0, z - f / fp, z)
        fc = ((cand + c2) * cand + c1) * cand + c0
        better = np.isfinite(fc) & (np.abs(fc) < np.abs(f))
        z = np.where(better, cand, z)
        f = np.where(better, fc, f)
    return z


def solve_resolvent(alpha, beta, gamma):
    """Solve ``z^3 - 2 alpha z^2 + (alpha^2 - 4 gamma) z + beta^2 = 0``.

    ``z1`` is always real.  Where ``calB > 0`` the pair ``z2, z3`` is complex
    conjugate, otherwise all three roots are real and ``z1`` is the largest.
    """
    _check_finite(alpha, beta, gamma)
    return _resolvent(alpha, beta, gamma)


def _resolvent(alpha, beta, gamma):
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    # z = w + 2 alpha / 3
    p = -alpha * alpha / 3.0 - 4.0 * gamma
    q = 2.0 * alpha**3 / 27.0 - 8.0 * alpha * gamma / 3.0 + beta * beta
    P, Q, calA, calB = _cardano(p, q)
    w1, w2, w3 = _cube_roots_from_radicals(P, Q)
    shift = 2.0 * alpha / 3.0
    real = calB <= 0
    z1 = _refine_real_root(alpha, beta, gamma, w1.real + shift) + 0j
    z2 = np.where(real, w2.real + 0j, w2) + shift
    z3 = np.where(real, w3.real + 0j, w3) + shift
    return ResolventSolution(z1=z1, z2=z2, z3=z3, P=P, Q=Q, calA=calA, calB=calB)


def depress_quartic(A, B, C, D, E):
    """Remove the cubic term: ``F = X - B/(4A)``.

    Raises
    ------
    DegenerateDegreeError
        If ``A`` is zero anywhere.
    """
    A = np.asarray(A, dtype=float)
    if np.any(A == 0):
        raise DegenerateDegreeError("leading coefficient A must be non-zero")
    b, c, d, e = (np.asarray(x, dtype=float) / A for x in (B, C, D, E))
    s = b / 4.0
    alpha = c - 6.0 * s * s
    beta = d - 2.0 * c * s + 8.0 * s**3
    gamma = e - d * s + c * s * s - 3.0 * s**4
    return DepressedQuartic(alpha=alpha, beta=beta, gamma=gamma, shift=s)


def _resolvent_square_roots(sol, beta):
    """``sqrt(-z_i)`` with branches fixed so the product equals ``-beta``."""
    mz = -sol.roots
    order = np.argsort(-np.abs(mz), axis=0)
    big = np.take_along_axis(mz, order, axis=0)
    r1 = np.sqrt(big[0])
    r2 = np.sqrt(big[1])
    prod = r1 * r2
    # third radical from the product constraint; exact when |z3| is tiny
    with np.errstate(divide="ignore", invalid="ignore"):
        r3 = np.where(prod != 0, -beta / prod, np.sqrt(big[2]))
    sq = np.empty_like(mz)
    np.put_along_axis(sq, order, np.stack([r1, r2, r3]), axis=0)
    return sq


def _root_scale(A, B, C, D, E):
    """``sigma`` with ``|c_k / (A sigma^k)| <= 1``, and the rescaled monic coefficients.

    Computed in logarithms so that extreme coefficient ratios cannot overflow.
    """
    with np.errstate(divide="ignore", invalid="ignore"):
        logA = np.log(np.abs(A))
        logs = [np.log(np.abs(c)) - logA for c in (B, C, D, E)]
        log_sigma = np.max(np.stack([l / k for k, l in enumerate(logs, start=1)]), axis=0)
        log_sigma = np.where(np.isfinite(log_sigma), log_sigma, 0.0)
        scaled = [
            np.sign(c) * np.sign(A) * np.exp(l - k * log_sigma)
            for k, (c, l) in enumerate(zip((B, C, D, E), logs), start=1)
        ]
    return np.exp(log_sigma), [np.where(c == 0, 0.0, x) for c, x in zip((B, C, D, E), scaled)]


def _solve_quartic_radicals(A, B, C, D, E):
    sigma, (b, c, d, e) = _root_scale(A, B, C, D, E)
    return sigma * _solve_monic_radicals(np.ones_like(b), b, c, d, e)


def _solve_monic_radicals(A, B, C, D, E):
    dq = depress_quartic(A, B, C, D, E)
    sol = _resolvent(dq.alpha, dq.beta, dq.gamma)
    s1, s2, s3 = _resolvent_square_roots(sol, np.asarray(dq.beta))
    X = np.stack(
        [
            0.5 * (s1 + s2 + s3),
            0.5 * (s1 - s2 - s3),
            0.5 * (-s1 + s2 - s3),
            0.5 * (-s1 - s2 + s3),
        ]
    )
    return X - dq.shift


def backward_error(coeffs, x):
    """``|f(x)| / max_k |c_k x^k|`` for quartic coefficients ``(A, ..., E)``."""
    x = np.asarray(x)
    terms = np.stack([np.asarray(c) * x ** (4 - k) for k, c in enumerate(coeffs)])
    scale = np.maximum(np.abs(terms).max(axis=0), ABS_FLOOR)
    return np.abs(terms.sum(axis=0)) / scale


_PERMS = np.array(list(itertools.permutations(range(4))))


def solve_quartic(A, B, C, D, E):
    """All four roots of ``A F^4 + B F^3 + C F^2 + D F + E = 0`` in radicals.

    The depressed quartic ``X^4 + alpha X^2 + beta X + gamma`` (``F = X -
    B/(4A)``) is solved through its resolvent cubic:
    ``X_1 = (s1 + s2 + s3)/2``, ``X_2 = (s1 - s2 - s3)/2``,
    ``X_3 = (-s1 + s2 - s3)/2``, ``X_4 = (-s1 - s2 + s3)/2`` where
    ``s_i = sqrt(-z_i)`` and the branches satisfy ``s1 s2 s3 = -beta``.

    A large shift ``B/(4A)`` destroys the small roots, so the reversed
    quartic (roots ``1/F``) is solved by the same formulas as well; the two
    root sets are paired by the closest permutation and each root keeps the
    candidate with the smaller backward error.

    Returns
    -------
    ndarray of complex, shape ``(4,) + broadcast shape``

    Raises
    ------
    DegenerateDegreeError
        If ``A == 0``.
    """
    _check_finite(A, B, C, D, E)
    coeffs = np.broadcast_arrays(*(np.asarray(c, dtype=float) for c in (A, B, C, D, E)))
    if np.any(coeffs[0] == 0):
        raise DegenerateDegreeError("leading coefficient A must be non-zero")
    X = _solve_quartic_radicals(*coeffs)

    has_inverse = coeffs[4] != 0
    if not np.all(has_inverse):
        # F = 0 is an exact root: deflate it instead
        X = X.copy()
        for idx in np.ndindex(has_inverse.shape):
            if not has_inverse[idx]:
                X[(slice(None),) + idx] = _deflated_roots(*(float(c[idx]) for c in coeffs))
    if not np.any(has_inverse):
        return X
    rev = [np.where(has_inverse, c, 1.0) for c in coeffs[::-1]]
    # a tiny E can overflow the reversed solve; such candidates are discarded
    with np.errstate(all="ignore"):
        Y = 1.0 / _solve_quartic_radicals(*rev)
    Y = np.where(np.isfinite(Y), Y, np.inf)
    # every permutation meets the same non-finite candidates; pair on the rest
    dist = np.abs(X[None] - Y[_PERMS])
    cost = np.where(np.isfinite(dist), dist, 0.0).sum(axis=1)
    Y = np.take_along_axis(Y, _PERMS[np.argmin(cost, axis=0)].T, axis=0)
    with np.errstate(all="ignore"):
        better = has_inverse & (backward_error(coeffs, Y) < backward_error(coeffs, X))
    return _companion_fallback(coeffs, _newton_fallback(coeffs, np.where(better, Y, X)))


def _cubic_roots(a, b, c, d):
    # x = w - b/(3a)
    p = (3 * a * c - b * b) / (3 * a * a)
    q = (2 * b**3 - 9 * a * b * c + 27 * a * a * d) / (27 * a**3)
    rest = solve_depressed_cubic(p, q) - b / (3 * a)
    rest = _newton_fallback((0.0, a, b, c, d), rest)
    return _companion_fallback((0.0, a, b, c, d), rest)


def _deflate_one(coeffs, g):
    """Remaining three roots after dividing out the real root ``g``.

    Forward division suits a small root, backward division a large one; the
    candidate with the smaller backward error on the quartic is returned.
    """
    A, B, C, D, E = coeffs
    q1 = B + g * A
    q2 = C + g * q1
    forward = _cubic_roots(A, q1, q2, D + g * q2)
    d = -E / g
    c = (d - D) / g
    b = (c - C) / g
    backward = _cubic_roots((b - B) / g, b, c, d)
    fe = backward_error(coeffs, forward)
    be = backward_error(coeffs, backward)
    return np.where(be < fe, backward, forward)


def _companion_fallback(coeffs, X, threshold=1e-10):
    """Swap in companion-matrix eigenvalues where they beat the given roots."""
    with np.errstate(all="ignore"):
        err = backward_error(coeffs, X).max(axis=0)
    if not np.any(~(err <= threshold)):
        return X
    X = np.array(X, dtype=complex)
    coeffs = np.broadcast_arrays(*(np.asarray(c, dtype=float) for c in coeffs))
    for idx in np.ndindex(err.shape):
        if err[idx] <= threshold:
            continue
        eig = np.roots([c[idx] for c in coeffs])
        if len(eig) != X.shape[0]:
            continue
        col = (slice(None),) + idx
        with np.errstate(all="ignore"):
            if np.max(backward_error(tuple(c[idx] for c in coeffs), eig)) < err[idx]:
                X[col] = eig
    return X


def _deflated_roots(A, B, C, D, E):
    """Roots of a quartic with ``E == 0`` (possibly more zero roots)."""
    lower = [A, B, C, D]
    zeros = 1
    while lower[-1] == 0.0 and len(lower) > 1:
        lower.pop()
        zeros += 1
    if len(lower) == 4:
        rest = _cubic_roots(*lower)
    elif len(lower) == 3:
        a, b, c = lower
        disc = complex(b * b - 4 * a * c) ** 0.5
        q = -0.5 * (b + (disc if b >= 0 else -disc))
        rest = np.array([q / a, c / q if q != 0 else 0.0])
    elif len(lower) == 2:
        rest = np.array([-lower[1] / lower[0]])
    else:
        rest = np.array([])
    return np.concatenate([np.asarray(rest, dtype=complex), np.zeros(zeros, dtype=complex)])


def _vieta_repair(coeffs, X, bad):
    """Rebuild up to two unresolved roots from the resolved ones.

    ``prod = E / A`` and ``sum = -B / A`` determine the remainder: one root
    directly from the product, two as the roots of a quadratic.
    """
    X = np.array(X, dtype=complex)
    coeffs = np.broadcast_arrays(*(np.asarray(c, dtype=float) for c in coeffs))
    for idx in np.ndindex(coeffs[0].shape):
        col = (slice(None),) + idx
        mask = bad[col]
        m = int(mask.sum())
        if m == 0 or m > 3:
            continue
        A, B, C, D, E = (float(c[idx]) for c in coeffs)
        good = X[col][~mask]
        if m == 3:
            g = good[0]
            if abs(g.imag) <= 1e-12 * abs(g) and g.real != 0 and A != 0:
                col_vals = X[col].copy()
                col_vals[mask] = _deflate_one((A, B, C, D, E), g.real)
                X[col] = col_vals
            continue
        if A == 0 or E == 0 or np.any(good == 0):
            continue
        # divide one root at a time: the product of the good roots may underflow
        prod = E / A
        for g in good:
            prod = prod / g
        if m == 1:
            X[col] = np.where(mask, prod, X[col])
        else:
            total = -B / A - good.sum()
            disc = np.sqrt(total * total - 4 * prod + 0j)
            q = 0.5 * (total + (disc if (total.conjugate() * disc).real >= 0 else -disc))
            pair = [q, prod / q if q != 0 else 0.0]
            col_vals = X[col].copy()
            col_vals[mask] = pair
            X[col] = col_vals
    return X


def _newton_fallback(coeffs, X, threshold=1e-10, steps=12):
    # only roots the radicals could not resolve (a root far below or between
    # the others in magnitude) are touched; the best iterate is kept
    with np.errstate(all="ignore"):
        err = backward_error(coeffs, X)
        bad = ~(err <= threshold)
        if not np.any(bad):
            return X
        A, B, C, D, E = coeffs
        X = _vieta_repair(coeffs, X, bad)
        err = backward_error(coeffs, X)
        bad = ~(err <= threshold)
        x = best = X
        for _ in range(steps):
            f = (((A * x + B) * x + C) * x + D) * x + E
            fp = ((4.0 * A * x + 3.0 * B) * x + 2.0 * C) * x + D
            x = np.where(bad & (fp != 0), x - f / fp, x)
            xerr = backward_error(coeffs, x)
            take = bad & np.isfinite(x) & (xerr < err)
            best = np.where(take, x, best)
            err = np.where(take, xerr, err)
            x = np.where(np.isfinite(x), x, best)
    return best


def combine_conjugate_sqrts(a, b):
    """Real branch of ``sqrt(z) + sqrt(conj(z))`` for ``z = a + b i``.

    Equals ``sqrt(2) * sqrt(a + |z|)``, i.e. ``2 sqrt|z| cos(arg z / 2)``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    m = np.hypot(a, b)
    with np.errstate(divide="ignore", invalid="ignore"):
        # a + |z| computed without cancellation for a < 0
        t = np.where(a >= 0, a + m, np.where(m - a > 0, np.abs(b) * (np.abs(b) / (m - a)), 0.0))
    out = np.sqrt(2.0 * t)
    return out if out.ndim else float(out)


def _horner(coeffs, x):
    f = 0.0
    for c in coeffs:
        f = f * x + c
    return f


def _monomial_scale(coeffs, x):
    ax = abs(x)
    return max(max(abs(c) * ax ** (4 - k) for k, c in enumerate(coeffs)), ABS_FLOOR)


def polish_root(A, B, C, D, E, x0, tol=1e-13, max_iter=50):
    """Newton refinement of a simple real root of the quartic.

    Converges when ``|f(x)| <= tol * max_k |c_k x^k|``.

    Raises
    ------
    RootPolishError
        After ``max_iter`` iterations, or on a vanishing derivative, with the
        last iterate and residual attached.
    """
    coeffs = tuple(float(c) for c in (A, B, C, D, E))
    _check_finite(*coeffs, x0)
    dcoeffs = (4 * coeffs[0], 3 * coeffs[1], 2 * coeffs[2], coeffs[3])
    x = float(x0)
    f = _horner(coeffs, x)
    for _ in range(max_iter):
        if abs(f) <= tol * _monomial_scale(coeffs, x):
            return x
        fp = _horner(dcoeffs, x)
        if fp == 0:
            raise RootPolishError("zero derivative during Newton step", x, abs(f))
        x_new = x - f / fp
        f_new = _horner(coeffs, x_new)
        if x_new == x:
            # fixed point of the floating-point iteration
            f = f_new
            break
        x, f = x_new, f_new
    if abs(f) <= tol * _monomial_scale(coeffs, x):
        return x
    raise RootPolishError(
        f"Newton did not converge in {max_iter} iterations", x, abs(f)
    )
