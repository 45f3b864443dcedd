import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zollfinsler import polyroots
from zollfinsler.polyroots import (
    DegenerateDegreeError,
    RootPolishError,
    backward_error,
    combine_conjugate_sqrts,
    depress_quartic,
    polish_root,
    solve_depressed_cubic,
    solve_quartic,
    solve_resolvent,
)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False, allow_subnormal=False)


def as_multiset(roots, digits=10):
    return sorted((round(z.real, digits), round(z.imag, digits)) for z in np.ravel(roots))


@pytest.mark.parametrize(
    "p, q, expected",
    [
        (0.0, 0.0, [0, 0, 0]),
        (-1.0, 0.0, [0, 1, -1]),
        (-7.0, 6.0, [1, 2, -3]),
    ],
)
def test_depressed_cubic_examples(p, q, expected):
    w = solve_depressed_cubic(p, q)
    assert as_multiset(w) == as_multiset(np.array(expected, dtype=complex))


def test_depressed_cubic_complex_pair():
    # w^3 - 1: one real root and the two primitive cube roots of unity
    w = solve_depressed_cubic(0.0, -1.0)
    want = [1, cmath.exp(2j * math.pi / 3), cmath.exp(-2j * math.pi / 3)]
    assert as_multiset(w) == as_multiset(np.array(want))


@settings(max_examples=300, deadline=None)
@given(finite, finite)
def test_depressed_cubic_residual(p, q):
    w = solve_depressed_cubic(p, q)
    scale = max(1.0, abs(p) ** 1.5, abs(q))
    assert np.all(np.abs(w**3 + p * w + q) <= 1e-9 * scale)


def test_cardano_pairing_in_casus_irreducibilis():
    P, Q, calA, calB = polyroots._cardano(np.array(-7.0), np.array(6.0))
    assert calB < 0
    assert P * Q == pytest.approx(7.0 / 3.0, rel=1e-14)
    assert Q == pytest.approx(P.conjugate(), rel=1e-14)


@pytest.mark.parametrize(
    "alpha, beta, gamma, expected",
    [
        (0.0, 0.0, 0.0, [0, 0, 0]),
        (-1.0, 0.0, 0.0, [0, -1, -1]),
    ],
)
def test_resolvent_examples(alpha, beta, gamma, expected):
    sol = solve_resolvent(alpha, beta, gamma)
    assert as_multiset(sol.roots, 7) == as_multiset(np.array(expected, dtype=complex), 7)
    assert sol.z1.imag == 0


@settings(max_examples=300, deadline=None)
@given(finite, finite, finite)
def test_resolvent_roots_and_vieta(alpha, beta, gamma):
    sol = solve_resolvent(alpha, beta, gamma)
    z = sol.roots
    c2, c1, c0 = -2 * alpha, alpha**2 - 4 * gamma, beta**2
    scale = max(1.0, abs(alpha) ** 3, abs(c1) ** 1.5, c0, float(np.max(np.abs(z))) ** 3)
    assert np.all(np.abs(((z + c2) * z + c1) * z + c0) <= 1e-9 * scale)
    zs = max(1.0, float(np.max(np.abs(z))))
    assert abs(z.sum() - 2 * alpha) <= 1e-10 * zs
    pairs = z[0] * z[1] + z[0] * z[2] + z[1] * z[2]
    assert abs(pairs - c1) <= 1e-10 * zs**2
    assert abs(z.prod() + c0) <= 1e-9 * zs**3
    if sol.calB > 0:
        assert z[1] == pytest.approx(z[2].conjugate(), rel=1e-12, abs=1e-12)


def test_resolvent_structure_formulas():
    sol = solve_resolvent(-3.0, 0.7, 1.1)
    s = sol.P + sol.Q
    alpha = -3.0
    assert sol.z1 == pytest.approx(s + 2 * alpha / 3, rel=1e-12)
    half = -0.5 * (s - 4 * alpha / 3)
    assert sol.z2 == pytest.approx(half + 1j * math.sqrt(3) / 2 * (sol.P - sol.Q), rel=1e-12)


@pytest.mark.parametrize(
    "coeffs, expected",
    [
        ((1, 0, 0, 0, -1), [1, -1, 1j, -1j]),
        ((1, 0, -5, 0, 4), [1, -1, 2, -2]),
        ((2, 0, -10, 0, 8), [1, -1, 2, -2]),
        ((1, -10, 35, -50, 24), [1, 2, 3, 4]),
    ],
)
def test_quartic_examples(coeffs, expected):
    roots = solve_quartic(*coeffs)
    assert as_multiset(roots, 9) == as_multiset(np.array(expected, dtype=complex), 9)


def test_quartic_rejects_zero_leading_coefficient():
    with pytest.raises(DegenerateDegreeError):
        solve_quartic(0, 1, 2, 3, 4)


def test_quartic_rejects_non_finite():
    with pytest.raises(ValueError):
        solve_quartic(1, math.nan, 0, 0, 1)


def test_quartic_known_roots_batch():
    rng = np.random.default_rng(42)
    roots = rng.uniform(-3, 3, (4, 2000))
    coeffs = [np.poly(r) for r in roots.T]
    A, B, C, D, E = np.array(coeffs).T
    found = solve_quartic(A, B, C, D, E)
    assert np.max(np.abs(found.imag)) < 1e-6
    assert np.max(np.abs(np.sort(found.real, axis=0) - np.sort(roots, axis=0))) < 1e-8


def test_quartic_matches_high_precision_oracle():
    rng = np.random.default_rng(7)
    for _ in range(40):
        c = rng.uniform(-50, 50, 5)
        ours = solve_quartic(*c)
        ref = mpmath.polyroots([mpmath.mpf(float(x)) for x in c], maxsteps=200, extraprec=200)
        ref = np.array([complex(z) for z in ref])
        # pair each reference root with the nearest computed one
        for z in ref:
            assert np.min(np.abs(ours - z)) <= 1e-7 * max(1.0, abs(z))


@settings(max_examples=300, deadline=None)
@given(st.floats(0.01, 1e3) | st.floats(-1e3, -0.01), finite, finite, finite, finite)
def test_quartic_backward_error(A, B, C, D, E):
    roots = solve_quartic(A, B, C, D, E)
    assert np.all(backward_error((A, B, C, D, E), roots) <= 1e-8)


def test_quartic_vieta():
    rng = np.random.default_rng(3)
    c = rng.uniform(-1e3, 1e3, (5, 5000))
    c[0] = np.where(np.abs(c[0]) < 1, 1.0, c[0])
    X = solve_quartic(*c)
    scale_s = np.maximum(np.abs(X).sum(0), np.abs(c[1] / c[0]))
    assert np.all(np.abs(X.sum(0) + c[1] / c[0]) <= 1e-8 * scale_s)
    scale_p = np.maximum(np.abs(X).prod(0), np.abs(c[4] / c[0]))
    assert np.all(np.abs(X.prod(0) - c[4] / c[0]) <= 1e-8 * scale_p)


def test_quartic_random_residual_property():
    rng = np.random.default_rng(11)
    c = rng.uniform(-1e3, 1e3, (5, 10_000))
    X = solve_quartic(*c)
    assert np.max(backward_error(tuple(c), X)) <= 1e-8


def test_square_root_product_constraint():
    rng = np.random.default_rng(5)
    c = rng.uniform(-10, 10, (5, 500))
    dq = depress_quartic(*c)
    sol = solve_resolvent(dq.alpha, dq.beta, dq.gamma)
    s = polyroots._resolvent_square_roots(sol, dq.beta)
    scale = np.maximum(np.abs(s).prod(0), 1.0)
    assert np.all(np.abs(s.prod(0) + dq.beta) <= 1e-9 * scale)


@pytest.mark.parametrize(
    "coeffs",
    [(1.0, 4.0, 0.0, 0.0, 0.0), (3.0, -2.0, 0.5, 7.0, -1.0), (0.9, 0.3, -2.0, 0.01, -0.4)],
)
def test_depressed_reconstruction(coeffs):
    dq = depress_quartic(*coeffs)
    A = coeffs[0]
    rebuilt = A * np.array(dq.monic_coefficients())
    assert rebuilt == pytest.approx(np.array(coeffs), rel=1e-12, abs=1e-12 * max(map(abs, coeffs)))


def test_depressed_reconstruction_large_shift():
    # the constant term is a cancellation of shift**4 sized terms
    coeffs = (0.2, 1e3, -1e2, 3.0, 1e-3)
    dq = depress_quartic(*coeffs)
    rebuilt = coeffs[0] * np.array(dq.monic_coefficients())
    term_scale = coeffs[0] * np.abs(dq.shift) ** np.arange(5)
    assert np.all(np.abs(rebuilt - np.array(coeffs)) <= 1e-12 * np.maximum(term_scale, 1.0))


def test_depress_example():
    dq = depress_quartic(1, 4, 0, 0, 0)
    assert (dq.shift, dq.alpha, dq.beta, dq.gamma) == (1.0, -6.0, 8.0, -3.0)


@pytest.mark.parametrize("E", [0.0, 1e-20, 6.77e-176])
def test_quartic_tiny_root(E):
    roots = solve_quartic(1.0, 0.0, 0.0, 1.0, E)
    assert np.all(backward_error((1.0, 0.0, 0.0, 1.0, E), roots) <= 1e-12)
    assert np.min(np.abs(roots + E)) <= 1e-12 * max(E, 1e-300)


@pytest.mark.parametrize(
    "a, b, expected",
    [(1.0, 0.0, 2.0), (0.0, 0.0, 0.0), (3.0, 4.0, 4.0), (-3.0, 4.0, 2.0)],
)
def test_combine_conjugate_sqrts_examples(a, b, expected):
    assert combine_conjugate_sqrts(a, b) == pytest.approx(expected, rel=1e-15, abs=1e-15)


@settings(max_examples=500, deadline=None)
@given(finite, finite)
def test_combine_conjugate_sqrts_properties(a, b):
    s = float(combine_conjugate_sqrts(a, b))
    assert s >= 0
    m = math.hypot(a, b)
    assert s * s == pytest.approx(2 * a + 2 * m, rel=1e-12, abs=1e-12 * max(m, 1e-300))
    z = complex(a, b)
    direct = (cmath.sqrt(z) + cmath.sqrt(z.conjugate())).real
    assert s == pytest.approx(direct, rel=1e-12, abs=1e-12 * math.sqrt(max(m, 1e-300)))


@pytest.mark.parametrize(
    "coeffs, x0, root",
    [((1, 0, -5, 0, 4), 1.9, 2.0), ((1, 0, 0, 0, -1), 0.9, 1.0), ((1, -10, 35, -50, 24), 3.2, 3.0)],
)
def test_polish_root_examples(coeffs, x0, root):
    assert polish_root(*coeffs, x0) == pytest.approx(root, abs=1e-12)


def test_polish_root_reports_failure():
    # no real root: F^4 + 1
    with pytest.raises(RootPolishError) as info:
        polish_root(1, 0, 0, 0, 1, 0.3)
    assert math.isfinite(info.value.residual)


def test_polish_agrees_with_radicals_on_simple_roots():
    rng = np.random.default_rng(9)
    for _ in range(300):
        c = rng.uniform(-10, 10, 5)
        for z in solve_quartic(*c):
            if abs(z.imag) > 1e-12:
                continue
            x = z.real
            fp = ((4 * c[0] * x + 3 * c[1]) * x + 2 * c[2]) * x + c[3]
            scale = max(abs(c[k]) * abs(x) ** (4 - k) for k in range(5))
            if abs(fp) <= 1e-6 * scale:
                continue
            assert abs(polish_root(*c, x) - x) <= 1e-7 * max(1.0, abs(x))
