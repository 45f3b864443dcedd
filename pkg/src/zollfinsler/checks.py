"""Numerical verification suite.

Each ``check_*`` function measures one property on a fixed, seeded sample
and returns a :class:`CheckResult`.  The test-suite and ``zollfinsler
verify`` share these implementations.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import finsler, indicatrix, polyroots, zoll

#: chart margin for the indicatrix grids
GRID_MARGIN = 0.05
#: |R| bound for flag-curvature samples (finite-difference round-off grows like 1/cos R)
CURVATURE_R_MAX = 1.2

DEFAULT_TOLERANCES = {
    "gauss_agreement": 1e-12,
    "implicit": 1e-10,
    "integral": 1e-8,
    "backward": 1e-8,
    "polish": 1e-7,
    "unit": 1e-8,
    "vieta": 1e-9,
    "conjugate_radical": 1e-12,
    "homogeneity": 1e-8,
    "flag_curvature": 1e-3,
    "closure": 1e-5,
    "return_length": 1e-4,
    "round_limit": 1e-6,
    "quartic_roots": 1e-8,
    "quartic_residual": 1e-8,
}

DEFAULT_EPSILONS = {
    "gauss": (0.05, 0.25, 0.45),
    "grid": (0.05, 0.1, 0.25, 0.4, 0.45),
    "curvature": (0.1, 0.25, 0.4),
    "geodesics": (0.1, 0.25, 0.4),
}


@dataclass
class CheckResult:
    """Outcome of one criterion; ``value`` is the worst measured quantity."""

    name: str
    passed: bool
    value: float
    tolerance: float
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self):
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] {self.name}: worst={self.value:.3e} (tol {self.tolerance:.1e})"

    def to_dict(self):
        return asdict(self)


def _tol(tolerances, name):
    return (tolerances or {}).get(name, DEFAULT_TOLERANCES[name])


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t0
        return res

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def r_grid(R, n=50):
    """``n`` interior colatitudes of ``(r_c, pi - r_c)``."""
    rc = float(indicatrix.turning_radius(R))
    return np.linspace(rc, math.pi - rc, n + 2)[1:-1]


def R_grid(n=20, margin=GRID_MARGIN):
    return np.linspace(-math.pi / 2 + margin, math.pi / 2 - margin, n)


def indicatrix_grid(epsilons, n_R=20, n_r=50):
    """Both branches of the parametric curve over the ``(eps, R, r)`` grid.

    Returns a dict of flat arrays ``eps, R, r, v1, v2``.
    """
    cols = {k: [] for k in ("eps", "R", "r", "v1", "v2")}
    for eps in epsilons:
        for R in R_grid(n_R):
            r = r_grid(R, n_r)
            v2 = indicatrix.v2_closed_form(eps, R, r)
            v1 = np.sqrt(indicatrix._excursion(R, r)) / math.cos(R)
            for branch in (1.0, -1.0):
                cols["eps"].append(np.full(r.shape, eps))
                cols["R"].append(np.full(r.shape, R))
                cols["r"].append(r)
                cols["v1"].append(branch * v1)
                cols["v2"].append(v2)
    return {k: np.concatenate(v) for k, v in cols.items()}


def geometric_samples(rng, n, eps_max=0.499, R_margin=GRID_MARGIN):
    """Random ``(eps, R, v1, v2)`` with ``v1 != 0`` and ``|v|`` in ``[0.1, 10]``."""
    eps = rng.uniform(1e-3, eps_max, n)
    R = rng.uniform(-math.pi / 2 + R_margin, math.pi / 2 - R_margin, n)
    phi = rng.uniform(0.0, 2 * math.pi, n)
    rho = 10.0 ** rng.uniform(-1.0, 1.0, n)
    v1 = rho * np.cos(phi)
    v2 = rho * np.sin(phi)
    v1 = np.where(v1 == 0.0, 1e-3, v1)
    return eps, R, v1, v2


def _by_eps(eps, *arrays):
    for e in np.unique(eps):
        m = eps == e
        yield (float(e),) + tuple(a[m] for a in arrays)


@_timed
def check_gauss_curvature(epsilons=DEFAULT_EPSILONS["gauss"], n=10_000, tolerances=None):
    """Specialised curvature positive on ``[-1, 1]`` and equal to the general one."""
    tol = _tol(tolerances, "gauss_agreement")
    x = np.linspace(-1.0, 1.0, n)
    min_G, worst = math.inf, 0.0
    for eps in epsilons:
        p = zoll.HParam(eps)
        G = zoll.gauss_curvature(p, x)
        Gg = zoll.gauss_curvature_general(p, x)
        min_G = min(min_G, float(G.min()))
        worst = max(worst, float(np.max(np.abs(G - Gg) / np.abs(Gg))))
    return CheckResult(
        "1 gauss curvature", min_G > 0 and worst < tol, worst, tol, {"min_G": min_G}
    )


@_timed
def check_implicit_identity(epsilons=DEFAULT_EPSILONS["grid"], tolerances=None):
    """Parametric indicatrix points satisfy the implicit curve equation."""
    tol = _tol(tolerances, "implicit")
    g = indicatrix_grid(epsilons)
    worst = 0.0
    for eps, R, v1, v2 in _by_eps(g["eps"], g["R"], g["v1"], g["v2"]):
        worst = max(worst, float(np.max(np.abs(indicatrix.implicit_residual(eps, R, v1, v2)))))
    return CheckResult("2 parametric-implicit identity", worst < tol, worst, tol, {"points": len(g["v1"])})


@_timed
def check_integral_identity(epsilons=DEFAULT_EPSILONS["grid"], tolerances=None):
    """Closed-form integral against endpoint-weighted quadrature."""
    tol = _tol(tolerances, "integral")
    worst, where = 0.0, None
    count = 0
    for eps in epsilons:
        for R in R_grid():
            for r in r_grid(R):
                a = indicatrix.appendix_integral(eps, R, r)
                q = indicatrix.appendix_integral_quadrature(eps, R, r)
                err = abs(a - q) / max(1.0, abs(a))
                count += 1
                if err > worst:
                    worst, where = err, (eps, float(R), float(r))
    return CheckResult(
        "3 integral identity", worst < tol, worst, tol, {"points": count, "worst_at": where}
    )


@_timed
def check_radical_formula(n=10_000, seed=0, epsilons=DEFAULT_EPSILONS["grid"], tolerances=None):
    """Backward error, Newton agreement and indicatrix normalisation of F."""
    tol_b = _tol(tolerances, "backward")
    tol_p = _tol(tolerances, "polish")
    tol_u = _tol(tolerances, "unit")
    rng = np.random.default_rng(seed)
    eps, R, v1, v2 = geometric_samples(rng, n)
    be = np.empty(n)
    agree = np.empty(n)
    for e, idx in _by_eps(eps, np.arange(n)):
        qc = indicatrix.quartic_coefficients(e, R[idx], v1[idx], v2[idx])
        F = finsler.fundamental_function(e, R[idx], v1[idx], v2[idx])
        be[idx] = polyroots.backward_error(qc.astuple(), F)
        for k, i in enumerate(idx):
            c = tuple(float(x[k]) for x in qc.astuple())
            pol = polyroots.polish_root(*c, float(F[k]))
            agree[i] = abs(pol - F[k]) / max(1.0, abs(F[k]))
    g = indicatrix_grid(epsilons)
    unit = 0.0
    for e, Rg, a, b in _by_eps(g["eps"], g["R"], g["v1"], g["v2"]):
        unit = max(unit, float(np.max(np.abs(finsler.fundamental_function(e, Rg, a, b) - 1.0))))
    worst_be, worst_ag = float(be.max()), float(agree.max())
    passed = worst_be < tol_b and worst_ag < tol_p and unit < tol_u
    value = max(worst_be / tol_b, worst_ag / tol_p, unit / tol_u) * tol_b
    return CheckResult(
        "4 radical formula",
        passed,
        value,
        tol_b,
        {"backward_error": worst_be, "polish_agreement": worst_ag, "indicatrix_unit": unit, "samples": n},
    )


@_timed
def check_sign_structure(n=10_000, seed=0, tolerances=None):
    """Coefficient signs, resolvent Vieta product and the excluded sign case."""
    tol_v = _tol(tolerances, "vieta")
    tol_c = _tol(tolerances, "conjugate_radical")
    rng = np.random.default_rng(seed + 1)
    eps, R, v1, v2 = geometric_samples(rng, n)
    bad_sign = 0
    worst_v, worst_c = 0.0, 0.0
    excluded = 0
    max_real_z = -math.inf
    for e, Rs, a, b in _by_eps(eps, R, v1, v2):
        qc = indicatrix.quartic_coefficients(e, Rs, a, b)
        bad_sign += int(np.sum(~((qc.A > 0) & (qc.C < 0) & (qc.E < 0))))
        dq = finsler.depress(qc)
        sol = polyroots.solve_resolvent(dq.alpha, dq.beta, dq.gamma)
        z = sol.roots
        prod = z[0] * z[1] * z[2]
        scale = np.maximum(np.abs(z[0]) * np.abs(z[1]) * np.abs(z[2]), dq.beta**2)
        worst_v = max(worst_v, float(np.max(np.abs(prod + dq.beta**2) / scale)))
        real = np.asarray(sol.calB) <= 0
        zr = z.real[:, real]
        if zr.size:
            npos = np.sum(zr > 0, axis=0)
            excluded += int(np.sum(npos == 2))
            max_real_z = max(max_real_z, float((zr / np.maximum(np.abs(zr).max(0), 1e-300)).max()))
        cx = ~real
        if np.any(cx):
            w2, w3 = -z[1][cx], -z[2][cx]
            direct = (np.sqrt(w2) + np.sqrt(w3)).real
            comb = polyroots.combine_conjugate_sqrts(w2.real, w2.imag)
            worst_c = max(worst_c, float(np.max(np.abs(direct - comb) / np.maximum(1.0, np.abs(comb)))))
    passed = bad_sign == 0 and excluded == 0 and worst_v < tol_v and worst_c < tol_c
    return CheckResult(
        "5 sign structure",
        passed,
        worst_v,
        tol_v,
        {
            "coefficient_sign_violations": bad_sign,
            "excluded_case_hits": excluded,
            "max_real_resolvent_root_relative": max_real_z,
            "conjugate_radical_error": worst_c,
            "samples": n,
        },
    )


@_timed
def check_finsler_axioms(n=1000, seed=0, epsilons=DEFAULT_EPSILONS["grid"], tolerances=None):
    """Positive homogeneity and positive-definite fiber Hessian."""
    tol = _tol(tolerances, "homogeneity")
    rng = np.random.default_rng(seed + 2)
    eps, R, v1, v2 = geometric_samples(rng, n)
    worst = 0.0
    for lam in (1e-3, 0.5, 2.0, 1e3):
        for e, Rs, a, b in _by_eps(eps, R, v1, v2):
            worst = max(worst, float(np.max(finsler.homogeneity_defect(e, Rs, a, b, lam))))
    g = indicatrix_grid(epsilons)
    min_eig, rel_margin = math.inf, math.inf
    for e, Rg, a, b in _by_eps(g["eps"], g["R"], g["v1"], g["v2"]):
        H = finsler.hessian(e, Rg, a, b, check=False)
        eig = np.linalg.eigvalsh(H)
        min_eig = min(min_eig, float(eig[:, 0].min()))
        rel_margin = min(rel_margin, float((eig[:, 0] / eig[:, 1]).min()))
    return CheckResult(
        "6 finsler axioms",
        worst < tol and min_eig > 0,
        worst,
        tol,
        {"min_hessian_eigenvalue": min_eig, "min_eigenvalue_ratio": rel_margin, "grid_points": len(g["v1"])},
    )


def curvature_samples(rng, n, R_max=CURVATURE_R_MAX):
    R = rng.uniform(-R_max, R_max, n)
    theta = rng.uniform(0.0, 2 * math.pi, n)
    phi = rng.uniform(0.0, 2 * math.pi, n)
    return R, theta, np.cos(phi), np.sin(phi)


@_timed
def check_flag_curvature(epsilons=DEFAULT_EPSILONS["curvature"], n=200, seed=0, tolerances=None):
    """``|K - 1|`` at random base points and directions."""
    tol = _tol(tolerances, "flag_curvature")
    rng = np.random.default_rng(seed + 3)
    worst, per_eps = 0.0, {}
    for eps in epsilons:
        R, th, v1, v2 = curvature_samples(rng, n)
        K = finsler.flag_curvature(eps, R, th, v1, v2)
        dev = float(np.max(np.abs(K - 1.0)))
        per_eps[str(eps)] = dev
        worst = max(worst, dev)
    return CheckResult(
        "7 flag curvature", worst < tol, worst, tol, {"per_epsilon": per_eps, "samples_per_epsilon": n}
    )


def geodesic_initial_states(surface, rng, count, min_sin_heading=0.2):
    """Random unit states that are neither meridians nor close to them."""
    inits = []
    while len(inits) < count:
        r = rng.uniform(0.2, math.pi - 0.2)
        heading = rng.uniform(0.0, 2 * math.pi)
        if abs(math.sin(heading)) < min_sin_heading:
            continue
        inits.append(zoll.unit_state(surface, r, rng.uniform(0.0, 2 * math.pi), heading))
    return inits


def geodesic_report(eps, inits, length=2 * math.pi, step=1e-3):
    """Closure defects at ``length`` and first-return lengths of a batch."""
    surface = zoll.ZollSurface(zoll.HParam(eps))
    extra = 0.2
    ys, _ = zoll.integrate_geodesics(surface, inits, length + extra, step)
    s = step * np.arange(len(ys))
    at_len, _ = zoll.integrate_geodesics(surface, inits, length, step)
    closure = zoll.state_distance(at_len[-1], at_len[0])
    returns = np.array([zoll.first_return_length(ys[:, k, :], s) for k in range(len(inits))])
    return closure, returns


@_timed
def check_zoll_closure(epsilons=DEFAULT_EPSILONS["geodesics"], count=20, seed=0, tolerances=None):
    """Random geodesics close up after length ``2 pi``."""
    tol_c = _tol(tolerances, "closure")
    tol_r = _tol(tolerances, "return_length")
    rng = np.random.default_rng(seed + 4)
    worst_c, worst_r = 0.0, 0.0
    for eps in epsilons:
        surface = zoll.ZollSurface(zoll.HParam(eps))
        inits = geodesic_initial_states(surface, rng, count)
        closure, returns = geodesic_report(eps, inits)
        worst_c = max(worst_c, float(closure.max()))
        dev = np.abs(returns - 2 * math.pi)
        worst_r = max(worst_r, float(np.nanmax(dev)) if not np.all(np.isnan(dev)) else math.inf)
        if np.any(np.isnan(dev)):
            worst_r = math.inf
    return CheckResult(
        "8 zoll closure",
        worst_c < tol_c and worst_r < tol_r,
        worst_c,
        tol_c,
        {"return_length_deviation": worst_r, "geodesics_per_epsilon": count},
    )


@_timed
def check_round_limit(n=1000, seed=0, tolerances=None):
    """Near ``eps = 0`` the metric is ``sqrt(v1^2 + v2^2 cos^2 R)``."""
    tol = _tol(tolerances, "round_limit")
    rng = np.random.default_rng(seed + 5)
    eps = 1e-9
    _, R, v1, v2 = geometric_samples(rng, n)
    F = finsler.fundamental_function(eps, R, v1, v2)
    worst = float(np.max(np.abs(F - np.sqrt(v1**2 + (v2 * np.cos(R)) ** 2))))
    ellipse = 0.0
    for Rg in R_grid(20):
        _, a, b = indicatrix.indicatrix_curve(eps, Rg, 50)
        ellipse = max(ellipse, float(np.max(np.abs(a**2 + (b * math.cos(Rg)) ** 2 - 1.0))))
    return CheckResult(
        "9 round-sphere limit",
        worst < tol and ellipse < tol,
        worst,
        tol,
        {"ellipse_defect": ellipse, "samples": n},
    )


@_timed
def check_quartic_solver(n=10_000, seed=0, tolerances=None):
    """Known-root recovery and backward error on random coefficients."""
    tol_r = _tol(tolerances, "quartic_roots")
    tol_b = _tol(tolerances, "quartic_residual")
    rng = np.random.default_rng(seed + 6)
    roots = np.sort(rng.uniform(-5.0, 5.0, (4, n)), axis=0)
    # monic coefficients from Vieta, highest degree first
    e1 = roots.sum(0)
    e2 = sum(roots[i] * roots[j] for i in range(4) for j in range(i + 1, 4))
    e3 = sum(roots[i] * roots[j] * roots[k] for i in range(4) for j in range(i + 1, 4) for k in range(j + 1, 4))
    e4 = roots.prod(0)
    found = polyroots.solve_quartic(np.ones(n), -e1, e2, -e3, e4)
    found_sorted = np.sort(found.real, axis=0)
    worst_r = float(np.max(np.abs(found_sorted - roots)))
    worst_im = float(np.max(np.abs(found.imag)))
    c = rng.uniform(-1e3, 1e3, (5, n))
    X = polyroots.solve_quartic(*c)
    worst_b = float(np.max(polyroots.backward_error(tuple(c), X)))
    return CheckResult(
        "10 quartic solver",
        worst_r < tol_r and worst_b < tol_b,
        worst_r,
        tol_r,
        {"max_imaginary_part": worst_im, "random_backward_error": worst_b, "samples": n},
    )


CHECKS = {
    "gauss": check_gauss_curvature,
    "implicit": check_implicit_identity,
    "integral": check_integral_identity,
    "radical": check_radical_formula,
    "signs": check_sign_structure,
    "axioms": check_finsler_axioms,
    "curvature": check_flag_curvature,
    "zoll": check_zoll_closure,
    "round": check_round_limit,
    "quartic": check_quartic_solver,
}


def run_suite(epsilon=None, seed=0, tolerances=None, only=None):
    """Run the criteria in order.

    With ``epsilon`` the per-epsilon criteria (1, 2, 3, 6, 7, 8) use that value
    alone; random sampling is seeded by ``seed``.
    """
    eps_sets = dict(DEFAULT_EPSILONS)
    if epsilon is not None:
        eps_sets = {k: (float(epsilon),) for k in eps_sets}
    calls = {
        "gauss": lambda: check_gauss_curvature(eps_sets["gauss"], tolerances=tolerances),
        "implicit": lambda: check_implicit_identity(eps_sets["grid"], tolerances=tolerances),
        "integral": lambda: check_integral_identity(eps_sets["grid"], tolerances=tolerances),
        "radical": lambda: check_radical_formula(seed=seed, epsilons=eps_sets["grid"], tolerances=tolerances),
        "signs": lambda: check_sign_structure(seed=seed, tolerances=tolerances),
        "axioms": lambda: check_finsler_axioms(seed=seed, epsilons=eps_sets["grid"], tolerances=tolerances),
        "curvature": lambda: check_flag_curvature(eps_sets["curvature"], seed=seed, tolerances=tolerances),
        "zoll": lambda: check_zoll_closure(eps_sets["geodesics"], seed=seed, tolerances=tolerances),
        "round": lambda: check_round_limit(seed=seed, tolerances=tolerances),
        "quartic": lambda: check_quartic_solver(seed=seed, tolerances=tolerances),
    }
    names = only or list(calls)
    unknown = set(names) - set(calls)
    if unknown:
        raise ValueError(f"unknown checks: {sorted(unknown)}")
    return [calls[k]() for k in names]
