"""Command-line driver.

Exit codes: 0 when every check passes, 1 on a check failure, 2 on a usage or
configuration error.  A JSON file given by ``--config`` supplies defaults for
any flag (keys are flag names with ``-`` replaced by ``_``); explicit flags
win.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import checks, finsler, indicatrix, zoll

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

_DEFAULTS = {
    "epsilon": 0.25,
    "R": 0.0,
    "v1": 0.0,
    "v2": 1.0,
    "grid_R": "-1.2:1.2:5",
    "grid_r": None,
    "tol": [],
    "seed": 0,
    "out": None,
    "format": "csv",
    "count": 20,
    "length": 2 * math.pi,
    "step": 1e-3,
    "points": 201,
    "samples": 50,
    "only": None,
}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    epsilon: float
    R_grid: tuple
    r_grid: tuple | None
    tolerances: dict
    output_dir: Path | None
    format: str
    seed: int = 0
    epsilon_explicit: bool = False
    extra: dict = field(default_factory=dict)

    def R_values(self):
        lo, hi, n = self.R_grid
        return np.linspace(lo, hi, n)


def parse_grid(text, name):
    try:
        lo, hi, n = text.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except (AttributeError, ValueError):
        raise UsageError(f"{name} must look like min:max:n, got {text!r}") from None
    if n < 1:
        raise UsageError(f"{name} is empty")
    if n > 1 and not lo < hi:
        raise UsageError(f"{name} needs min < max")
    return lo, hi, n


def parse_tolerances(items):
    out = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep or key not in checks.DEFAULT_TOLERANCES:
            known = ", ".join(sorted(checks.DEFAULT_TOLERANCES))
            raise UsageError(f"bad --tol {item!r}; known names: {known}")
        try:
            tol = float(value)
        except ValueError:
            raise UsageError(f"bad tolerance value in {item!r}") from None
        if not tol > 0:
            raise UsageError(f"tolerance {key} must be positive")
        out[key] = tol
    return out


def build_config(args) -> RunConfig:
    merged = dict(_DEFAULTS)
    file_cfg = {}
    if args.config:
        try:
            file_cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(file_cfg, dict):
            raise UsageError("config file must hold a JSON object")
        unknown = set(file_cfg) - set(_DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        if isinstance(file_cfg.get("tol"), dict):
            file_cfg["tol"] = [f"{k}={v}" for k, v in file_cfg["tol"].items()]
        merged.update(file_cfg)
    given = {k: v for k, v in vars(args).items() if k in _DEFAULTS and v is not None}
    merged.update(given)

    eps = float(merged["epsilon"])
    if not 0.0 < eps < 0.5:
        raise UsageError(f"epsilon must lie in (0, 1/2), got {eps}")
    R_grid = parse_grid(merged["grid_R"], "--grid-R")
    limit = math.pi / 2 - indicatrix.CHART_MARGIN
    if max(abs(R_grid[0]), abs(R_grid[1])) > limit:
        raise UsageError(f"--grid-R must stay inside |R| <= {limit:.6f}")
    r_grid = parse_grid(merged["grid_r"], "--grid-r") if merged["grid_r"] else None
    if r_grid and not (0.0 <= r_grid[0] and r_grid[1] <= math.pi):
        raise UsageError("--grid-r must stay inside [0, pi]")
    if merged["format"] not in ("csv", "json"):
        raise UsageError("--format must be csv or json")
    return RunConfig(
        epsilon=eps,
        R_grid=R_grid,
        r_grid=r_grid,
        tolerances=parse_tolerances(merged["tol"]),
        output_dir=Path(merged["out"]) if merged["out"] else None,
        format=merged["format"],
        seed=int(merged["seed"]),
        epsilon_explicit="epsilon" in given or "epsilon" in file_cfg,
        extra={k: merged[k] for k in ("R", "v1", "v2", "count", "length", "step", "points", "samples", "only")},
    )


# ---------------------------------------------------------------- output


def _clean(x):
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def dumps(obj):
    return json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n"


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def table_text(columns, rows, fmt):
    """CSV with round-trip floats, or a JSON list of records."""
    if fmt == "json":
        return dumps([dict(zip(columns, r)) for r in rows])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(v) for v in r])
    return buf.getvalue()


def _write(path: Path, text):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _out_dir(cfg, name):
    return cfg.output_dir or Path(f"zollfinsler-{name}")


# ---------------------------------------------------------------- commands


def cmd_eval(cfg: RunConfig, out=sys.stdout):
    eps = cfg.epsilon
    R, v1, v2 = (float(cfg.extra[k]) for k in ("R", "v1", "v2"))
    if v1 == 0 and v2 == 0:
        raise UsageError("(v1, v2) must be non-zero")
    try:
        ev = finsler.f_eval(eps, R, v1, v2)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    except finsler.FormulaBranchError as exc:
        out.write(dumps({"epsilon": eps, "R": R, "v1": v1, "v2": v2, "error": str(exc)}))
        return EXIT_FAIL
    try:
        H = finsler.hessian(eps, R, v1, v2, check=False)
        eigs = np.linalg.eigvalsh(H).tolist()
    except ValueError:
        eigs = None
    try:
        K = finsler.flag_curvature(eps, R, 0.0, v1, v2)
    except ValueError:
        K = None
    report = {
        "epsilon": eps,
        "R": R,
        "v1": v1,
        "v2": v2,
        "F": ev.F,
        "residual": ev.residual,
        "hessian_eigs": eigs,
        "K": K,
        "polished": ev.polished,
        "trusted": ev.trusted,
        "roots": ev.census.tag,
        "positive_roots": ev.census.n_positive,
    }
    text = dumps(report)
    out.write(text)
    if cfg.output_dir:
        _write(cfg.output_dir / "eval.json", text)
    residual_ok = ev.residual <= cfg.tolerances.get("backward", checks.DEFAULT_TOLERANCES["backward"])
    return EXIT_OK if residual_ok and ev.trusted else EXIT_FAIL


def _indicatrix_samples(cfg, R):
    if cfg.r_grid is None:
        return indicatrix.indicatrix_curve(cfg.epsilon, R)
    lo, hi, n = cfg.r_grid
    rc = float(indicatrix.turning_radius(R))
    r = np.linspace(lo, hi, n)
    r = r[(r >= rc) & (r <= math.pi - rc)]
    if r.size == 0:
        return r, r, r
    v1 = np.sqrt(indicatrix._excursion(R, r)) / math.cos(R)
    v2 = indicatrix.v2_closed_form(cfg.epsilon, R, r)
    return np.concatenate([r, r[::-1]]), np.concatenate([v1, -v1[::-1]]), np.concatenate([v2, v2[::-1]])


def cmd_indicatrix(cfg: RunConfig, out=sys.stdout):
    tol = cfg.tolerances.get("unit", checks.DEFAULT_TOLERANCES["unit"])
    outdir = _out_dir(cfg, "indicatrix")
    files = []
    worst_imp, worst_F = 0.0, 0.0
    for k, R in enumerate(cfg.R_values()):
        r, v1, v2 = _indicatrix_samples(cfg, float(R))
        imp = indicatrix.implicit_residual(cfg.epsilon, R, v1, v2) if r.size else r
        Fres = np.abs(finsler.fundamental_function(cfg.epsilon, R, v1, v2) - 1.0) if r.size else r
        m_imp = float(np.max(np.abs(imp))) if r.size else 0.0
        m_F = float(np.max(Fres)) if r.size else 0.0
        worst_imp, worst_F = max(worst_imp, m_imp), max(worst_F, m_F)
        name = f"indicatrix_{k:03d}.{cfg.format}"
        rows = list(zip(r, v1, v2, imp, Fres))
        _write(outdir / name, table_text(["r", "v1", "v2", "implicit_residual", "F_residual"], rows, cfg.format))
        files.append({"file": name, "R": float(R), "points": int(r.size), "max_implicit_residual": m_imp, "max_F_residual": m_F})
    passed = worst_imp < tol and worst_F < tol
    summary = {
        "epsilon": cfg.epsilon,
        "grid_R": list(cfg.R_grid),
        "grid_r": list(cfg.r_grid) if cfg.r_grid else None,
        "files": files,
        "max_implicit_residual": worst_imp,
        "max_F_residual": worst_F,
        "tolerance": tol,
        "passed": passed,
    }
    _write(outdir / "summary.json", dumps(summary))
    out.write(f"wrote {len(files)} curves to {outdir}; max residuals {worst_imp:.3e} (implicit), {worst_F:.3e} (F)\n")
    return EXIT_OK if passed else EXIT_FAIL


def cmd_verify(cfg: RunConfig, out=sys.stdout):
    only = cfg.extra.get("only")
    names = [s.strip() for s in only.split(",")] if only else None
    try:
        results = checks.run_suite(
            epsilon=cfg.epsilon if cfg.epsilon_explicit else None,
            seed=cfg.seed,
            tolerances=cfg.tolerances,
            only=names,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    for res in results:
        out.write(res.line() + "\n")
    passed = all(r.passed for r in results)
    report = {
        "passed": passed,
        "seed": cfg.seed,
        "epsilon": cfg.epsilon if cfg.epsilon_explicit else None,
        # timings would break byte-identical reruns
        "checks": [{k: v for k, v in r.to_dict().items() if k != "seconds"} for r in results],
    }
    if cfg.output_dir:
        _write(cfg.output_dir / "verify.json", dumps(report))
    return EXIT_OK if passed else EXIT_FAIL


def cmd_geodesics(cfg: RunConfig, out=sys.stdout):
    count = int(cfg.extra["count"])
    length = float(cfg.extra["length"])
    step = float(cfg.extra["step"])
    if count < 1:
        raise UsageError("--count must be at least 1")
    if not (math.isfinite(length) and length > 0):
        raise UsageError("--length must be positive")
    if not 0 < step <= 1e-2:
        raise UsageError("--step must lie in (0, 1e-2]")
    tol = cfg.tolerances.get("closure", checks.DEFAULT_TOLERANCES["closure"])
    periods = length / (2 * math.pi)
    informational = abs(periods - round(periods)) > 1e-9 or round(periods) == 0

    surface = zoll.ZollSurface(zoll.HParam(cfg.epsilon))
    rng = np.random.default_rng(cfg.seed)
    inits = [zoll.unit_state(surface, math.pi / 2, 0.0, math.pi / 2)]
    inits += checks.geodesic_initial_states(surface, rng, count)
    outdir = _out_dir(cfg, "geodesics")
    rows, failures = [], 0
    for k, init in enumerate(inits):
        name = f"geodesic_{k:03d}.{cfg.format}"
        try:
            traj = zoll.integrate_geodesic(surface, init, length, step)
        except (ValueError, ArithmeticError) as exc:
            rows.append((k, init.r, init.theta, init.r_dot, init.theta_dot, math.nan, "error: " + str(exc), ""))
            failures += 1
            continue
        _write(
            outdir / name,
            table_text(["s", "r", "theta", "r_dot", "theta_dot"], list(zip(traj.s, traj.r, traj.theta, traj.r_dot, traj.theta_dot)), cfg.format),
        )
        defect = zoll.closure_defect(traj)
        if informational:
            status = "informational"
        elif defect < tol:
            status = "closed"
        else:
            status = "open"
            failures += 1
        rows.append((k, init.r, init.theta, init.r_dot, init.theta_dot, defect, status, name))
    cols = ["index", "r0", "theta0", "r_dot0", "theta_dot0", "closure_defect", "status", "file"]
    _write(outdir / f"closure.{cfg.format}", table_text(cols, rows, cfg.format))
    worst = max((r[5] for r in rows if not math.isnan(r[5])), default=math.nan)
    mode = " (informational: length is not a multiple of 2 pi)" if informational else ""
    out.write(f"{len(rows)} geodesics, worst closure defect {worst:.3e}{mode}\n")
    if informational:
        return EXIT_OK
    return EXIT_OK if failures == 0 else EXIT_FAIL


def cmd_curvature_scan(cfg: RunConfig, out=sys.stdout):
    n_x = int(cfg.extra["points"])
    n_s = int(cfg.extra["samples"])
    if n_x < 2 or n_s < 1:
        raise UsageError("--points must be >= 2 and --samples >= 1")
    tol = cfg.tolerances.get("flag_curvature", checks.DEFAULT_TOLERANCES["flag_curvature"])
    outdir = _out_dir(cfg, "curvature")
    p = zoll.HParam(cfg.epsilon)
    x = np.linspace(-1.0, 1.0, n_x)
    G = zoll.gauss_curvature(p, x)
    _write(outdir / f"gauss.{cfg.format}", table_text(["x", "G"], list(zip(x, G)), cfg.format))

    lo, hi, _ = cfg.R_grid
    rng = np.random.default_rng(cfg.seed)
    R = rng.uniform(lo, hi, n_s)
    theta = rng.uniform(0.0, 2 * math.pi, n_s)
    phi = rng.uniform(0.0, 2 * math.pi, n_s)
    v1, v2 = np.cos(phi), np.sin(phi)
    try:
        K, err = finsler.flag_curvature(cfg.epsilon, R, theta, v1, v2, return_error=True)
    except ValueError as exc:
        raise UsageError(f"{exc}; narrow --grid-R") from None
    dev = np.abs(K - 1.0)
    _write(
        outdir / f"flag_curvature.{cfg.format}",
        table_text(["R", "theta", "v1", "v2", "K", "abs_K_minus_1", "error_estimate"], list(zip(R, theta, v1, v2, K, dev, err)), cfg.format),
    )
    summary = {"epsilon": cfg.epsilon, "min_G": float(G.min()), "max_abs_K_minus_1": float(dev.max()), "tolerance": tol, "samples": n_s}
    _write(outdir / "summary.json", dumps(summary))
    out.write(f"min G = {G.min():.6g}; max |K - 1| = {dev.max():.3e} over {n_s} samples\n")
    return EXIT_OK if G.min() > 0 and dev.max() < tol else EXIT_FAIL


COMMANDS = {
    "eval": cmd_eval,
    "indicatrix": cmd_indicatrix,
    "verify": cmd_verify,
    "geodesics": cmd_geodesics,
    "curvature-scan": cmd_curvature_scan,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with default flag values")
    common.add_argument("--epsilon", type=float, help="deformation parameter in (0, 1/2)")
    common.add_argument("--R", type=float, help="base point R for eval")
    common.add_argument("--v1", type=float)
    common.add_argument("--v2", type=float)
    common.add_argument("--grid-R", dest="grid_R", help="min:max:n")
    common.add_argument("--grid-r", dest="grid_r", help="min:max:n, clipped to each curve's r-range")
    common.add_argument("--tol", action="append", metavar="NAME=VALUE", help="override a check tolerance")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output directory")
    common.add_argument("--format", choices=("csv", "json"))

    parser = _Parser(prog="zollfinsler", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("eval", parents=[common], help="evaluate F at one tangent vector")
    sub.add_parser("indicatrix", parents=[common], help="export unit curves over the R grid")
    v = sub.add_parser("verify", parents=[common], help="run the verification suite")
    v.add_argument("--only", help="comma-separated subset: " + ",".join(checks.CHECKS))
    g = sub.add_parser("geodesics", parents=[common], help="integrate geodesics and report closure")
    g.add_argument("--count", type=int)
    g.add_argument("--length", type=float)
    g.add_argument("--step", type=float)
    c = sub.add_parser("curvature-scan", parents=[common], help="tabulate G and |K - 1|")
    c.add_argument("--points", type=int, help="x-grid size for G")
    c.add_argument("--samples", type=int, help="random flag-curvature samples")
    return parser


def _join_grid_values(argv):
    # "--grid-R -1:1:5" would otherwise read as an unknown option
    argv = list(argv)
    out = []
    i = 0
    while i < len(argv):
        a = argv[i]
        if a in ("--grid-R", "--grid-r") and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def main(argv=None, out=None):
    out = out or sys.stdout
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = build_parser().parse_args(_join_grid_values(argv))
        cfg = build_config(args)
        return COMMANDS[args.command](cfg, out=out)
    except UsageError as exc:
        sys.stderr.write(f"zollfinsler: error: {exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        sys.stderr.write(f"zollfinsler: error: {exc}\n")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
