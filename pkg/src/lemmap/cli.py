"""Command line interface: solve, eval, grid, capacity, selftest.

A problem is a JSON file: {"curves": [...], "n": 64, "alphas": [...],
"tolerances": {...}, "start": {...}, "outputs": "dir"}.  Complex numbers
are {"re": ..., "im": ...} objects; floats are written back with 17
significant digits.  Exit codes: 0 success, 1 input error (nothing
written), 2 solver failure (diagnostics still written when available).
"""

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from .bie import assemble_boundary_data, default_alphas, solve_all_components, solve_exponents
from .cauchy import EvaluationRequest, evaluate_map
from .errors import GeometryError, SolverError, SpecError
from .geometry import discretize, make_curve
from .newton import LemniscaticDomain, MapSolution, newton_solve, nonlinear_residual

_DEFAULTS = {
    "gmres_tol": 1e-14,
    "newton_tol": 1e-12,
    "max_newton": 50,
    "s0": 1.1,
    "delta": 0.1,
}


@dataclass
class ProblemSpec:
    curves: list
    n: int
    alphas: list = None
    gmres_tol: float = _DEFAULTS["gmres_tol"]
    newton_tol: float = _DEFAULTS["newton_tol"]
    max_newton: int = _DEFAULTS["max_newton"]
    s0: float = _DEFAULTS["s0"]
    delta: float = _DEFAULTS["delta"]
    outputs: str = "."


@dataclass
class ResultBundle:
    params_path: str
    boundary_path: str
    diagnostics_path: str
    figure_paths: list = field(default_factory=list)
    solution: MapSolution = None


def _fmt(x):
    return float(f"{float(x):.17g}")


def _cplx(z):
    z = complex(z)
    return {"re": _fmt(z.real), "im": _fmt(z.imag)}


def _parse_complex(obj):
    if isinstance(obj, dict):
        return complex(float(obj.get("re", 0.0)), float(obj.get("im", 0.0)))
    if isinstance(obj, (list, tuple)) and len(obj) == 2:
        return complex(float(obj[0]), float(obj[1]))
    if isinstance(obj, (int, float)):
        return complex(obj)
    raise SpecError(f"cannot parse {obj!r} as a complex number")


def load_spec(path, overrides=None):
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SpecError(f"cannot read problem spec {path}: {exc}") from exc
    return parse_spec(raw, overrides)


def parse_spec(raw, overrides=None):
    overrides = overrides or {}
    if not isinstance(raw, dict):
        raise SpecError("problem spec must be a JSON object")
    curves = raw.get("curves")
    if not isinstance(curves, list) or len(curves) < 1:
        raise SpecError("spec needs a non-empty 'curves' list")
    n = int(overrides.get("n") or raw.get("n", 0))
    if n <= 0 or n % 2 != 0:
        raise SpecError("spec needs an even positive node count 'n'")
    alphas = raw.get("alphas")
    if alphas is not None:
        if len(alphas) != len(curves):
            raise SpecError("'alphas' must match the number of curves")
        alphas = [_parse_complex(a) for a in alphas]
    tol = raw.get("tolerances", {})
    start = raw.get("start", {})
    spec = ProblemSpec(
        curves=curves, n=n, alphas=alphas,
        gmres_tol=float(overrides.get("gmres_tol") or tol.get("gmres_tol", _DEFAULTS["gmres_tol"])),
        newton_tol=float(overrides.get("newton_tol") or tol.get("newton_tol", _DEFAULTS["newton_tol"])),
        max_newton=int(tol.get("max_newton", _DEFAULTS["max_newton"])),
        s0=float(overrides.get("s0") or start.get("s0", _DEFAULTS["s0"])),
        delta=float(overrides.get("delta") or start.get("delta", _DEFAULTS["delta"])),
        outputs=str(overrides.get("out") or raw.get("outputs", ".")),
    )
    return spec


def build_problem(spec):
    """Curves -> discretization -> auxiliary points.  Raises on bad input."""
    curves = [make_curve(d) for d in spec.curves]
    disc = discretize(curves, spec.n)
    if spec.alphas is None:
        alphas = default_alphas(disc)
    else:
        alphas = np.asarray(spec.alphas, dtype=complex)
    return disc, alphas


def run_solve(spec, render=True):
    """Full pipeline; writes params.json, boundary.csv, diagnostics.json and,
    unless disabled, the overview figures."""
    disc, alphas = build_problem(spec)
    components, h_matrix = solve_all_components(disc, alphas, tol=spec.gmres_tol)
    params = solve_exponents(h_matrix)
    data = assemble_boundary_data(disc, alphas, components, params)
    outdir = spec.outputs
    os.makedirs(outdir, exist_ok=True)
    try:
        solution = newton_solve(disc, data, tol=spec.newton_tol,
                                max_iter=spec.max_newton, s0=spec.s0, delta=spec.delta)
    except SolverError as exc:
        diag_path = os.path.join(outdir, "diagnostics.json")
        payload = {"error": str(exc), "stage": "newton"}
        payload.update({k: _jsonable(v) for k, v in exc.diagnostics.items()})
        with open(diag_path, "w") as fh:
            json.dump(payload, fh, indent=1)
        raise

    solution.diagnostics["gmres_iterations"] = [c.gmres_iters for c in components]
    solution.diagnostics["gmres_relres"] = [float(c.gmres_relres) for c in components]
    solution.diagnostics["gmres_fallback"] = [bool(c.fallback) for c in components]
    solution.diagnostics["h_spread"] = [float(c.h_spread) for c in components]
    solution.diagnostics["mu"] = [float(v) for v in data.mu]

    params_path = os.path.join(outdir, "params.json")
    boundary_path = os.path.join(outdir, "boundary.csv")
    diag_path = os.path.join(outdir, "diagnostics.json")
    with open(params_path, "w") as fh:
        json.dump({
            "ell": disc.ell,
            "n": disc.n,
            "curves": spec.curves,
            "a": [_cplx(z) for z in solution.domain.centers],
            "m": [_fmt(v) for v in solution.domain.exponents],
            "log_tau": _fmt(data.params.log_tau),
            "tau": _fmt(solution.domain.capacity),
            "alphas": [_cplx(z) for z in data.alphas],
            "diagnostics": _jsonable(solution.diagnostics),
        }, fh, indent=1)
    with open(boundary_path, "w", newline="\n") as fh:
        fh.write("t,re_eta,im_eta,re_phi,im_phi,component\n")
        for i in range(disc.size):
            fh.write("%.17g,%.17g,%.17g,%.17g,%.17g,%d\n" % (
                disc.t[i], disc.eta[i].real, disc.eta[i].imag,
                solution.boundary_w[i].real, solution.boundary_w[i].imag,
                disc.component_of[i]))
    with open(diag_path, "w") as fh:
        json.dump(_jsonable(solution.diagnostics), fh, indent=1)

    figures = []
    if render:
        from . import report
        figures = report.render_solution(disc, data, solution, outdir)
    return ResultBundle(params_path=params_path, boundary_path=boundary_path,
                        diagnostics_path=diag_path, figure_paths=figures,
                        solution=solution)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return _fmt(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, complex):
        return _cplx(obj)
    return obj


def load_bundle(bundle_dir):
    """Rebuild (disc, data, solution) from a written bundle."""
    params_path = os.path.join(bundle_dir, "params.json")
    boundary_path = os.path.join(bundle_dir, "boundary.csv")
    try:
        with open(params_path) as fh:
            params = json.load(fh)
        rows = np.loadtxt(boundary_path, delimiter=",", skiprows=1)
    except OSError as exc:
        raise SpecError(f"cannot read bundle in {bundle_dir}: {exc}") from exc
    curves = [make_curve(d) for d in params["curves"]]
    disc = discretize(curves, int(params["n"]))
    w = rows[:, 3] + 1j * rows[:, 4]
    a = np.array([_parse_complex(z) for z in params["a"]])
    m = np.array([float(v) for v in params["m"]])
    log_tau = float(params["log_tau"])
    alphas = np.array([_parse_complex(z) for z in params["alphas"]])
    domain = LemniscaticDomain(centers=a, exponents=m, capacity=float(np.exp(log_tau)))
    solution = MapSolution(boundary_w=w, domain=domain,
                           diagnostics=params.get("diagnostics", {}))

    from .bie import BoundaryData, CanonicalParameters, point_charge_potential
    mu = np.array([float(v) for v in params["diagnostics"]["mu"]])
    gamma = np.zeros(disc.size)
    for j in range(disc.ell):
        gamma += m[j] * point_charge_potential(disc, alphas[j])
    canon = CanonicalParameters(m=m, log_tau=log_tau)
    data = BoundaryData(p=log_tau + gamma + 1j * mu, gamma=gamma, mu=mu,
                        alphas=alphas, params=canon)
    return disc, data, solution


def bundle_residual(bundle_dir):
    """Recompute the nonlinear residual from the serialized bundle."""
    disc, data, solution = load_bundle(bundle_dir)
    state = type("S", (), {})()
    state.w = solution.boundary_w
    state.a = solution.domain.centers
    return float(np.max(np.abs(nonlinear_residual(state, data, disc))))


def _read_points(path):
    pts = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            parts = line.replace(";", ",").split(",")
            try:
                pts.append(complex(float(parts[0]), float(parts[1])))
            except (ValueError, IndexError):
                if pts:
                    raise SpecError(f"malformed point row: {line!r}")
                continue  # header line
    if not pts:
        raise SpecError(f"no points found in {path}")
    return np.array(pts)


def run_eval(bundle_dir, points_path, out_path=None, policy="auto"):
    disc, data, solution = load_bundle(bundle_dir)
    points = _read_points(points_path)
    values = evaluate_map(solution, disc,
                          EvaluationRequest(points=points, near_boundary_policy=policy))
    lines = ["re,im,re_phi,im_phi,status"]
    for z, v in zip(points, values):
        if np.isnan(v.real) or np.isnan(v.imag):
            lines.append("%.17g,%.17g,nan,nan,outside-domain" % (z.real, z.imag))
        else:
            lines.append("%.17g,%.17g,%.17g,%.17g,ok" % (z.real, z.imag, v.real, v.imag))
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w", newline="\n") as fh:
            fh.write(text)
    return text


def run_grid(bundle_dir, plane="w", bounds=None, nx=200, ny=200, out_path=None):
    """Sample |prod_j (w - a_j)^{m_j}| on a lattice.

    plane "w": lattice in the image plane (the capacity level line is the
    boundary of the canonical domain).  plane "z": lattice in the original
    plane, mapping each point first; points inside holes give nan.
    """
    disc, data, solution = load_bundle(bundle_dir)
    domain = solution.domain
    if bounds is None:
        pts = solution.boundary_w if plane == "w" else disc.eta
        span = max(pts.real.max() - pts.real.min(), pts.imag.max() - pts.imag.min())
        pad = 0.35 * span
        bounds = (pts.real.min() - pad, pts.real.max() + pad,
                  pts.imag.min() - pad, pts.imag.max() + pad)
    xs = np.linspace(bounds[0], bounds[1], nx)
    ys = np.linspace(bounds[2], bounds[3], ny)
    X, Y = np.meshgrid(xs, ys)
    Z = (X + 1j * Y).ravel()
    if plane == "w":
        W = Z
    elif plane == "z":
        W = evaluate_map(solution, disc, EvaluationRequest(points=Z))
    else:
        raise SpecError(f"unknown plane {plane!r}")
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.log(np.abs(W[:, None] - domain.centers[None, :]))
        vals = np.exp(logs @ domain.exponents)
    lines = ["x,y,value"]
    for z, v in zip(Z, vals):
        lines.append("%.17g,%.17g,%.17g" % (z.real, z.imag, v))
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w", newline="\n") as fh:
            fh.write(text)
    return text


def run_capacity(spec, out_path=None):
    from .oracle import logarithmic_capacity
    disc, _ = build_problem(spec)
    result = logarithmic_capacity(disc)
    if out_path:
        with open(out_path, "w") as fh:
            json.dump({"capacity": _fmt(result.capacity),
                       "robin_constant": _fmt(result.robin_constant)}, fh, indent=1)
    return result


def main(argv=None):
    parser = argparse.ArgumentParser(prog="lemmap",
                                     description="conformal maps onto lemniscatic domains")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="run the full pipeline on a problem spec")
    p_solve.add_argument("spec")
    p_solve.add_argument("--n", type=int)
    p_solve.add_argument("--gmres-tol", type=float, dest="gmres_tol")
    p_solve.add_argument("--newton-tol", type=float, dest="newton_tol")
    p_solve.add_argument("--s0", type=float)
    p_solve.add_argument("--delta", type=float)
    p_solve.add_argument("--out")
    p_solve.add_argument("--no-plot", action="store_true")

    p_eval = sub.add_parser("eval", help="evaluate the map at points from a CSV file")
    p_eval.add_argument("--bundle", required=True)
    p_eval.add_argument("--points", required=True)
    p_eval.add_argument("--policy", default="auto",
                        choices=["auto", "plain", "normalized"])
    p_eval.add_argument("--out")

    p_grid = sub.add_parser("grid", help="sample the lemniscate level function on a lattice")
    p_grid.add_argument("--bundle", required=True)
    p_grid.add_argument("--plane", default="w", choices=["w", "z"])
    p_grid.add_argument("--xmin", type=float)
    p_grid.add_argument("--xmax", type=float)
    p_grid.add_argument("--ymin", type=float)
    p_grid.add_argument("--ymax", type=float)
    p_grid.add_argument("--nx", type=int, default=200)
    p_grid.add_argument("--ny", type=int, default=200)
    p_grid.add_argument("--out")

    p_cap = sub.add_parser("capacity", help="logarithmic capacity via the equilibrium measure")
    p_cap.add_argument("spec")
    p_cap.add_argument("--n", type=int)
    p_cap.add_argument("--out")

    sub.add_parser("selftest", help="run the built-in invariant checks")

    args = parser.parse_args(argv)

    try:
        if args.command == "solve":
            overrides = {k: getattr(args, k) for k in
                         ("n", "gmres_tol", "newton_tol", "s0", "delta", "out")}
            spec = load_spec(args.spec, overrides)
            bundle = run_solve(spec, render=not args.no_plot)
            print(f"wrote {bundle.params_path}")
            return 0
        if args.command == "eval":
            text = run_eval(args.bundle, args.points, args.out, args.policy)
            if not args.out:
                sys.stdout.write(text)
            return 0
        if args.command == "grid":
            bounds = None
            if args.xmin is not None:
                bounds = (args.xmin, args.xmax, args.ymin, args.ymax)
            text = run_grid(args.bundle, args.plane, bounds, args.nx, args.ny, args.out)
            if not args.out:
                sys.stdout.write(text)
            return 0
        if args.command == "capacity":
            spec = load_spec(args.spec, {"n": args.n})
            result = run_capacity(spec, args.out)
            print("%.17g" % result.capacity)
            return 0
        if args.command == "selftest":
            from .selftest import run_selftest
            return run_selftest()
    except (SpecError, GeometryError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 1
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
