"""Built-in invariant checks at small sizes; deterministic output."""

import numpy as np

from .bie import (assemble_boundary_data, default_alphas, solve_all_components,
                  solve_component, solve_exponents)
from .cauchy import EvaluationRequest, evaluate_map
from .errors import GeometryError
from .gallery import disk, two_disks
from .geometry import discretize, make_curve, winding_number
from .kernels import apply_neumann, apply_singular, periodic_conjugate
from .newton import newton_solve, nonlinear_residual, solve_linearized, initial_guess
from .oracle import dense_jacobian, identity_disk_solution, logarithmic_capacity


def _two_disk_disc(n=64):
    return discretize([make_curve(d) for d in two_disks(0.5)], n)


def _check_conjugation():
    t = np.arange(32) * (2 * np.pi / 32)
    err = max(
        np.max(np.abs(periodic_conjugate(np.cos(2 * t)) - np.sin(2 * t))),
        np.max(np.abs(periodic_conjugate(np.sin(3 * t)) + np.cos(3 * t))),
        np.max(np.abs(periodic_conjugate(np.ones(32)))))
    return err <= 1e-12, f"max error {err:.3e}"


def _check_indicators():
    disc = _two_disk_disc(128)
    worst = 0.0
    for j in range(2):
        e = disc.expand_piecewise(np.eye(2)[j])
        worst = max(worst,
                    np.max(np.abs(apply_neumann(disc, e) + e)),
                    np.max(np.abs(apply_singular(disc, e))))
    return worst <= 1e-8, f"max deviation {worst:.3e}"


def _check_analytic_identity():
    disc = _two_disk_disc(128)
    f = 1.0 / (disc.eta + 1.0)
    resid = (f.imag - apply_neumann(disc, f.imag)) + apply_singular(disc, f.real)
    err = np.max(np.abs(resid))
    return err <= 1e-10, f"residual {err:.3e}"


def _check_zero_h():
    disc = _two_disk_disc(64)
    f = 1.0 / (disc.eta - 1.0)
    comp = solve_component(disc, f.real)
    err = max(np.max(np.abs(comp.h)), np.max(np.abs(comp.mu - f.imag)))
    return err <= 1e-9, f"max error {err:.3e}"


def _check_single_circle_parameters():
    disc = discretize([make_curve(disk(0.0, 2.0))], 32)
    alphas = default_alphas(disc)
    comps, H = solve_all_components(disc, alphas)
    params = solve_exponents(H)
    err = max(abs(params.tau - 2.0), abs(params.m[0] - 1.0),
              float(np.max(np.abs(comps[0].mu))))
    return err <= 1e-12, f"max error {err:.3e}"


def _check_identity_pipeline():
    disc = discretize([make_curve(disk(0.0, 2.0))], 32)
    alphas = default_alphas(disc)
    comps, H = solve_all_components(disc, alphas)
    params = solve_exponents(H)
    data = assemble_boundary_data(disc, alphas, comps, params)
    sol = newton_solve(disc, data)
    err = max(np.max(np.abs(sol.boundary_w - disc.eta)),
              np.max(np.abs(sol.domain.centers)), abs(sol.domain.capacity - 2.0))
    return err <= 1e-10, f"max error {err:.3e}"


def _check_capacity_circle():
    disc = discretize([make_curve(disk(0.0, 0.75))], 64)
    cap = logarithmic_capacity(disc)
    err = abs(cap.capacity - 0.75)
    return err <= 1e-10, f"error {err:.3e}"


def _check_winding():
    t = np.arange(128) * (2 * np.pi / 128)
    cw = np.exp(-1j * t)
    ok = (winding_number(cw, 0.0) == -1 and winding_number(cw, 3.0) == 0
          and winding_number(np.conj(cw), 0.0) == 1)
    return ok, "clockwise -1, outside 0, counterclockwise +1"


def _check_odd_n_rejected():
    try:
        discretize([make_curve(disk(0.0, 1.0))], 33)
    except GeometryError:
        return True, "odd n raises the geometry precondition"
    return False, "odd n was accepted"


def _check_schur_vs_dense():
    rng = np.random.default_rng(11)
    disc = _two_disk_disc(16)
    alphas = default_alphas(disc)
    comps, H = solve_all_components(disc, alphas)
    params = solve_exponents(H)
    data = assemble_boundary_data(disc, alphas, comps, params)
    st = initial_guess(disc)
    st.w = st.w + 0.03 * (rng.standard_normal(32) + 1j * rng.standard_normal(32))
    F = nonlinear_residual(st, data, disc)
    step, _, _ = solve_linearized(st, F, params, disc)
    dense = np.linalg.solve(dense_jacobian(st, params, disc), F)
    err = np.linalg.norm(step - dense) / np.linalg.norm(dense)
    return err <= 1e-10, f"relative difference {err:.3e}"


def _check_interior_identity():
    disc, sol = identity_disk_solution(2.0, 0.0, 32)
    v = evaluate_map(sol, disc, EvaluationRequest(points=np.array([5.0 + 0j])))
    err = abs(v[0] - 5.0)
    return err <= 1e-12, f"error {err:.3e}"


_CHECKS = [
    ("conjugation multiplier", _check_conjugation),
    ("indicator identities", _check_indicators),
    ("analytic boundary identity", _check_analytic_identity),
    ("zero-h uniqueness", _check_zero_h),
    ("single circle parameters", _check_single_circle_parameters),
    ("identity pipeline", _check_identity_pipeline),
    ("capacity of a circle", _check_capacity_circle),
    ("winding numbers", _check_winding),
    ("odd n rejected", _check_odd_n_rejected),
    ("schur step vs dense solve", _check_schur_vs_dense),
    ("interior evaluation identity", _check_interior_identity),
]


def run_selftest(write=None):
    """Run every check; print one PASS/FAIL line each; return 0 iff all pass."""
    write = write or (lambda s: print(s))
    failures = 0
    for name, check in _CHECKS:
        try:
            ok, detail = check()
        except Exception as exc:  # a crash is a failure, reported not raised
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        if not ok:
            failures += 1
        write("%s %-28s %s" % ("PASS" if ok else "FAIL", name, detail))
    write("%d/%d checks passed" % (len(_CHECKS) - failures, len(_CHECKS)))
    return 0 if failures == 0 else 1
