import numpy as np
import pytest

import lemmap as lm
from lemmap.bie import (assemble_boundary_data, default_alphas, gmres,
                        point_charge_potential, solve_all_components,
                        solve_component, solve_exponents)
from lemmap.errors import GeometryError, SolverError
from lemmap.geometry import discretize, make_curve


def _circle_disc(radius=2.0, n=64):
    return discretize([make_curve(lm.gallery.disk(0.0, radius))], n)


def test_point_charge_potential_circle():
    disc = _circle_disc(radius=0.5)
    g = point_charge_potential(disc, 0.0)
    assert np.allclose(g, -np.log(0.5))
    unit = _circle_disc(radius=1.0)
    assert np.max(np.abs(point_charge_potential(unit, 0.0))) <= 1e-14


def test_point_charge_potential_singularity_guard():
    disc = _circle_disc(radius=1.0)
    with pytest.raises(GeometryError):
        point_charge_potential(disc, disc.eta[5] + 1e-15)


def test_alpha_validation():
    disc = _circle_disc(radius=1.0)
    with pytest.raises(GeometryError):
        lm.bie.validate_alpha(disc, 0, 5.0)


def test_solve_component_constant_data():
    disc = _circle_disc(radius=2.0, n=64)
    gamma = point_charge_potential(disc, 0.0)
    comp = solve_component(disc, gamma)
    assert np.max(np.abs(comp.mu)) <= 1e-12
    assert comp.h[0] == pytest.approx(np.log(2.0), abs=1e-12)
    assert comp.h_spread <= 1e-12


def test_solve_component_zero_data_exact():
    disc = _circle_disc()
    comp = solve_component(disc, np.zeros(disc.size))
    assert np.all(comp.mu == 0.0)
    assert np.all(comp.h == 0.0)
    assert comp.gmres_iters == 0


def test_solve_component_tolerance_validation():
    disc = _circle_disc()
    with pytest.raises(SolverError):
        solve_component(disc, np.ones(disc.size), tol=1e-3)


def test_zero_h_property():
    disc = discretize([make_curve(d) for d in lm.gallery.two_disks(0.5)], 128)
    f = 1.0 / (disc.eta - 1.0)
    comp = solve_component(disc, f.real)
    assert np.max(np.abs(comp.h)) <= 1e-9
    assert np.max(np.abs(comp.mu - f.imag)) <= 1e-9


def test_pointwise_h_near_constant_on_smooth_domain():
    disc = discretize([make_curve(d) for d in lm.gallery.two_disks(0.5)], 64)
    comps, _ = solve_all_components(disc, default_alphas(disc))
    assert max(c.h_spread for c in comps) <= 1e-8


def test_analytic_riemann_hilbert_identity():
    disc = discretize([make_curve(d) for d in lm.gallery.two_disks(0.5)], 128)
    f = 1.0 / (disc.eta + 1.0)
    resid = (f.imag - lm.apply_neumann(disc, f.imag)) + lm.apply_singular(disc, f.real)
    assert np.max(np.abs(resid)) <= 1e-10


def test_solve_exponents_single():
    params = solve_exponents([[np.log(0.75)]])
    assert params.m[0] == pytest.approx(1.0)
    assert params.tau == pytest.approx(0.75)


def test_solve_exponents_symmetric_two_disk():
    disc = discretize([make_curve(d) for d in lm.gallery.two_disks(0.5)], 64)
    comps, H = solve_all_components(disc, default_alphas(disc))
    params = solve_exponents(H)
    assert np.max(np.abs(params.m - 0.5)) <= 1e-12
    # row consistency: every row reproduces log tau
    assert np.max(np.abs(H @ params.m - params.log_tau)) <= 1e-10


def test_solve_exponents_rejects_singular():
    with pytest.raises(SolverError):
        solve_exponents(np.zeros((2, 2)))


def test_tau_matches_capacity_oracle():
    curves = [make_curve(d) for d in lm.gallery.two_disks(0.5)]
    disc = discretize(curves, 64)
    comps, H = solve_all_components(disc, default_alphas(disc))
    params = solve_exponents(H)
    cap = lm.logarithmic_capacity(discretize(curves, 128))
    assert abs(params.tau - cap.capacity) <= 1e-8


def test_assemble_boundary_data_identity_case():
    disc = _circle_disc(radius=2.0)
    alphas = default_alphas(disc)
    comps, H = solve_all_components(disc, alphas)
    params = solve_exponents(H)
    data = assemble_boundary_data(disc, alphas, comps, params)
    assert np.max(np.abs(data.p)) <= 1e-12
    assert np.allclose(data.p.real - params.log_tau, data.gamma)
    assert np.allclose(data.p.imag, data.mu)


def test_component_solve_diagnostics_and_determinism():
    disc = discretize([make_curve(d) for d in lm.gallery.two_disks(0.5)], 64)
    gamma = point_charge_potential(disc, -1.0)
    a = solve_component(disc, gamma)
    b = solve_component(disc, gamma)
    assert np.array_equal(a.mu, b.mu)
    assert a.gmres_iters == b.gmres_iters
    assert a.gmres_relres == b.gmres_relres
    assert not a.fallback
    assert a.gmres_relres <= 1e-14


def test_gmres_solves_small_system():
    rng = np.random.default_rng(0)
    A = np.eye(12) + 0.2 * rng.standard_normal((12, 12))
    x_true = rng.standard_normal(12)
    b = A @ x_true
    x, iters, relres, converged = gmres(lambda v: A @ v, b, 1e-13, 50)
    assert converged
    assert np.linalg.norm(x - x_true) <= 1e-10 * np.linalg.norm(x_true)


def test_gmres_zero_rhs():
    x, iters, relres, converged = gmres(lambda v: v, np.zeros(5), 1e-14, 10)
    assert converged and iters == 0 and np.all(x == 0.0)


def test_dense_fallback_flagged_and_accurate():
    disc = discretize([make_curve(d) for d in lm.gallery.two_disks(0.5)], 32)
    gamma = point_charge_potential(disc, -1.0)
    full = solve_component(disc, gamma)
    capped = solve_component(disc, gamma, max_iter=2)
    assert capped.fallback
    assert not full.fallback
    assert np.max(np.abs(capped.mu - full.mu)) <= 1e-10
    assert capped.gmres_relres <= 1e-12


def test_gmres_iteration_counts_reasonable(seven_blobs_256):
    iters = [c.gmres_iters for c in seven_blobs_256.components]
    assert max(iters) <= 45
    assert not any(c.fallback for c in seven_blobs_256.components)
