import numpy as np
import pytest

import lemmap as lm
from lemmap.errors import SolverError
from lemmap.geometry import discretize, make_curve
from lemmap.newton import (apply_jacobian, initial_guess, newton_solve,
                           nonlinear_residual, solve_linearized)
from lemmap.oracle import dense_jacobian, identity_disk_solution

from conftest import perturbed_state


def test_initial_guess_scaled_centroid():
    disc = discretize([make_curve(lm.gallery.disk(3.0, 1.0))], 16)
    state = initial_guess(disc, s0=1.1, delta=0.1)
    assert state.a[0] == pytest.approx(3.3)


def test_initial_guess_two_disk_example():
    disc = discretize([make_curve(d) for d in lm.gallery.two_disks(0.5)], 4)
    state = initial_guess(disc, s0=1.1, delta=0.1)
    assert np.allclose(np.sort(state.a.real), [-1.1, 1.1], atol=1e-12)
    # first node of the right disk starts at a0 + rho with rho = 0.1 * 2.2
    right = np.argmax(state.a.real)
    w_first = state.w[disc.component_slice(right)][0]
    assert w_first == pytest.approx(1.32, abs=1e-12)


def test_initial_guess_validation():
    disc = discretize([make_curve(lm.gallery.disk(0.0, 1.0))], 8)
    with pytest.raises(SolverError):
        initial_guess(disc, s0=0.9)
    with pytest.raises(SolverError):
        initial_guess(disc, delta=0.9)


def test_residual_zero_at_identity_fixture():
    disc, sol = identity_disk_solution(1.5, 0.5, 32)
    alphas = lm.default_alphas(disc)
    comps, H = lm.solve_all_components(disc, alphas)
    params = lm.solve_exponents(H)
    data = lm.assemble_boundary_data(disc, alphas, comps, params)
    state = type("S", (), {"w": sol.boundary_w, "a": sol.domain.centers})()
    F = nonlinear_residual(state, data, disc)
    assert np.max(np.abs(F)) <= 1e-12


def test_residual_small_at_converged_state(two_disk_solutions_64):
    run = two_disk_solutions_64[0.5]
    state = type("S", (), {"w": run.solution.boundary_w,
                           "a": run.solution.domain.centers})()
    F = nonlinear_residual(state, run.data, run.disc)
    assert np.max(np.abs(F)) <= 1e-10


def test_residual_sensitivity_band(two_disk_solutions_64):
    run = two_disk_solutions_64[0.5]
    w = run.solution.boundary_w.copy()
    w[7] += 1e-6
    state = type("S", (), {"w": w, "a": run.solution.domain.centers})()
    F = nonlinear_residual(state, run.data, run.disc)
    assert 1e-8 <= np.max(np.abs(F)) <= 1e-4


def test_schur_step_matches_dense(small_two_disk_problem):
    disc, data, params = small_two_disk_problem
    for seed in range(5):
        state = perturbed_state(disc, data, seed=seed)
        F = nonlinear_residual(state, data, disc)
        step, cond_d, cond_s = solve_linearized(state, F, params, disc)
        dense = np.linalg.solve(dense_jacobian(state, params, disc), F)
        rel = np.linalg.norm(step - dense) / np.linalg.norm(dense)
        assert rel <= 1e-10
        assert cond_d >= 1.0 and cond_s >= 1.0


def test_schur_step_matches_dense_three_components():
    curves = [make_curve(lm.gallery.disk(c, 0.6)) for c in (-3.0, 0.0, 3.0)]
    disc = discretize(curves, 16)  # ell*n + ell = 51
    alphas = lm.default_alphas(disc)
    comps, H = lm.solve_all_components(disc, alphas)
    params = lm.solve_exponents(H)
    data = lm.assemble_boundary_data(disc, alphas, comps, params)
    for seed in (0, 1, 2):
        state = perturbed_state(disc, data, seed=seed)
        F = nonlinear_residual(state, data, disc)
        step, _, _ = solve_linearized(state, F, params, disc)
        dense = np.linalg.solve(dense_jacobian(state, params, disc), F)
        assert np.linalg.norm(step - dense) / np.linalg.norm(dense) <= 1e-10


def test_residual_rejects_log_singularity(small_two_disk_problem):
    disc, data, params = small_two_disk_problem
    state = perturbed_state(disc, data, seed=4)
    state.w[0] = state.a[0]
    with pytest.raises(SolverError):
        nonlinear_residual(state, data, disc)


def test_zero_residual_gives_zero_step(small_two_disk_problem):
    disc, data, params = small_two_disk_problem
    state = perturbed_state(disc, data, seed=1)
    step, _, _ = solve_linearized(state, np.zeros(disc.size + disc.ell, dtype=complex),
                                  params, disc)
    assert np.max(np.abs(step)) == 0.0


def test_jacobian_matches_finite_differences(small_two_disk_problem):
    disc, data, params = small_two_disk_problem
    rng = np.random.default_rng(12)
    state = perturbed_state(disc, data, seed=2)
    F0 = nonlinear_residual(state, data, disc)
    eps = 1e-7
    worst = 0.0
    for _ in range(20):
        v = rng.standard_normal(disc.size + disc.ell) \
            + 1j * rng.standard_normal(disc.size + disc.ell)
        v /= np.max(np.abs(v))
        shifted = type("S", (), {"w": state.w + eps * v[:disc.size],
                                 "a": state.a + eps * v[disc.size:]})()
        fd = (nonlinear_residual(shifted, data, disc) - F0) / eps
        jv = apply_jacobian(state, params, disc, v)
        worst = max(worst, np.linalg.norm(fd - jv) / np.linalg.norm(jv))
    assert worst <= 1e-5


def test_newton_identity_circle(identity_circle_64):
    run = identity_circle_64
    sol = run.solution
    assert abs(sol.domain.centers[0]) <= 1e-10
    assert sol.domain.exponents[0] == pytest.approx(1.0, abs=1e-12)
    assert sol.domain.capacity == pytest.approx(2.0, abs=1e-10)
    assert np.max(np.abs(sol.boundary_w - run.disc.eta)) <= 1e-10


def test_newton_step_history(two_disk_solutions_64, seven_blobs_256):
    for run in (two_disk_solutions_64[0.5], seven_blobs_256):
        steps = run.solution.diagnostics["step_norms"]
        assert run.solution.diagnostics["newton_iterations"] <= 30
        assert steps[-1] <= 1e-11
        # strictly decreasing after the first few steps
        tail = steps[3:]
        assert all(b < a for a, b in zip(tail, tail[1:]))


def test_condition_histories_recorded(two_disk_solutions_64):
    d = two_disk_solutions_64[0.5].solution.diagnostics
    assert len(d["cond_diag"]) == d["newton_iterations"]
    assert len(d["cond_schur"]) == d["newton_iterations"]
    assert all(c >= 1.0 for c in d["cond_diag"])


def test_winding_of_solution(two_disk_solutions_64):
    run = two_disk_solutions_64[0.5]
    w = run.solution.boundary_w
    a = run.solution.domain.centers
    for j in range(2):
        sl = run.disc.component_slice(j)
        for k in range(2):
            want = -1 if k == j else 0
            assert lm.winding_number(w[sl], a[k]) == want


def test_moment_and_lemniscate_residuals(two_disk_solutions_64):
    d = two_disk_solutions_64[0.5].solution.diagnostics
    assert d["moment_residual"] <= 1e-8
    tau = two_disk_solutions_64[0.5].solution.domain.capacity
    assert d["lemniscate_residual"] <= 1e-8 * (1 + tau)


def test_affine_equivariance(two_disk_solutions_64):
    s = 1.7 * np.exp(1j * np.pi / 5)
    b = 0.3 - 0.2j
    base = two_disk_solutions_64[0.5].solution
    curves = [lm.affine_image(make_curve(d), s, b) for d in lm.gallery.two_disks(0.5)]
    disc, data, moved, comps = lm.solve_domain(curves, 64)
    assert np.max(np.abs(moved.domain.exponents - base.domain.exponents)) <= 1e-9
    assert np.max(np.abs(moved.domain.centers - (s * base.domain.centers + b))) <= 1e-8
    assert np.max(np.abs(moved.boundary_w - (s * base.boundary_w + b))) <= 1e-8
    assert abs(moved.domain.capacity - 1.7 * base.domain.capacity) <= 1e-8


def test_direct_newton_solve_runs():
    disc = discretize([make_curve(lm.gallery.disk(0.0, 1.0))], 32)
    alphas = lm.default_alphas(disc)
    comps, H = lm.solve_all_components(disc, alphas)
    params = lm.solve_exponents(H)
    data = lm.assemble_boundary_data(disc, alphas, comps, params)
    sol = newton_solve(disc, data, tol=1e-12, max_iter=50)
    assert sol.diagnostics["residual_inf"] <= 1e-11
    assert not sol.diagnostics["retried"]
