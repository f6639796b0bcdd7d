import time

import numpy as np
import pytest

import lemmap as lm


class Solved:
    def __init__(self, disc, data, solution, components, elapsed):
        self.disc = disc
        self.data = data
        self.solution = solution
        self.components = components
        self.elapsed = elapsed


def _solve(curves, n, **kw):
    t0 = time.time()
    disc, data, solution, components = lm.solve_domain(curves, n, **kw)
    return Solved(disc, data, solution, components, time.time() - t0)


@pytest.fixture(scope="session")
def identity_circle_64():
    return _solve([lm.gallery.disk(0.0, 2.0)], 64)


@pytest.fixture(scope="session")
def two_disk_solutions_64():
    return {r: _solve(lm.gallery.two_disks(r), 64) for r in (0.5, 0.7, 0.9)}


@pytest.fixture(scope="session")
def two_disk_sweep():
    return {n: _solve(lm.gallery.two_disks(0.5), n) for n in (32, 64, 256)}


@pytest.fixture(scope="session")
def ellipse_128():
    return _solve([lm.gallery.ellipse(0.0, 2.0, 1.0)], 128)


@pytest.fixture(scope="session")
def seven_blobs_256():
    return _solve(lm.gallery.seven_blobs(), 256)


@pytest.fixture(scope="session")
def grid16_128():
    return _solve(lm.gallery.circle_grid(4, 4, 1.5, 0.25), 128)


@pytest.fixture(scope="session")
def four_squares_512():
    return _solve(lm.gallery.four_squares(), 512)


@pytest.fixture(scope="session")
def two_disk_capacity_ref():
    curves = [lm.make_curve(d) for d in lm.gallery.two_disks(0.5)]
    return lm.logarithmic_capacity(lm.discretize(curves, 512)).capacity


@pytest.fixture(scope="session")
def small_two_disk_problem():
    """ell*n + ell = 34 instance with assembled data, for Jacobian tests."""
    curves = [lm.make_curve(d) for d in lm.gallery.two_disks(0.5)]
    disc = lm.discretize(curves, 16)
    alphas = lm.default_alphas(disc)
    components, H = lm.solve_all_components(disc, alphas)
    params = lm.solve_exponents(H)
    data = lm.assemble_boundary_data(disc, alphas, components, params)
    return disc, data, params


def perturbed_state(disc, data, scale=0.05, seed=3):
    rng = np.random.default_rng(seed)
    state = lm.initial_guess(disc)
    state.w = state.w + scale * (rng.standard_normal(disc.size)
                                 + 1j * rng.standard_normal(disc.size))
    state.a = state.a + scale * (rng.standard_normal(disc.ell)
                                 + 1j * rng.standard_normal(disc.ell))
    return state
