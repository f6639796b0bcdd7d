"""Independent cross-checks: logarithmic capacity, dense Jacobians, fixtures.

The capacity solver uses a first-kind equation for the equilibrium measure
(log kernel, unit total mass, one shared constant potential value), which is
a different formulation from the main pipeline, so agreement of exp(const)
with the pipeline's capacity is a genuine cross-check.
"""

from dataclasses import dataclass

import numpy as np

from .errors import GeometryError, SolverError
from .geometry import discretize, make_curve
from .newton import LemniscaticDomain, MapSolution, jacobian_blocks


@dataclass
class CapacityResult:
    capacity: float
    robin_constant: float    # log of the capacity (constant boundary potential)
    density: np.ndarray      # equilibrium density against dt, integrates to 1


def _log_sin_weights(n):
    """Quadrature values g(u) at u = 2*pi*k/n for the periodic log kernel.

    The rule sum_q (2*pi/n) g(s - t_q) f(t_q) integrates
    log|2 sin((s-t)/2)| f(t) exactly for trigonometric f of degree < n/2.
    """
    k = np.arange(n)
    u = 2 * np.pi * k / n
    g = np.zeros(n)
    for m in range(1, n // 2):
        g -= np.cos(m * u) / m
    g -= np.cos(n * u / 2) / n
    return g


def logarithmic_capacity(disc):
    """Capacity of the compact complement via the equilibrium measure.

    Solves sum over the boundary of log|eta(s) - eta(t)| rho(t) dt = const
    with unit total mass.  The same-component log singularity is split into
    log|2 sin((s-t)/2)| (handled by the spectrally exact rule) plus a smooth
    remainder whose diagonal is log|eta_dot|.  Smooth boundaries only.
    """
    if disc.graded:
        raise GeometryError("capacity oracle supports smooth boundaries only")
    m = disc.size
    n = disc.n
    weight = 2 * np.pi / n
    g = _log_sin_weights(n)
    pos = np.tile(np.arange(n), disc.ell)

    A = np.zeros((m + 1, m + 1))
    diff = np.abs(disc.eta[:, None] - disc.eta[None, :])
    np.fill_diagonal(diff, 1.0)
    logdiff = np.log(diff)
    same = disc.component_of[:, None] == disc.component_of[None, :]
    shift = np.mod(pos[:, None] - pos[None, :], n)

    # smooth remainder on same-component blocks: log|eta(s)-eta(t)| - log|2 sin((s-t)/2)|
    sin_part = np.abs(2 * np.sin(np.pi * shift / n))
    sin_part[shift == 0] = 1.0  # diagonal and equal grid positions across components
    remainder = logdiff - np.log(sin_part)
    np.fill_diagonal(remainder, np.log(np.abs(disc.eta_dot)))

    K = np.where(same, weight * g[shift] + weight * remainder, weight * logdiff)
    A[:m, :m] = K
    A[:m, m] = -1.0
    A[m, :m] = weight
    rhs = np.zeros(m + 1)
    rhs[m] = 1.0
    try:
        sol = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError as exc:
        raise SolverError("equilibrium-measure system is singular") from exc
    density = sol[:m]
    const = float(sol[m])
    mass = weight * float(np.sum(density))
    if abs(mass - 1.0) > 1e-10:
        raise SolverError(f"equilibrium density mass {mass} deviates from 1")
    return CapacityResult(capacity=float(np.exp(const)), robin_constant=const,
                          density=density)


def dense_jacobian(state, params, disc):
    """Materialized Jacobian of the nonlinear residual (test scale only)."""
    size = disc.size + disc.ell
    if size > 200:
        raise SolverError("dense Jacobian restricted to ell*n + ell <= 200")
    d, a1, a2, g = jacobian_blocks(state, params, disc)
    J = np.zeros((size, size), dtype=complex)
    J[:disc.size, :disc.size] = np.diag(d)
    J[:disc.size, disc.size:] = a1
    J[disc.size:, :disc.size] = a2
    J[disc.size:, disc.size:] = np.diag(g)
    return J


def identity_disk_solution(radius, center=0.0, n=64):
    """Exact fixture: the exterior of one disk maps by the identity."""
    if radius <= 0:
        raise GeometryError("radius must be positive")
    curve = make_curve({"family": "circle",
                        "params": {"center": complex(center), "radius": float(radius)}})
    disc = discretize([curve], n)
    domain = LemniscaticDomain(centers=np.array([complex(center)]),
                               exponents=np.array([1.0]),
                               capacity=float(radius))
    solution = MapSolution(boundary_w=disc.eta.copy(), domain=domain,
                           diagnostics={"newton_iterations": 0, "step_norms": [],
                                        "residual_inf": 0.0})
    return disc, solution
