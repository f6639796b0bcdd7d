"""Numerical conformal maps onto lemniscatic domains.

Pipeline: discretize the boundary curves, solve one boundary integral
equation per component for the exponents and the capacity, then a Newton
iteration for the boundary values of the map and the lemniscate centers.
Interior values follow from a Cauchy integral.
"""

import numpy as np

from .errors import GeometryError, SolverError, SpecError
from .geometry import (BoundaryCurve, Discretization, affine_image, centroid,
                       curve_samples, discretize, grade_corners, make_curve,
                       total_turning, winding_number)
from .kernels import apply_neumann, apply_singular, neumann_kernel, periodic_conjugate
from .bie import (BoundaryData, CanonicalParameters, ComponentSolution,
                  assemble_boundary_data, default_alphas, point_charge_potential,
                  solve_all_components, solve_component, solve_exponents)
from .newton import (LemniscaticDomain, MapSolution, NewtonState,
                     boundary_relation_residual, initial_guess,
                     lemniscate_residual, newton_solve, nonlinear_residual,
                     solve_linearized)
from .cauchy import EvaluationRequest, classify_targets, evaluate_map
from .oracle import (CapacityResult, dense_jacobian, identity_disk_solution,
                     logarithmic_capacity)
from . import gallery

__version__ = "0.1.0"


def solve_domain(curves, n, gmres_tol=1e-14, newton_tol=1e-12, max_newton=50,
                 s0=1.1, delta=0.1, alphas=None):
    """End-to-end solve from curve descriptors or BoundaryCurve objects.

    Returns (disc, data, solution, components).
    """
    built = [c if isinstance(c, BoundaryCurve) else make_curve(c) for c in curves]
    disc = discretize(built, n)
    if alphas is None:
        alphas = default_alphas(disc)
    else:
        alphas = np.asarray(alphas, dtype=complex)
    components, h_matrix = solve_all_components(disc, alphas, tol=gmres_tol)
    params = solve_exponents(h_matrix)
    data = assemble_boundary_data(disc, alphas, components, params)
    solution = newton_solve(disc, data, tol=newton_tol, max_iter=max_newton,
                            s0=s0, delta=delta)
    solution.diagnostics["gmres_iterations"] = [c.gmres_iters for c in components]
    solution.diagnostics["gmres_relres"] = [c.gmres_relres for c in components]
    solution.diagnostics["gmres_fallback"] = [c.fallback for c in components]
    solution.diagnostics["h_spread"] = [c.h_spread for c in components]
    return disc, data, solution, components
