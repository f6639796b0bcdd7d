"""Boundary integral stage: charge densities, exponents and capacity.

For each boundary component an auxiliary interior point alpha_j defines the
data -log|eta(t) - alpha_j|.  A second-kind integral equation with the
Neumann operator yields the conjugate density mu_j and a piecewise constant
h_j; the per-component means of the h_j fill the matrix of a small dense
system whose solution is the exponent vector m and log of the capacity.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryError, SolverError
from .geometry import centroid, winding_number
from .kernels import apply_neumann, apply_singular, neumann_matrix


@dataclass
class ComponentSolution:
    """Density and piecewise-constant part for one auxiliary point."""

    mu: np.ndarray            # real grid function, length ell*n
    h: np.ndarray             # per-component means, length ell
    h_point: np.ndarray       # pointwise h before averaging
    h_spread: float           # max deviation of h_point from its component mean
    gmres_iters: int
    gmres_relres: float
    fallback: bool = False    # dense solve was needed


@dataclass
class CanonicalParameters:
    """Exponents m (summing to one), capacity tau = exp(log_tau)."""

    m: np.ndarray
    log_tau: float

    @property
    def tau(self):
        return float(np.exp(self.log_tau))


@dataclass
class BoundaryData:
    """Right-hand side of the nonlinear stage: p = log_tau + gamma + i*mu."""

    p: np.ndarray
    gamma: np.ndarray
    mu: np.ndarray
    alphas: np.ndarray
    params: CanonicalParameters = None


def point_charge_potential(disc, alpha):
    """-log|eta(t) - alpha| on all nodes; alpha must be interior to one curve."""
    alpha = complex(alpha)
    dist = np.abs(disc.eta - alpha)
    if np.min(dist) < 1e-14:
        raise GeometryError("auxiliary point coincides with a boundary node")
    return -np.log(dist)


def validate_alpha(disc, j, alpha):
    """Check that alpha lies strictly inside component j (clockwise winding -1)."""
    sl = disc.component_slice(j)
    if winding_number(disc.eta[sl], alpha) != -1:
        raise GeometryError(
            f"auxiliary point {alpha} is not interior to component {j}; "
            "supply an explicit alpha override")


def default_alphas(disc):
    """Component centroids, validated as interior points."""
    alphas = np.empty(disc.ell, dtype=complex)
    for j in range(disc.ell):
        a = centroid(disc, j)
        validate_alpha(disc, j, a)
        alphas[j] = a
    return alphas


def gmres(matvec, b, tol, max_iter):
    """Full (unrestarted) GMRES with modified Gram-Schmidt and Givens rotations.

    Returns (x, iterations, relative_residual, converged).  Reductions are
    sequential, so repeated runs on identical input give identical iterates.
    """
    b = np.asarray(b, dtype=float)
    bnorm = float(np.linalg.norm(b))
    if bnorm == 0.0:
        return np.zeros_like(b), 0, 0.0, True
    max_iter = min(max_iter, b.shape[0])
    V = [b / bnorm]
    H = np.zeros((max_iter + 1, max_iter))
    cs = np.zeros(max_iter)
    sn = np.zeros(max_iter)
    g = np.zeros(max_iter + 1)
    g[0] = bnorm
    k = 0
    converged = False
    for k in range(max_iter):
        w = matvec(V[k])
        for i in range(k + 1):
            H[i, k] = float(np.dot(V[i], w))
            w = w - H[i, k] * V[i]
        hnext = float(np.linalg.norm(w))
        H[k + 1, k] = hnext
        for i in range(k):
            hik = cs[i] * H[i, k] + sn[i] * H[i + 1, k]
            H[i + 1, k] = -sn[i] * H[i, k] + cs[i] * H[i + 1, k]
            H[i, k] = hik
        denom = np.hypot(H[k, k], H[k + 1, k])
        cs[k] = H[k, k] / denom
        sn[k] = H[k + 1, k] / denom
        H[k, k] = denom
        H[k + 1, k] = 0.0
        g[k + 1] = -sn[k] * g[k]
        g[k] = cs[k] * g[k]
        relres = abs(g[k + 1]) / bnorm
        if relres <= tol:
            converged = True
            break
        if hnext <= 1e-300:  # Krylov space exhausted
            break
        V.append(w / hnext)
    iters = k + 1
    y = np.zeros(iters)
    for i in range(iters - 1, -1, -1):
        y[i] = (g[i] - np.dot(H[i, i + 1:iters], y[i + 1:iters])) / H[i, i]
    x = np.zeros_like(b)
    for i in range(iters):
        x += y[i] * V[i]
    relres = abs(g[iters]) / bnorm
    return x, iters, relres, converged


def solve_component(disc, gamma_j, tol=1e-14, max_iter=100):
    """Solve (I - N)mu = -M gamma_j and form h_j = [M mu - (I - N)gamma_j]/2.

    Full unpreconditioned GMRES with matrix-free products; if the relative
    residual does not reach tol within max_iter iterations the system is
    assembled densely and solved directly (flagged in the result).
    """
    if not 0.0 < tol <= 1e-6:
        raise SolverError(f"gmres tolerance {tol:g} outside (0, 1e-6]")
    gamma_j = np.asarray(gamma_j, dtype=float)
    rhs = -apply_singular(disc, gamma_j)

    def matvec(v):
        return v - apply_neumann(disc, v)

    mu, iters, relres, converged = gmres(matvec, rhs, tol, max_iter)
    fallback = False
    if not converged and np.linalg.norm(rhs) > 0.0:
        A = np.eye(disc.size) - neumann_matrix(disc)
        try:
            mu = np.linalg.solve(A, rhs)
        except np.linalg.LinAlgError as exc:
            raise SolverError("dense fallback for the integral equation failed") from exc
        fallback = True
        res = rhs - matvec(mu)
        relres = float(np.linalg.norm(res) / np.linalg.norm(rhs))

    h_point = (apply_singular(disc, mu) - (gamma_j - apply_neumann(disc, gamma_j))) / 2.0
    h = disc.component_means(h_point)
    spread = float(np.max(np.abs(h_point - disc.expand_piecewise(h))))
    return ComponentSolution(mu=mu, h=h, h_point=h_point, h_spread=spread,
                             gmres_iters=iters, gmres_relres=relres, fallback=fallback)


def solve_exponents(h_matrix):
    """Solve the (ell+1) dense system for the exponents and log-capacity.

    h_matrix[k, j] holds the mean of h_j on component k.  Rows demand
    sum_j m_j h[k, j] = log_tau; the last row enforces sum_j m_j = 1.
    """
    H = np.asarray(h_matrix, dtype=float)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise SolverError("h matrix must be square")
    if not np.all(np.isfinite(H)):
        raise SolverError("h matrix contains non-finite entries")
    ell = H.shape[0]
    A = np.zeros((ell + 1, ell + 1))
    A[:ell, :ell] = H
    A[:ell, ell] = -1.0
    A[ell, :ell] = 1.0
    rhs = np.zeros(ell + 1)
    rhs[ell] = 1.0
    svals = np.linalg.svd(A, compute_uv=False)
    if svals[-1] < 1e-14 * svals[0]:
        raise SolverError(
            "exponent system is numerically singular; it is nonsingular in exact "
            "arithmetic, so the upstream discretization is inadequate")
    sol = np.linalg.solve(A, rhs)
    m = sol[:ell]
    if np.any(m <= 0.0):
        raise SolverError(f"computed exponents are not all positive: {m}")
    return CanonicalParameters(m=m, log_tau=float(sol[ell]))


def assemble_boundary_data(disc, alphas, components, params):
    """Superpose the per-component solutions into the nonlinear right-hand side."""
    if len(components) != disc.ell:
        raise SolverError("one component solution per boundary component required")
    alphas = np.asarray(alphas, dtype=complex)
    m = params.m
    gamma = np.zeros(disc.size)
    mu = np.zeros(disc.size)
    for j, comp in enumerate(components):
        gamma += m[j] * point_charge_potential(disc, alphas[j])
        mu += m[j] * comp.mu
    p = params.log_tau + gamma + 1j * mu
    return BoundaryData(p=p, gamma=gamma, mu=mu, alphas=alphas, params=params)


def solve_all_components(disc, alphas, tol=1e-14, max_iter=100):
    """Run the integral-equation solve for every component; returns the list
    of ComponentSolution and the matrix of h means (column j from alpha_j)."""
    alphas = np.asarray(alphas, dtype=complex)
    components = []
    H = np.zeros((disc.ell, disc.ell))
    for j in range(disc.ell):
        validate_alpha(disc, j, alphas[j])
        gamma_j = point_charge_potential(disc, alphas[j])
        comp = solve_component(disc, gamma_j, tol=tol, max_iter=max_iter)
        components.append(comp)
        H[:, j] = comp.h
    return components, H
