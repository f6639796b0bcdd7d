"""Nonlinear stage: boundary values of the map and the lemniscate centers.

The unknown vector stacks the ell*n boundary values w_i with the ell
centers a_j.  The residual couples a log relation per node with one moment
equation per component.  The Jacobian has an arrow structure (diagonal
block over the w, Cauchy-structured coupling blocks, small diagonal block
over the a), so each Newton step reduces to an ell x ell Schur system whose
entries are accumulated directly from closed-form sums.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import SolverError
from .geometry import centroid, winding_number


@dataclass
class LemniscaticDomain:
    """Canonical target domain: centers, exponents (summing to 1), capacity."""

    centers: np.ndarray
    exponents: np.ndarray
    capacity: float


@dataclass
class NewtonState:
    w: np.ndarray             # boundary values, length ell*n
    a: np.ndarray             # centers, length ell
    k: int = 0
    step_norms: list = field(default_factory=list)
    cond_diag: list = field(default_factory=list)
    cond_schur: list = field(default_factory=list)


@dataclass
class MapSolution:
    """Converged boundary values plus the canonical domain and diagnostics."""

    boundary_w: np.ndarray
    domain: LemniscaticDomain
    diagnostics: dict = field(default_factory=dict)


def initial_guess(disc, s0=1.1, delta=0.1, data=None, mode="circles"):
    """Starting point: scaled centroids for the centers, small clockwise
    circles around them for the boundary values.

    mode="circles" places the boundary start on circles of radius delta
    times the smallest distance between initial centers (the curve diameter
    for one component), phase locked to the boundary point seen from the
    centroid (on a circle this is exactly exp(-i t)).  mode="consistent"
    instead solves each node's own logarithmic relation exactly, freezing
    the coupling to the other centers at its leading value; it needs the
    assembled right-hand side and rescues stiff geometries where the plain
    circle start overshoots.
    """
    if s0 <= 1.0:
        raise SolverError("starting scale s0 must exceed 1")
    if not 0.0 < delta <= 0.5:
        raise SolverError("starting radius factor delta must lie in (0, 0.5]")
    cents = np.array([centroid(disc, j) for j in range(disc.ell)])
    a0 = s0 * cents
    diam = disc.diameter()
    if disc.ell > 1:
        sep = np.abs(a0[:, None] - a0[None, :])
        np.fill_diagonal(sep, np.inf)
        if sep.min() < 1e-10 * diam:
            raise SolverError(
                "initial centers coincide (overlapping centroids); "
                "override the starting centers in the problem spec")
        rho = delta * sep.min(axis=1)
    else:
        rho = np.array([delta * diam])
    w0 = np.empty(disc.size, dtype=complex)
    if mode == "circles":
        for j in range(disc.ell):
            sl = disc.component_slice(j)
            phase = np.angle(disc.eta[sl] - cents[j])
            w0[sl] = a0[j] + rho[j] * np.exp(1j * phase)
    elif mode == "consistent":
        if data is None:
            raise SolverError("consistent start needs the assembled boundary data")
        m = data.params.m
        for j in range(disc.ell):
            sl = disc.component_slice(j)
            q = data.p[sl].astype(complex)
            for k in range(disc.ell):
                if k == j:
                    continue
                q -= m[k] * np.log((a0[j] - a0[k]) / (disc.eta[sl] - data.alphas[k]))
            w0[sl] = a0[j] + (disc.eta[sl] - data.alphas[j]) * np.exp(q / m[j])
    else:
        raise SolverError(f"unknown starting mode {mode!r}")
    return NewtonState(w=w0, a=a0.astype(complex))


def _log_ratio(state, data, disc):
    """log((w_i - a_j)/(eta_i - alpha_j)), principal branch per term."""
    num = state.w[:, None] - state.a[None, :]
    den = disc.eta[:, None] - data.alphas[None, :]
    if np.any(num == 0):
        raise SolverError("boundary value collided with a center (log singularity)")
    if np.any(den == 0):
        raise SolverError("auxiliary point lies on the boundary")
    return np.log(num / den)


def nonlinear_residual(state, data, disc):
    """Stacked residual: ell*n log relations followed by ell moment equations."""
    m = data.params.m
    L = _log_ratio(state, data, disc)
    rows = L @ m - data.p
    moments = (L.T @ disc.eta_dot) / (disc.n * 1j) + data.alphas - state.a
    return np.concatenate([rows, moments])


def _center_coupling(state, disc):
    """Cauchy matrix 1/(w_i - a_j); its product with m gives the diagonal d."""
    return 1.0 / (state.w[:, None] - state.a[None, :])


def solve_linearized(state, f_value, params, disc, min_diag=1e-12):
    """One Newton step via the ell x ell Schur complement.

    The large diagonal block d_i = sum_j m_j/(w_i - a_j) must stay away from
    zero; the coupling blocks are never materialized beyond the ell*n x ell
    Cauchy matrix.  Returns (step, cond_diag, cond_schur).
    """
    m = params.m
    ell = disc.ell
    C = _center_coupling(state, disc)
    d = C @ m
    dmin = float(np.min(np.abs(d)))
    if dmin <= min_diag:
        raise SolverError(
            f"diagonal Jacobian block nearly singular (min |d| = {dmin:.2e}); "
            "try a different starting point")
    b = f_value[:disc.size]
    c = f_value[disc.size:]

    ed_over_d = disc.eta_dot / d
    core = (C * ed_over_d[:, None]).T @ C            # sum_k eta_dot_k/(d_k (w_k-a_r)(w_k-a_s))
    schur = (1j / disc.n) * core * m[None, :]
    row_sums = (C.T @ disc.eta_dot) / (disc.n * 1j)  # moment-row dependence on the centers
    schur = schur + np.eye(ell) + np.diag(row_sums)

    rhs = (C.T @ (b * ed_over_d)) / (disc.n * 1j) - c
    svals = np.linalg.svd(schur, compute_uv=False)
    if svals[-1] <= 1e-14 * svals[0]:
        raise SolverError("Schur complement is singular at this iterate")
    y = np.linalg.solve(schur, rhs)
    x = (b + C @ (m * y)) / d
    cond_diag = float(np.max(np.abs(d)) / dmin)
    cond_schur = float(svals[0] / svals[-1])
    return np.concatenate([x, y]), cond_diag, cond_schur


def jacobian_blocks(state, params, disc):
    """Exact Jacobian blocks of the discrete residual.

    Top-left: diag(d).  Top-right: -m_j/(w_i - a_j).  Bottom-left:
    eta_dot_q/((n*i)(w_q - a_k)).  Bottom-right: diagonal -1 - s_k, where
    s_k is the k-th moment row summed (the moment equations depend on a_k
    through every logarithm as well as the explicit -a_k term).
    """
    C = _center_coupling(state, disc)
    m = params.m
    d = C @ m
    a1 = -C * m[None, :]
    a2 = (C * disc.eta_dot[:, None]).T / (disc.n * 1j)
    row_sums = a2.sum(axis=1)
    g = -1.0 - row_sums
    return d, a1, a2, g


def apply_jacobian(state, params, disc, vec):
    """Jacobian-vector product from the block formulas (for derivative checks)."""
    d, a1, a2, g = jacobian_blocks(state, params, disc)
    vw = vec[:disc.size]
    va = vec[disc.size:]
    top = d * vw + a1 @ va
    bottom = a2 @ vw + g * va
    return np.concatenate([top, bottom])


def lemniscate_residual(w, domain):
    """max_i | prod_j |w_i - a_j|^{m_j} - tau |, accumulated through logs."""
    logs = np.log(np.abs(w[:, None] - domain.centers[None, :]))
    vals = np.exp(logs @ domain.exponents)
    return float(np.max(np.abs(vals - domain.capacity)))


def _trig_resample(values, factor):
    """Resample periodic samples onto a grid refined by an integer factor."""
    n = values.shape[0]
    X = np.fft.fft(values)
    Xp = np.zeros(n * factor, dtype=complex)
    Xp[:n // 2] = X[:n // 2]
    Xp[-(n // 2):] = X[-(n // 2):]
    Xp[n // 2] = 0.5 * X[n // 2]
    Xp[-(n // 2)] += 0.5 * X[n // 2]
    return np.fft.ifft(Xp) * factor


def boundary_relation_residual(disc, solution, refine=4, capacity=None):
    """Deviation of the boundary values from the target level set, measured
    between collocation nodes via trigonometric resampling.

    At the nodes the converged values satisfy the relation to solver
    accuracy by construction; resampling exposes the pointwise
    discretization error of the computed boundary correspondence.
    """
    domain = solution.domain
    tau = domain.capacity if capacity is None else capacity
    worst = 0.0
    for j in range(disc.ell):
        sl = disc.component_slice(j)
        fine = _trig_resample(solution.boundary_w[sl], refine)
        logs = np.log(np.abs(fine[:, None] - domain.centers[None, :]))
        vals = np.exp(logs @ domain.exponents)
        worst = max(worst, float(np.max(np.abs(vals - tau))))
    return worst


def _branch_offset(residual_rows, disc):
    """Largest per-component median of the imaginary residual part; a value
    near a multiple of 2*pi*m_j signals that a logarithm crossed its cut."""
    off = 0.0
    for j in range(disc.ell):
        sl = disc.component_slice(j)
        off = max(off, abs(float(np.median(residual_rows[sl].imag))))
    return off


def _winding_ok(w, a, disc):
    for j in range(disc.ell):
        sl = disc.component_slice(j)
        for k in range(disc.ell):
            want = -1 if k == j else 0
            try:
                got = winding_number(w[sl], a[k])
            except Exception:
                return False
            if got != want:
                return False
    return True


def _newton_iterate(disc, data, tol, max_iter, s0, delta, mode="circles"):
    params = data.params
    state = initial_guess(disc, s0=s0, delta=delta, data=data, mode=mode)
    diam = disc.diameter()
    first_norm = None
    converged = False
    for k in range(max_iter):
        f_val = nonlinear_residual(state, data, disc)
        step, cond_d, cond_s = solve_linearized(state, f_val, params, disc)
        w_new = state.w - step[:disc.size]
        a_new = state.a - step[disc.size:]
        if disc.ell > 1:
            sep = np.abs(a_new[:, None] - a_new[None, :])
            np.fill_diagonal(sep, np.inf)
            if sep.min() <= 1e-10 * diam:
                raise SolverError("centers collapsed during the Newton iteration",
                                  {"step_norms": state.step_norms})
        norm = float(np.max(np.abs(step)))
        state.w, state.a = w_new, a_new
        state.k = k + 1
        state.step_norms.append(norm)
        state.cond_diag.append(cond_d)
        state.cond_schur.append(cond_s)
        if first_norm is None:
            first_norm = norm
        elif norm > 1e6 * first_norm:
            raise SolverError("Newton iteration diverged",
                              {"step_norms": state.step_norms})
        if norm <= tol:
            converged = True
            break
    return state, converged


def newton_solve(disc, data, tol=1e-12, max_iter=50, s0=1.1, delta=0.1):
    """Run the Newton iteration; retry once from a more conservative start
    when a branch problem is detected (non-convergence, wrong winding of the
    computed boundary values, or a constant imaginary residual offset)."""
    params = data.params
    attempts = [
        (s0, delta, "circles"),
        (1.0 + 1.25 * (s0 - 1.0), delta / 2.0, "circles"),
        (s0, delta, "consistent"),
    ]
    last_error = None
    for attempt, (s0_k, delta_k, mode) in enumerate(attempts):
        try:
            state, converged = _newton_iterate(disc, data, tol, max_iter, s0_k,
                                               delta_k, mode=mode)
        except SolverError as exc:
            last_error = exc
            continue
        if not converged:
            last_error = SolverError(
                f"Newton did not reach {tol:g} in {max_iter} steps",
                {"step_norms": state.step_norms})
            continue
        f_val = nonlinear_residual(state, data, disc)
        branch = _branch_offset(f_val[:disc.size], disc)
        if branch > 1e-6 or not _winding_ok(state.w, state.a, disc):
            last_error = SolverError(
                "converged to a branch-shifted configuration",
                {"step_norms": state.step_norms, "branch_offset": branch})
            continue
        domain = LemniscaticDomain(centers=state.a.copy(), exponents=params.m.copy(),
                                   capacity=params.tau)
        diagnostics = {
            "newton_iterations": state.k,
            "step_norms": list(state.step_norms),
            "cond_diag": list(state.cond_diag),
            "cond_schur": list(state.cond_schur),
            "residual_inf": float(np.max(np.abs(f_val))),
            "moment_residual": float(np.max(np.abs(f_val[disc.size:]))),
            "lemniscate_residual": lemniscate_residual(state.w, domain),
            "branch_offset": branch,
            "retried": attempt > 0,
            "start": {"s0": s0_k, "delta": delta_k, "mode": mode},
        }
        return MapSolution(boundary_w=state.w.copy(), domain=domain,
                           diagnostics=diagnostics)
    if last_error is None:
        last_error = SolverError("Newton iteration failed")
    raise last_error
