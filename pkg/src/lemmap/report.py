"""Overview figures written next to the delimited output of a solve."""

import os

import numpy as np

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .geometry import curve_samples


def _level_values(points, domain):
    logs = np.log(np.abs(points[:, None] - domain.centers[None, :]))
    return np.exp(logs @ domain.exponents)


def render_solution(disc, data, solution, outdir, dpi=150):
    """Write domain.png, lemniscatic.png and convergence.png; returns paths."""
    paths = []
    colors = plt.cm.tab10(np.linspace(0, 1, 10))

    fig, ax = plt.subplots(figsize=(6, 6))
    for j, curve in enumerate(disc.curves):
        pts = curve_samples(curve, 720)
        pts = np.append(pts, pts[0])
        ax.plot(pts.real, pts.imag, color=colors[j % 10], lw=1.2)
    ax.plot(data.alphas.real, data.alphas.imag, "k+", ms=6)
    ax.set_aspect("equal")
    ax.set_title("original domain")
    path = os.path.join(outdir, "domain.png")
    fig.savefig(path, dpi=dpi, bbox_inches="tight")
    plt.close(fig)
    paths.append(path)

    fig, ax = plt.subplots(figsize=(6, 6))
    domain = solution.domain
    w = solution.boundary_w
    span = max(np.ptp(w.real), np.ptp(w.imag))
    pad = 0.3 * span
    xs = np.linspace(w.real.min() - pad, w.real.max() + pad, 400)
    ys = np.linspace(w.imag.min() - pad, w.imag.max() + pad, 400)
    X, Y = np.meshgrid(xs, ys)
    V = _level_values((X + 1j * Y).ravel(), domain).reshape(X.shape)
    ax.contour(X, Y, V, levels=[domain.capacity], colors="0.4", linewidths=0.8)
    for j in range(disc.ell):
        sl = disc.component_slice(j)
        loop = np.append(w[sl], w[sl][0])
        ax.plot(loop.real, loop.imag, color=colors[j % 10], lw=1.2)
    ax.plot(domain.centers.real, domain.centers.imag, "r.", ms=8)
    ax.set_aspect("equal")
    ax.set_title("lemniscatic domain")
    path = os.path.join(outdir, "lemniscatic.png")
    fig.savefig(path, dpi=dpi, bbox_inches="tight")
    plt.close(fig)
    paths.append(path)

    steps = solution.diagnostics.get("step_norms", [])
    if steps:
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.semilogy(range(1, len(steps) + 1), steps, "o-", ms=4)
        ax.set_xlabel("iteration")
        ax.set_ylabel("step norm")
        ax.set_title("Newton convergence")
        ax.grid(True, which="both", alpha=0.3)
        path = os.path.join(outdir, "convergence.png")
        fig.savefig(path, dpi=dpi, bbox_inches="tight")
        plt.close(fig)
        paths.append(path)
    return paths
