"""Independent reference implementations used as test oracles.

Everything here is built on scipy.stats.rankdata and plain numpy, sharing
no code with npsr.kernels, so agreement is evidence and not tautology.
"""

import numpy as np
import scipy.stats


def ref_scores(n, kind):
    x = np.arange(1, n + 1) / (n + 1.0)
    if kind == "wilcoxon":
        return np.sqrt(12.0) * (x - 0.5)
    return np.sign(2.0 * x - 1.0)


def ref_pseudo_norm(v, kind="wilcoxon"):
    v = np.asarray(v, dtype=float)
    x = scipy.stats.rankdata(v, method="average") / (v.size + 1.0)
    if kind == "wilcoxon":
        a = np.sqrt(12.0) * (x - 0.5)
    else:
        a = np.sign(2.0 * x - 1.0)
    return float(a @ v)


def ref_objective(phi, r, s, lam, kind="wilcoxon"):
    return ref_pseudo_norm(r - phi @ s, kind) + lam * float(np.abs(s).sum())


def ref_line_objective_on_grid(rho, col, s_i, sigma, lam, ts, kind="wilcoxon"):
    """h(t) (variable part) evaluated on a whole grid of steps at once."""
    w = rho[None, :] - np.outer(ts, sigma * col)
    x = scipy.stats.rankdata(w, method="average", axis=1) / (w.shape[1] + 1.0)
    if kind == "wilcoxon":
        a = np.sqrt(12.0) * (x - 0.5)
    else:
        a = np.sign(2.0 * x - 1.0)
    return (a * w).sum(axis=1) + lam * np.abs(s_i + ts * sigma)


def ref_grid_line_minimum(rho, col, s_i, sigma, lam, kind="wilcoxon", points=10**5):
    """Dense-grid minimum of the line objective over [0, t_hi].

    t_hi is grown until the coarse-grid minimizer is interior, so the
    dense grid is known to bracket the true minimum of the convex h.
    """
    t_hi = 1.0
    for _ in range(60):
        coarse = np.linspace(0.0, t_hi, 64)
        hc = ref_line_objective_on_grid(rho, col, s_i, sigma, lam, coarse, kind)
        if np.argmin(hc) < 62:
            break
        t_hi *= 4.0
    ts = np.linspace(0.0, t_hi, points)
    h = ref_line_objective_on_grid(rho, col, s_i, sigma, lam, ts, kind)
    j = int(np.argmin(h))
    return float(ts[j]), float(h[j])
