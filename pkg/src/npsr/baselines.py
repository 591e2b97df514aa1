"""l2-based reference solvers: OMP and an ISTA Lasso solver.

These are the classical comparison points for the rank-based solver. OMP
greedily selects the atom most correlated with the residual and refits by
least squares on the grown support (QR-updated, with a tiny-ridge fallback
when the subproblem turns singular). lasso_ista runs iterative
shrinkage-thresholding on 0.5*||r - Phi s||_2^2 + lambda*||s||_1; with a
small lambda it also stands in for basis pursuit.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass
class OmpConfig:
    max_atoms: int = 10
    residual_threshold: float = 0.0

    def __post_init__(self):
        if self.max_atoms < 1:
            raise ValueError("max_atoms must be >= 1")
        if self.residual_threshold < 0:
            raise ValueError("residual_threshold must be >= 0")


@dataclass
class LassoConfig:
    lam: Optional[float] = None
    lam_rel: float = 0.1  # used when lam is None: lam = lam_rel * max|Phi^T r|
    max_iter: int = 1000
    tol: float = 1e-8

    def __post_init__(self):
        if self.lam is not None and not self.lam > 0:
            raise ValueError("lambda must be positive")
        if not self.lam_rel > 0:
            raise ValueError("lam_rel must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")


def _ridge_fit(a, r, ridge=1e-10):
    gram = a.T @ a
    gram[np.diag_indices_from(gram)] += ridge
    return np.linalg.solve(gram, a.T @ r)


def omp_with_stats(problem, config):
    """OMP returning (estimate, atoms_selected)."""
    phi = problem.dictionary.entries
    r = problem.observation
    m, n = phi.shape
    col_norms = np.linalg.norm(phi, axis=0)
    if np.any(col_norms == 0.0):
        raise ValueError("OMP requires nonzero dictionary columns")
    kmax = min(config.max_atoms, m)

    q = np.empty((m, kmax))
    rtri = np.zeros((kmax, kmax))
    support: list[int] = []
    res = r.astype(np.float64, copy=True)
    selected = np.zeros(n, dtype=bool)
    degenerate = False

    for it in range(kmax):
        if np.linalg.norm(res) <= config.residual_threshold:
            break
        corr = np.abs(phi.T @ res)
        corr[selected] = -np.inf  # never reselect an atom
        j = int(np.argmax(corr))
        w = phi[:, j].copy()
        proj = q[:, :it].T @ w
        w -= q[:, :it] @ proj
        nrm = np.linalg.norm(w)
        if nrm <= 1e-10 * col_norms[j]:
            degenerate = True
            support.append(j)
            selected[j] = True
            break
        q[:, it] = w / nrm
        rtri[:it, it] = proj
        rtri[it, it] = nrm
        support.append(j)
        selected[j] = True
        res = res - q[:, it] * (q[:, it] @ res)

    shat = np.zeros(n)
    if support:
        if degenerate:
            # singular least-squares subproblem: tiny-ridge normal equations
            shat[support] = _ridge_fit(phi[:, support], r)
        else:
            k = len(support)
            coef = np.linalg.solve(rtri[:k, :k], q[:, :k].T @ r)
            shat[support] = coef
    return shat, len(support)


def omp(problem, config=None):
    """Greedy sparse estimate; support grows one atom per iteration until
    max_atoms or the residual norm drops to residual_threshold."""
    config = config or OmpConfig()
    return omp_with_stats(problem, config)[0]


def _soft(x, thr):
    return np.sign(x) * np.maximum(np.abs(x) - thr, 0.0)


def _lipschitz_bound(phi, iters=100, seed=0):
    """Upper bound on ||Phi||_2^2 by power iteration plus a safety factor."""
    rng = np.random.default_rng(seed)
    v = rng.normal(size=phi.shape[1])
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(iters):
        w = phi.T @ (phi @ v)
        est = np.linalg.norm(w)
        if est == 0.0:
            return 1.0
        v = w / est
    return 1.02 * est


def lasso_ista_with_stats(problem, config):
    """ISTA returning (estimate, iterations)."""
    phi = problem.dictionary.entries
    r = problem.observation
    lam = config.lam
    if lam is None:
        lam = config.lam_rel * float(np.max(np.abs(phi.T @ r)))
        if not lam > 0:
            raise ValueError("default lambda rule degenerated to zero; pass lam explicitly")
    lip = _lipschitz_bound(phi)
    s = np.zeros(phi.shape[1])
    it = 0
    for it in range(1, config.max_iter + 1):
        grad = phi.T @ (phi @ s - r)
        s_new = _soft(s - grad / lip, lam / lip)
        delta = np.max(np.abs(s_new - s))
        s = s_new
        if delta <= config.tol:
            break
    return s, it


def lasso_ista(problem, config=None):
    """Shrinkage-thresholding minimizer of 0.5||r - Phi s||_2^2 + lambda||s||_1."""
    config = config or LassoConfig()
    return lasso_ista_with_stats(problem, config)[0]
