"""Numba-jitted kernel implementations (hot path).

Loop twins of ``_numpy``; first call per signature compiles, results are
cached on disk. Keep the two backends in exact agreement.
"""

import numpy as np
from numba import njit

SQRT12 = np.sqrt(12.0)

WILCOXON = 0
SIGN = 1


@njit(cache=True)
def _phi_scalar(x, kind):
    if kind == 0:
        return SQRT12 * (x - 0.5)
    if x > 0.5:
        return 1.0
    if x < 0.5:
        return -1.0
    return 0.0


@njit(cache=True)
def midranks(v):
    """Ascending ranks 1..n with ties replaced by the mean of their positions."""
    n = v.size
    order = np.argsort(v, kind="mergesort")
    out = np.empty(n, dtype=np.float64)
    i = 0
    while i < n:
        j = i
        vi = v[order[i]]
        while j + 1 < n and v[order[j + 1]] == vi:
            j += 1
        mid = 0.5 * (i + j) + 1.0
        for k in range(i, j + 1):
            out[order[k]] = mid
        i = j + 1
    return out


@njit(cache=True)
def rank_scores(v, kind):
    """Score of each component: phi(midrank / (n+1))."""
    n = v.size
    ranks = midranks(v)
    out = np.empty(n, dtype=np.float64)
    denom = n + 1.0
    for i in range(n):
        out[i] = _phi_scalar(ranks[i] / denom, kind)
    return out


@njit(cache=True)
def pseudo_norm(v, kind):
    """Rank pseudo norm: sum of rank scores times components."""
    a = rank_scores(v, kind)
    acc = 0.0
    for i in range(v.size):
        acc += a[i] * v[i]
    return acc


@njit(cache=True)
def right_rank_deriv(w, slopes, kind):
    """Right derivative of t -> pseudo_norm(w + t*slopes) at t = 0.

    Just to the right of t, components order lexicographically by
    (value, slope); components tied in both stay tied and keep midranks.
    """
    n = w.size
    order = np.argsort(w, kind="mergesort")
    # insertion-sort slopes within runs of equal w (runs are tiny generically)
    i = 0
    while i < n:
        j = i
        wi = w[order[i]]
        while j + 1 < n and w[order[j + 1]] == wi:
            j += 1
        for p in range(i + 1, j + 1):
            key = order[p]
            q = p - 1
            while q >= i and slopes[order[q]] > slopes[key]:
                order[q + 1] = order[q]
                q -= 1
            order[q + 1] = key
        i = j + 1
    acc = 0.0
    denom = n + 1.0
    i = 0
    while i < n:
        j = i
        wi = w[order[i]]
        si = slopes[order[i]]
        while j + 1 < n and w[order[j + 1]] == wi and slopes[order[j + 1]] == si:
            j += 1
        a = _phi_scalar((0.5 * (i + j) + 1.0) / denom, kind)
        for k in range(i, j + 1):
            acc += a * slopes[order[k]]
        i = j + 1
    return acc


@njit(cache=True)
def _hvar(rho, d, s_i, sigma, lam, t, kind):
    return pseudo_norm(rho - t * d, kind) + lam * abs(s_i + t * sigma)


@njit(cache=True)
def _hprime(rho, d, s_i, sigma, lam, t, kind):
    z = s_i + t * sigma
    if z > 0.0:
        dl1 = sigma
    elif z < 0.0:
        dl1 = -sigma
    else:
        dl1 = 1.0
    return right_rank_deriv(rho - t * d, -d, kind) + lam * dl1


@njit(cache=True)
def line_search(rho, col, s_i, sigma, lam, kind, tol, t_cap):
    """Minimize h(t) = ||rho - t*sigma*col||_phi + lam*|s_i + t*sigma| over t >= 0.

    Returns (t, h(t), status); status 0 = ok, 1 = bracket growth hit
    t_cap (caller should stall), 2 = non-finite values encountered.
    """
    d = sigma * col
    h0 = _hvar(rho, d, s_i, sigma, lam, 0.0, kind)
    if not np.isfinite(h0):
        return 0.0, h0, 2
    if _hprime(rho, d, s_i, sigma, lam, 0.0, kind) >= 0.0:
        return 0.0, h0, 0
    hi = 1.0
    while True:
        dp = _hprime(rho, d, s_i, sigma, lam, hi, kind)
        if not np.isfinite(dp):
            return 0.0, h0, 2
        if dp > 0.0:
            break
        hi *= 2.0
        if hi > t_cap:
            return 0.0, h0, 1
    lo = 0.0
    while hi - lo > tol:
        m = 0.5 * (lo + hi)
        if m <= lo or m >= hi:
            break
        if _hprime(rho, d, s_i, sigma, lam, m, kind) <= 0.0:
            lo = m
        else:
            hi = m
    cand = 0.5 * (lo + hi)
    h_cand = _hvar(rho, d, s_i, sigma, lam, cand, kind)
    h_lo = _hvar(rho, d, s_i, sigma, lam, lo, kind)
    if h_lo < h_cand:
        return lo, h_lo, 0
    return cand, h_cand, 0
