"""Pure-numpy kernel implementations.

Vectorized twins of the numba kernels in ``_numba``; selected by setting
``NPSR_PURE_NUMPY=1`` (or automatically when numba is unavailable).
Rankings are identical across backends; accumulated sums agree to
floating-point rounding (the accumulation order differs).
"""

import numpy as np

SQRT12 = np.sqrt(12.0)

WILCOXON = 0
SIGN = 1


def _phi(x, kind):
    if kind == WILCOXON:
        return SQRT12 * (x - 0.5)
    return np.sign(2.0 * x - 1.0)


def midranks(v):
    """Ascending ranks 1..n with ties replaced by the mean of their positions."""
    n = v.size
    order = np.argsort(v, kind="mergesort")
    sv = v[order]
    head = np.empty(n, dtype=np.bool_)
    head[0] = True
    head[1:] = sv[1:] != sv[:-1]
    run = np.cumsum(head) - 1
    pos = np.arange(1, n + 1, dtype=np.float64)
    mid = np.bincount(run, weights=pos) / np.bincount(run)
    out = np.empty(n, dtype=np.float64)
    out[order] = mid[run]
    return out


def rank_scores(v, kind):
    """Score of each component: phi(midrank / (n+1))."""
    return _phi(midranks(v) / (v.size + 1.0), kind)


def pseudo_norm(v, kind):
    """Rank pseudo norm: sum of rank scores times components."""
    return float(rank_scores(v, kind) @ v)


def right_rank_deriv(w, slopes, kind):
    """Right derivative of t -> pseudo_norm(w + t*slopes) at t = 0.

    Just to the right of t, components order lexicographically by
    (value, slope); components tied in both stay tied and keep midranks.
    """
    n = w.size
    order = np.lexsort((slopes, w))
    sw = w[order]
    ss = slopes[order]
    head = np.empty(n, dtype=np.bool_)
    head[0] = True
    head[1:] = (sw[1:] != sw[:-1]) | (ss[1:] != ss[:-1])
    run = np.cumsum(head) - 1
    pos = np.arange(1, n + 1, dtype=np.float64)
    mid = np.bincount(run, weights=pos) / np.bincount(run)
    a = _phi(mid[run] / (n + 1.0), kind)
    return float(a @ ss)


def _hvar(rho, d, s_i, sigma, lam, t, kind):
    # variable part of the line objective: rank term plus the moving l1 term
    return pseudo_norm(rho - t * d, kind) + lam * abs(s_i + t * sigma)


def _hprime(rho, d, s_i, sigma, lam, t, kind):
    z = s_i + t * sigma
    if z > 0.0:
        dl1 = sigma
    elif z < 0.0:
        dl1 = -sigma
    else:
        dl1 = 1.0
    return right_rank_deriv(rho - t * d, -d, kind) + lam * dl1


def line_search(rho, col, s_i, sigma, lam, kind, tol, t_cap):
    """Minimize h(t) = ||rho - t*sigma*col||_phi + lam*|s_i + t*sigma| over t >= 0.

    h is convex piecewise linear; bisect on the sign of its right
    derivative. Returns (t, h(t), status) with status 0 = ok,
    1 = bracket growth hit t_cap (caller should stall), 2 = non-finite.
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
    # midpoint can overshoot past a steep kink; the lo end never increases h
    if h_lo < h_cand:
        return lo, h_lo, 0
    return cand, h_cand, 0
