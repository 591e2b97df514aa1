"""Score functions, midrank ranking, and the rank pseudo norm.

The rank pseudo norm of a vector v is sum_i a(R(v_i)) * v_i, where R gives
ascending ranks (midranks under ties) and the score a(i) = phi(i/(n+1)) is
generated by a nondecreasing, zero-integral score generator phi. Two
generators are built in:

* wilcoxon: phi(x) = sqrt(12) * (x - 0.5)
* sign:     phi(x) = sgn(2x - 1)

The pseudo norm is nonnegative, absolutely homogeneous, satisfies the
triangle inequality, and vanishes exactly on constant vectors, which makes
it insensitive to the scale of heavy-tailed residual outliers.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels

SCORE_KINDS = ("wilcoxon", "sign")

_KIND_CODES = {"wilcoxon": kernels.WILCOXON, "sign": kernels.SIGN}


@dataclass(frozen=True)
class ScoreFunction:
    """Selects the score generator phi used to turn ranks into scores."""

    kind: str = "wilcoxon"

    def __post_init__(self):
        if self.kind not in SCORE_KINDS:
            raise ValueError(
                f"unknown score kind {self.kind!r}; expected one of {SCORE_KINDS}"
            )

    @property
    def code(self):
        return _KIND_CODES[self.kind]


def _as_score(sf):
    if isinstance(sf, ScoreFunction):
        return sf
    return ScoreFunction(sf)


def _as_vector(v, name="v"):
    arr = np.ascontiguousarray(v, dtype=np.float64)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError(f"{name} must be a nonempty 1-d vector")
    return arr


def score_vector(n, sf="wilcoxon"):
    """Scores (a(1), ..., a(n)) with a(i) = phi(i/(n+1)).

    The result is nondecreasing, sums to zero, and is antisymmetric:
    a(i) = -a(n+1-i).
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    sf = _as_score(sf)
    x = np.arange(1, n + 1, dtype=np.float64) / (n + 1.0)
    if sf.kind == "wilcoxon":
        return np.sqrt(12.0) * (x - 0.5)
    return np.sign(2.0 * x - 1.0)


def ranks_midrank(v):
    """Ascending ranks of v; tied entries share the mean of their positions.

    Without ties the result is a permutation of 1..n; the rank sum is
    always n(n+1)/2.
    """
    arr = _as_vector(v)
    if not np.all(np.isfinite(arr)):
        raise ValueError("ranks require finite components")
    return kernels.midranks(arr)


def rank_pseudo_norm(v, sf="wilcoxon"):
    """Rank pseudo norm sum_i phi(R(v_i)/(n+1)) * v_i (midranks under ties)."""
    arr = _as_vector(v)
    if not np.all(np.isfinite(arr)):
        raise ValueError("rank pseudo norm requires finite components")
    return kernels.pseudo_norm(arr, _as_score(sf).code)
