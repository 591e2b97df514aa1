"""Backend agreement: the numba kernels and the pure-numpy fallback must
rank identically and accumulate to floating-point rounding."""

import os
import subprocess
import sys

import numpy as np
import pytest

from npsr.kernels import _numba as knb
from npsr.kernels import _numpy as knp


def _cases(n_cases=300, seed=0):
    rng = np.random.default_rng(seed)
    for _ in range(n_cases):
        n = int(rng.integers(2, 60))
        if rng.random() < 0.4:
            v = np.round(rng.normal(size=n), 1)  # tie-heavy
        else:
            v = rng.normal(size=n)
        yield rng, v


@pytest.mark.parametrize("kind", [0, 1])
def test_midranks_and_scores_identical(kind):
    for _, v in _cases():
        np.testing.assert_array_equal(knp.midranks(v), knb.midranks(v))
        np.testing.assert_array_equal(knp.rank_scores(v, kind), knb.rank_scores(v, kind))


@pytest.mark.parametrize("kind", [0, 1])
def test_pseudo_norm_agreement(kind):
    for _, v in _cases():
        a, b = knp.pseudo_norm(v, kind), knb.pseudo_norm(v, kind)
        assert a == pytest.approx(b, rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("kind", [0, 1])
def test_right_rank_deriv_agreement(kind):
    for rng, v in _cases():
        slopes = np.round(rng.normal(size=v.size), 1)
        a = knp.right_rank_deriv(v, slopes, kind)
        b = knb.right_rank_deriv(v, slopes, kind)
        assert a == pytest.approx(b, rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("kind", [0, 1])
def test_line_search_agreement(kind):
    rng = np.random.default_rng(3)
    for _ in range(100):
        m = int(rng.integers(3, 30))
        rho = rng.normal(size=m)
        col = rng.normal(size=m) / np.sqrt(m)
        s_i = float(rng.normal())
        sigma = 1.0 if rng.random() < 0.5 else -1.0
        lam = float(rng.uniform(0.01, 1.0))
        ta, ha, sa = knp.line_search(rho, col, s_i, sigma, lam, kind, 1e-10, 1e15)
        tb, hb, sb = knb.line_search(rho, col, s_i, sigma, lam, kind, 1e-10, 1e15)
        assert sa == sb
        assert ta == pytest.approx(tb, rel=1e-6, abs=1e-9)
        assert ha == pytest.approx(hb, rel=1e-9, abs=1e-12)


def test_env_flag_selects_numpy_backend():
    env = dict(os.environ, NPSR_PURE_NUMPY="1")
    out = subprocess.run(
        [sys.executable, "-c", "from npsr import kernels; print(kernels.BACKEND)"],
        capture_output=True, text=True, env=env, check=True,
    )
    assert out.stdout.strip() == "numpy"


def test_default_backend_is_numba():
    env = {k: v for k, v in os.environ.items() if k != "NPSR_PURE_NUMPY"}
    out = subprocess.run(
        [sys.executable, "-c", "from npsr import kernels; print(kernels.BACKEND)"],
        capture_output=True, text=True, env=env, check=True,
    )
    assert out.stdout.strip() == "numba"
