"""Backend dispatch for the hot numeric kernels.

The numba backend is the default. Set ``NPSR_PURE_NUMPY=1`` to force the
vectorized pure-numpy fallback (also used automatically when numba cannot
be imported). ``BACKEND`` records which one is active.
"""

import os

WILCOXON = 0
SIGN = 1

_force_numpy = os.environ.get("NPSR_PURE_NUMPY", "").strip() not in ("", "0")

if _force_numpy:
    from . import _numpy as _impl

    BACKEND = "numpy"
else:
    try:
        from . import _numba as _impl

        BACKEND = "numba"
    except ImportError:
        from . import _numpy as _impl

        BACKEND = "numpy"

midranks = _impl.midranks
rank_scores = _impl.rank_scores
pseudo_norm = _impl.pseudo_norm
right_rank_deriv = _impl.right_rank_deriv
line_search = _impl.line_search
