"""Hot numeric kernels with two interchangeable backends.

The numba backend (default) JIT-compiles the inner loops; the numpy backend
is a vectorized fallback with identical semantics. Selection:

* ``GRASPGEN_NO_NUMBA=1`` in the environment forces the numpy backend;
* otherwise numba is used when importable, numpy when not.

``benchmarks/bench_kernels.py`` times the two side by side.
"""

import os

__all__ = ["BACKEND", "quad_mask", "quad_pair_counts", "fill_missing"]


def _want_numpy():
    flag = os.environ.get("GRASPGEN_NO_NUMBA", "").strip().lower()
    return flag not in ("", "0", "false", "no")


if _want_numpy():
    from . import numpy_impl as _impl

    BACKEND = "numpy"
else:
    try:
        from . import numba_impl as _impl

        BACKEND = "numba"
    except ImportError:
        from . import numpy_impl as _impl

        BACKEND = "numpy"

quad_mask = _impl.quad_mask
quad_pair_counts = _impl.quad_pair_counts
fill_missing = _impl.fill_missing
