"""Numba switch.

Set ``SHADOWCAP_PURE_NUMPY=1`` in the environment to run every kernel through
its pure-numpy twin instead of the jitted loop version. The flag is read once,
at import time.
"""

import os

_FLAG = "SHADOWCAP_PURE_NUMPY"

try:
    from numba import njit, prange

    NUMBA_AVAILABLE = True
    if "NUMBA_THREADING_LAYER" not in os.environ:
        import numba

        # the bundled TBB is often too old and numba warns on every probe
        numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def decorator(func):
            return func

        return decorator

    prange = range


def _flag_set() -> bool:
    return os.environ.get(_FLAG, "").strip().lower() in {"1", "true", "yes", "on"}


USE_NUMBA = NUMBA_AVAILABLE and not _flag_set()

__all__ = ["njit", "prange", "NUMBA_AVAILABLE", "USE_NUMBA"]
