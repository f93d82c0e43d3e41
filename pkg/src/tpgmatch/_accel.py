"""Numba switch.

Set ``TPGMATCH_DISABLE_NUMBA=1`` before import to force the pure-numpy kernels.
"""
import os

_flag = os.environ.get("TPGMATCH_DISABLE_NUMBA", "").strip().lower()
DISABLED_BY_ENV = _flag in ("1", "true", "yes", "on")

try:
    import numba
    HAS_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and not DISABLED_BY_ENV


def njit(func):
    # compiled lazily on first call; callers pick the numba or numpy variant
    if HAS_NUMBA:
        return numba.njit(cache=True)(func)
    return func  # pragma: no cover
