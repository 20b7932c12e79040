"""Optional numba acceleration.

Set ``NLROTH_BACKEND=numpy`` to force the pure-numpy kernels even when numba
is importable.  Any other value (or unset) selects numba when available.
"""
import os
import warnings

try:
    import numba
    from numba import njit as _numba_njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is an optional extra
    numba = None
    HAVE_NUMBA = False

_requested = os.environ.get("NLROTH_BACKEND", "numba").strip().lower()
USE_NUMBA = HAVE_NUMBA and _requested != "numpy"
BACKEND = "numba" if USE_NUMBA else "numpy"


def njit(*args, **kwargs):
    """``numba.njit(cache=True)`` when numba is present, identity otherwise.

    The loop kernels stay callable as plain Python either way, which is what
    the tests use to cross-check small inputs.
    """
    kwargs.setdefault("cache", True)
    if HAVE_NUMBA:
        return _numba_njit(*args, **kwargs)
    if args and callable(args[0]) and len(args) == 1:
        return args[0]
    return lambda f: f


def set_threads(n):
    """Thread count for numba; results never depend on it (no kernel uses prange)."""
    if HAVE_NUMBA and n:
        with warnings.catch_warnings():
            # an old system TBB only disables one optional threading layer
            warnings.simplefilter("ignore", numba.NumbaWarning)
            numba.set_num_threads(max(1, min(int(n), numba.config.NUMBA_NUM_THREADS)))
