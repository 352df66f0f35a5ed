"""Numba switch for the hot kernels.

Numba-compiled kernels are used when numba imports and the environment
variable ``OSCBOUND_DISABLE_NUMBA`` is unset (or falsy).  Setting it to
``1`` routes every dispatcher in :mod:`oscbound.kernels` to the pure-numpy
implementations, which compute the same quantities.
"""

import os

DISABLE_ENV = "OSCBOUND_DISABLE_NUMBA"

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False


def numba_disabled_by_env() -> bool:
    return os.environ.get(DISABLE_ENV, "").strip().lower() in {"1", "true", "yes", "on"}


USE_NUMBA = HAVE_NUMBA and not numba_disabled_by_env()


def njit(func=None, **opts):
    """``numba.njit(cache=True)``; identity decorator when numba is missing."""
    if func is None:
        return lambda f: njit(f, **opts)
    if not HAVE_NUMBA:
        return func
    opts.setdefault("cache", True)
    return numba.njit(**opts)(func)
