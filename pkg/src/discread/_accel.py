"""Numba switch.

Hot kernels are compiled with numba when it is importable, unless the
environment variable ``DISCREAD_DISABLE_NUMBA`` is set to a truthy value.
The flag is read once at import; tests flip ``USE_NUMBA`` directly.
"""

import os

_FALSY = ("", "0", "false", "no", "off")

try:
    import numba
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and os.environ.get("DISCREAD_DISABLE_NUMBA", "0").strip().lower() in _FALSY


def njit(*args, **kwargs):
    """``numba.njit`` when available, identity decorator otherwise."""
    if not HAVE_NUMBA:
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f
    return numba.njit(*args, **kwargs)


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
