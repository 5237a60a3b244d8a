"""Select between numba-compiled kernels and the numpy fallbacks.

Set ``FLATLIFT_JIT=0`` before import to force the numpy path.
"""
import os

_flag = os.environ.get("FLATLIFT_JIT", "1").strip().lower()
_requested = _flag not in ("0", "false", "no", "off")

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = _requested and HAVE_NUMBA


def njit(fn):
    """Compile ``fn`` with numba when available, else return it unchanged."""
    if HAVE_NUMBA:
        return numba.njit(cache=True)(fn)
    return fn
