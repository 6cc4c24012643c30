"""Kernel backend selection.

Hot loops (radius iteration sweeps, vertex-weighted Dijkstra) are written in
nopython-compatible array style and compiled with numba when it is available.
Setting the environment variable CMOD_NUMBA=0 forces the pure-Python/numpy
fallback; CMOD_NUMBA=1 makes a missing numba an error instead of a silent
slowdown.
"""

import os

__all__ = ["BACKEND", "NUMBA_ENABLED", "jit"]


def _env_preference():
    raw = os.environ.get("CMOD_NUMBA", "").strip().lower()
    if raw in ("0", "false", "no", "off"):
        return False
    if raw in ("1", "true", "yes", "on"):
        return True
    return None


_pref = _env_preference()
NUMBA_ENABLED = False
if _pref is not False:
    try:
        from numba import njit as _njit

        NUMBA_ENABLED = True
    except ImportError:
        if _pref is True:
            raise ImportError("CMOD_NUMBA=1 but numba is not importable")

BACKEND = "numba" if NUMBA_ENABLED else "numpy"


def jit(fn):
    """Compile ``fn`` with numba when enabled, else return it unchanged.

    Both paths run the same statements in the same order, so results agree
    up to libm rounding differences.
    """
    if NUMBA_ENABLED:
        return _njit(cache=True)(fn)
    return fn
