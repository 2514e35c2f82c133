"""Kernel backend selection.

Hot loops are written once as explicit numba-friendly loops and once as
vectorised numpy. ``jit_or(fallback)`` compiles the loop with ``@njit`` when
numba is importable, otherwise it hands back the numpy version. Setting
``SIMPLEXANGLES_BACKEND=numpy`` (or ``SIMPLEXANGLES_DISABLE_NUMBA=1``) forces
the numpy path.
"""
import os

_requested = os.environ.get("SIMPLEXANGLES_BACKEND", "").strip().lower()
_disabled = os.environ.get("SIMPLEXANGLES_DISABLE_NUMBA", "").strip() not in ("", "0")

try:
    if _disabled or _requested == "numpy":
        raise ImportError("numba disabled by environment")
    import numba
except ImportError:
    numba = None

HAVE_NUMBA = numba is not None
BACKEND = "numba" if HAVE_NUMBA else "numpy"


def compile_loop(func):
    return numba.njit(cache=True, nogil=True)(func)


def jit_or(fallback):
    def decorate(loop):
        if HAVE_NUMBA:
            compiled = compile_loop(loop)
            compiled.py_loop = loop
            compiled.numpy_impl = fallback
            return compiled
        fallback.py_loop = loop
        fallback.numpy_impl = fallback
        return fallback

    return decorate
