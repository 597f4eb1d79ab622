"""Numeric kernel backend selection.

Kernels in ``core`` are written as plain numpy functions and compiled with
numba by default. Setting ``SCPKIT_PURE_NUMPY=1`` in the environment selects
the uncompiled pure-numpy path (also the automatic fallback when numba is not
importable). ``benchmarks/bench_kernels.py`` compares the two paths.
"""
import os
import warnings

_flag = os.environ.get("SCPKIT_PURE_NUMPY", "").strip()
FORCE_NUMPY = _flag not in ("", "0")

if FORCE_NUMPY:
    BACKEND = "numpy"
else:
    try:
        import numba  # noqa: F401

        BACKEND = "numba"
    except ImportError:  # pragma: no cover - depends on environment
        warnings.warn("numba not importable; scpkit kernels run as pure numpy")
        BACKEND = "numpy"

if BACKEND == "numba":
    from numba import njit

    def jit(fn):
        return njit(cache=True, nogil=True)(fn)

else:

    def jit(fn):
        return fn
