"""Backend selection for the numerical hot loops.

The compiled extension is used when it was built and imports cleanly. Setting
the environment variable ``COUNTERWAVE_PURE_PYTHON=1`` forces the pure-Python
fallback, which is also what the benchmark compares against.
"""
import os

if os.environ.get("COUNTERWAVE_PURE_PYTHON", "") not in ("", "0"):
    from . import _kernels_py as _impl
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as _impl
        BACKEND = "python"

carlson_rf = _impl.carlson_rf
carlson_rd = _impl.carlson_rd
jacobi_am = _impl.jacobi_am
jacobi_am_array = _impl.jacobi_am_array
mathieu_half_period = _impl.mathieu_half_period

__all__ = ["BACKEND", "carlson_rf", "carlson_rd", "jacobi_am", "jacobi_am_array",
           "mathieu_half_period"]
