"""Plane-wave summation kernels.

The compiled extension is used when importable; otherwise the numpy
implementation.  Set ``KLEINFLOW_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _pykernels as python_backend

compiled_backend = None
if not os.environ.get("KLEINFLOW_PURE_PYTHON"):
    try:
        from . import _ckernels as compiled_backend
    except ImportError:
        compiled_backend = None

if compiled_backend is not None:
    BACKEND = "cython"
    plane_wave_sum = compiled_backend.plane_wave_sum
    current_at = compiled_backend.current_at
else:
    BACKEND = "python"
    plane_wave_sum = python_backend.plane_wave_sum
    current_at = python_backend.current_at

__all__ = ["BACKEND", "plane_wave_sum", "current_at", "python_backend",
           "compiled_backend"]
