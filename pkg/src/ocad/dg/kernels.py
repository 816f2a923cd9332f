"""Kernel backend selection: compiled extension when available, NumPy otherwise.

Dispatch is per operation: the compiled kernels win where loop fusion avoids
temporaries (min/max scans, mean-preserving scaling, flux combination), while
the plain modal-to-point product is a GEMM that BLAS already does best, so
``eval_points`` always uses the NumPy path (see benchmarks/bench_kernels.py).

Set ``OCAD_PURE_PYTHON=1`` to force the NumPy fallback everywhere.
``BACKEND`` names the active implementation; both expose the same four
functions and the test suite checks them against each other.
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("OCAD_PURE_PYTHON"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

eval_points = _kernels_py.eval_points  # GEMM: BLAS beats the fused loop
eval_minmax = _impl.eval_minmax
scale_about_mean = _impl.scale_about_mean
lf_flux = _impl.lf_flux
