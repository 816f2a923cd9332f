"""Pure-NumPy implementations of the solver hot kernels.

Same signatures as the compiled module; all arrays are float64 and
C-contiguous, with the batch axis first.
"""

from __future__ import annotations

import numpy as np


def eval_points(coeffs: np.ndarray, table: np.ndarray) -> np.ndarray:
    """Modal-to-point values: (rows, nmodes) @ (nmodes, npts)."""
    return coeffs @ table


def eval_minmax(coeffs: np.ndarray, table: np.ndarray):
    """Per-row min and max of the point values, without keeping them."""
    vals = coeffs @ table
    return vals.min(axis=1), vals.max(axis=1)


def scale_about_mean(coeffs: np.ndarray, delta: np.ndarray) -> np.ndarray:
    """Scale all non-mean modes of each row by that row's factor."""
    out = coeffs.copy()
    out[:, 1:] *= delta[:, None]
    return out


def lf_flux(uL, uR, fL, fR, alpha: float) -> np.ndarray:
    """Lax-Friedrichs flux 0.5 (fL + fR) - 0.5 alpha (uR - uL)."""
    return 0.5 * (fL + fR) - 0.5 * alpha * (uR - uL)
