"""Orthonormal modal tensor-Legendre basis truncated to total degree k.

Basis element m is ``sqrt(2i+1) P_i(xi) * sqrt(2j+1) P_j(eta)`` on the
reference cell, orthonormal under the cell-mean inner product, so the first
coefficient of any expansion is the cell average.  Mode order follows the
graded monomial ordering of the package.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from ..quadrature import gauss


def legendre_values(kmax: int, x: np.ndarray) -> np.ndarray:
    """Normalized Legendre values, shape (kmax+1, len(x))."""
    x = np.asarray(x, dtype=float)
    out = np.empty((kmax + 1, x.size))
    out[0] = 1.0
    if kmax >= 1:
        out[1] = x
    for n in range(2, kmax + 1):
        out[n] = ((2 * n - 1) * x * out[n - 1] - (n - 1) * out[n - 2]) / n
    scale = np.sqrt(2 * np.arange(kmax + 1) + 1.0)
    return out * scale[:, None]


def legendre_derivs(kmax: int, x: np.ndarray) -> np.ndarray:
    """Normalized Legendre derivatives via P'_n = P'_{n-2} + (2n-1) P_{n-1}."""
    x = np.asarray(x, dtype=float)
    plain = legendre_values(kmax, x) / np.sqrt(2 * np.arange(kmax + 1) + 1.0)[:, None]
    out = np.zeros((kmax + 1, x.size))
    if kmax >= 1:
        out[1] = 1.0
    for n in range(2, kmax + 1):
        out[n] = out[n - 2] + (2 * n - 1) * plain[n - 1]
    scale = np.sqrt(2 * np.arange(kmax + 1) + 1.0)
    return out * scale[:, None]


class ModalBasis:
    """Evaluation tables for the P^k modal basis on the reference cell."""

    def __init__(self, k: int):
        self.k = k
        self.exps = [(d - j, j) for d in range(k + 1) for j in range(d + 1)]
        self.nmodes = len(self.exps)
        self.face_q = k + 1
        face_rule = gauss(self.face_q)
        self.face_nodes = face_rule.nodes
        self.face_weights = face_rule.weights

        nv = k + 2
        vol_rule = gauss(nv)
        xq, yq = np.meshgrid(vol_rule.nodes, vol_rule.nodes, indexing="ij")
        self.vol_xy = np.column_stack([xq.ravel(), yq.ravel()])
        self.vol_weights = np.outer(vol_rule.weights, vol_rule.weights).ravel()

        self.b_vol = self.eval_matrix(self.vol_xy[:, 0], self.vol_xy[:, 1])
        self.dx_vol, self.dy_vol = self._deriv_matrices(
            self.vol_xy[:, 0], self.vol_xy[:, 1]
        )
        ones = np.ones(self.face_q)
        g = self.face_nodes
        self.b_face = {
            "xm": self.eval_matrix(-ones, g),
            "xp": self.eval_matrix(ones, g),
            "ym": self.eval_matrix(g, -ones),
            "yp": self.eval_matrix(g, ones),
        }
        self.b_face_all = np.ascontiguousarray(
            np.concatenate([self.b_face[k2] for k2 in ("xm", "xp", "ym", "yp")], axis=1)
        )
        # contraction tables: values (rows, q) @ table (q, modes) -> mean of f*phi
        w = self.face_weights
        self.face_mean = {key: (w[:, None] * mat.T) for key, mat in self.b_face.items()}
        wv = self.vol_weights
        self.vol_mean_dx = wv[:, None] * self.dx_vol.T
        self.vol_mean_dy = wv[:, None] * self.dy_vol.T
        self.project_table = (wv[:, None] * self.b_vol.T)

    def eval_matrix(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Basis values at reference points, shape (nmodes, npts)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        y = np.atleast_1d(np.asarray(y, dtype=float))
        lx = legendre_values(self.k, x)
        ly = legendre_values(self.k, y)
        return np.stack([lx[i] * ly[j] for i, j in self.exps])

    def _deriv_matrices(self, x: np.ndarray, y: np.ndarray):
        lx = legendre_values(self.k, x)
        ly = legendre_values(self.k, y)
        dlx = legendre_derivs(self.k, x)
        dly = legendre_derivs(self.k, y)
        dx = np.stack([dlx[i] * ly[j] for i, j in self.exps])
        dy = np.stack([lx[i] * dly[j] for i, j in self.exps])
        return dx, dy


@lru_cache(maxsize=None)
def modal_basis(k: int) -> ModalBasis:
    return ModalBasis(k)
