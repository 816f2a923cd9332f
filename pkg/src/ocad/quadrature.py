"""Gauss-Legendre and Gauss-Lobatto rules on [-1,1], weights normalized to sum 1.

The normalization follows the mean-value convention used everywhere in this
package: ``sum(w_i f(x_i))`` approximates ``(1/2) * integral of f``.  The raw
measure-2 weights are recovered by multiplying by 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["QuadRule1D", "gauss", "gauss_lobatto", "lobatto_L_for_degree"]

_NEWTON_TOL = 1e-15
_NEWTON_MAXIT = 100


@dataclass(frozen=True)
class QuadRule1D:
    """1D quadrature rule: ascending nodes in [-1,1], positive weights, sum 1."""

    nodes: np.ndarray
    weights: np.ndarray
    degree: int  # highest polynomial degree integrated exactly

    def __post_init__(self):
        object.__setattr__(self, "nodes", np.asarray(self.nodes, dtype=float))
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))


def _legendre(n: int, x: np.ndarray) -> np.ndarray:
    """P_n(x) by the three-term recurrence."""
    p0 = np.ones_like(x)
    if n == 0:
        return p0
    p1 = x.copy()
    for m in range(2, n + 1):
        p0, p1 = p1, ((2 * m - 1) * x * p1 - (m - 1) * p0) / m
    return p1


def _legendre_and_deriv(n: int, x: np.ndarray):
    """P_n(x) and P_n'(x); only valid away from the endpoints."""
    p0 = np.ones_like(x)
    if n == 0:
        return p0, np.zeros_like(x)
    p1 = x.copy()
    for m in range(2, n + 1):
        p0, p1 = p1, ((2 * m - 1) * x * p1 - (m - 1) * p0) / m
    dp = n * (x * p1 - p0) / (x * x - 1.0)
    return p1, dp


def _symmetrize(nodes: np.ndarray, weights: np.ndarray):
    nodes = 0.5 * (nodes - nodes[::-1])
    weights = 0.5 * (weights + weights[::-1])
    mid = len(nodes) // 2
    if len(nodes) % 2 == 1:
        nodes[mid] = 0.0
    return nodes, weights


def gauss(Q: int) -> QuadRule1D:
    """Q-point Gauss-Legendre rule, exact through degree 2Q-1."""
    if Q < 1:
        raise ValueError("Q must be >= 1")
    if Q == 1:
        return QuadRule1D(np.array([0.0]), np.array([1.0]), 1)
    i = np.arange(1, Q + 1)
    x = -np.cos(np.pi * (4 * i - 1) / (4 * Q + 2))  # Chebyshev initial guess
    for it in range(_NEWTON_MAXIT):
        p, dp = _legendre_and_deriv(Q, x)
        dx = p / dp
        x -= dx
        if np.max(np.abs(dx)) <= _NEWTON_TOL:
            break
    else:
        raise RuntimeError(f"Gauss Newton iteration failed to converge for Q={Q}")
    _, dp = _legendre_and_deriv(Q, x)
    w = 1.0 / ((1.0 - x * x) * dp * dp)  # normalized: raw weight / 2
    x, w = _symmetrize(x, w)
    return QuadRule1D(x, w, 2 * Q - 1)


def gauss_lobatto(L: int) -> QuadRule1D:
    """L-point Gauss-Lobatto rule including +-1, exact through degree 2L-3.

    Endpoint weights are exactly 1/(L(L-1)).
    """
    if L < 2:
        raise ValueError("L must be >= 2")
    n = L - 1
    x = np.empty(L)
    x[0], x[-1] = -1.0, 1.0
    if L > 2:
        # interior nodes are the roots of P'_{L-1}
        y = -np.cos(np.pi * np.arange(1, n) / n)  # Chebyshev-Lobatto guess
        for it in range(_NEWTON_MAXIT):
            p, dp = _legendre_and_deriv(n, y)
            d2p = (2.0 * y * dp - n * (n + 1) * p) / (1.0 - y * y)
            dy = dp / d2p
            y -= dy
            if np.max(np.abs(dy)) <= _NEWTON_TOL:
                break
        else:
            raise RuntimeError(
                f"Gauss-Lobatto Newton iteration failed to converge for L={L}"
            )
        x[1:-1] = y
    p = _legendre(n, x)
    w = 1.0 / (L * (L - 1) * p * p)  # normalized: raw weight / 2
    w[0] = w[-1] = 1.0 / (L * (L - 1))
    x, w = _symmetrize(x, w)
    return QuadRule1D(x, w, 2 * L - 3)


def lobatto_L_for_degree(k: int) -> int:
    """Smallest Lobatto point count exact on degree k: ceil((k+3)/2)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return math.ceil((k + 3) / 2)
