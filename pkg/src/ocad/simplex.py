"""Dense two-phase simplex for small LPs in standard form.

Solves ``max c.x  s.t.  A x = b, x >= 0``.  Sized for the decomposition
oracles in this package: a handful of equality rows against up to a few
thousand candidate columns.  Dantzig pricing with a Bland fallback after a
stall, which is enough anti-cycling for these degenerate moment problems.
"""

from __future__ import annotations

import numpy as np

__all__ = ["SimplexError", "InfeasibleError", "UnboundedError", "solve_lp"]

_PIVOT_TOL = 1e-11
_STALL_LIMIT = 500


class SimplexError(Exception):
    pass


class InfeasibleError(SimplexError):
    pass


class UnboundedError(SimplexError):
    pass


def _pivot(T: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    piv_row = T[row]
    factors = T[:, col].copy()
    factors[row] = 0.0
    T -= np.outer(factors, piv_row)
    T[:, col] = 0.0
    T[row, col] = 1.0
    basis[row] = col


def _run(T: np.ndarray, basis: np.ndarray, ncols: int, max_iter: int) -> None:
    """Drive the tableau (objective in last row, rhs in last column) to optimality."""
    stall = 0
    last_obj = T[-1, -1]
    for it in range(max_iter):
        costs = T[-1, :ncols]
        bland = stall > _STALL_LIMIT
        if bland:
            neg = np.nonzero(costs < -_PIVOT_TOL)[0]
            if neg.size == 0:
                return
            col = int(neg[0])
        else:
            col = int(np.argmin(costs))
            if costs[col] >= -_PIVOT_TOL:
                return
        ratios = np.full(T.shape[0] - 1, np.inf)
        column = T[:-1, col]
        positive = column > _PIVOT_TOL
        ratios[positive] = T[:-1, -1][positive] / column[positive]
        row = int(np.argmin(ratios))
        if not np.isfinite(ratios[row]):
            raise UnboundedError("objective is unbounded")
        if bland:
            # smallest basis index among the tied minimal ratios
            tied = np.nonzero(ratios <= ratios[row] + 1e-15)[0]
            row = int(tied[np.argmin(basis[tied])])
        _pivot(T, basis, row, col)
        if T[-1, -1] > last_obj + 1e-13:
            stall = 0
            last_obj = T[-1, -1]
        else:
            stall += 1
    raise SimplexError("iteration limit exceeded")


def solve_lp(c: np.ndarray, A: np.ndarray, b: np.ndarray, max_iter: int = 50000):
    """Maximize ``c.x`` subject to ``A x = b`` and ``x >= 0``.

    Returns ``(x, value)``; raises :class:`InfeasibleError` or
    :class:`UnboundedError` accordingly.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float).copy()
    c = np.asarray(c, dtype=float)
    m, n = A.shape
    A = A.copy()
    flip = b < 0
    A[flip] *= -1.0
    b[flip] *= -1.0

    # phase 1: minimize the sum of artificials
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n : n + m] = np.eye(m)
    T[:m, -1] = b
    T[-1, :n] = -A.sum(axis=0)
    T[-1, -1] = -b.sum()
    basis = np.arange(n, n + m)
    _run(T, basis, n, max_iter)
    if T[-1, -1] < -1e-8:
        raise InfeasibleError(f"phase-1 objective {-T[-1, -1]:.3e} > 0")
    # drive remaining artificials out of the basis where possible
    for row in range(m):
        if basis[row] >= n:
            cols = np.nonzero(np.abs(T[row, :n]) > _PIVOT_TOL)[0]
            if cols.size:
                _pivot(T, basis, row, int(cols[0]))

    keep = basis < n
    rows = np.nonzero(keep)[0]
    T2 = np.zeros((len(rows) + 1, n + 1))
    T2[:-1, :n] = T[rows, :n]
    T2[:-1, -1] = T[rows, -1]
    basis2 = basis[rows].copy()
    # phase 2 objective (maximize c.x == minimize -c.x)
    T2[-1, :n] = -c
    for r, col in enumerate(basis2):
        T2[-1] -= T2[-1, col] * T2[r]
    _run(T2, basis2, n, max_iter)

    x = np.zeros(n)
    x[basis2] = T2[:-1, -1]
    return x, float(c @ x)
