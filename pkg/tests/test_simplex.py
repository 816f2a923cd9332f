import itertools

import numpy as np
import pytest

from ocad.simplex import InfeasibleError, UnboundedError, solve_lp


def test_simple_max():
    # max x1 + x2 st x1 + 2 x2 + s = 4, x1 <= 3 -> x1=3, x2=0.5
    A = np.array([[1.0, 2.0, 1.0, 0.0], [1.0, 0.0, 0.0, 1.0]])
    b = np.array([4.0, 3.0])
    c = np.array([1.0, 1.0, 0.0, 0.0])
    x, val = solve_lp(c, A, b)
    assert val == pytest.approx(3.5)
    assert x[0] == pytest.approx(3.0)


def test_negative_rhs_rows_are_flipped():
    A = np.array([[-1.0, -1.0]])
    b = np.array([-2.0])
    c = np.array([1.0, 0.0])
    x, val = solve_lp(c, A, b)
    assert val == pytest.approx(2.0)


def test_infeasible():
    A = np.array([[1.0, 1.0], [1.0, 1.0]])
    b = np.array([1.0, 2.0])
    with pytest.raises(InfeasibleError):
        solve_lp(np.array([1.0, 0.0]), A, b)


def test_unbounded():
    # max x1 st x1 - x2 = 1: x1 = 1 + x2 grows without bound
    A = np.array([[1.0, -1.0]])
    b = np.array([1.0])
    with pytest.raises(UnboundedError):
        solve_lp(np.array([1.0, 0.0]), A, b)


def test_degenerate_lp():
    # multiple optimal bases; optimum value is still unique
    A = np.array([[1.0, 1.0, 1.0, 0.0], [1.0, 1.0, 0.0, 1.0]])
    b = np.array([1.0, 1.0])
    c = np.array([1.0, 1.0, 0.0, 0.0])
    _, val = solve_lp(c, A, b)
    assert val == pytest.approx(1.0)


def _brute_force(c, A, b):
    """Enumerate basic feasible solutions of Ax=b, x>=0 (tiny LPs only)."""
    m, n = A.shape
    best = None
    for cols in itertools.combinations(range(n), m):
        B = A[:, cols]
        if abs(np.linalg.det(B)) < 1e-10:
            continue
        xb = np.linalg.solve(B, b)
        if np.all(xb >= -1e-9):
            x = np.zeros(n)
            x[list(cols)] = xb
            val = c @ x
            if best is None or val > best:
                best = val
    return best


def test_against_brute_force_enumeration():
    rng = np.random.default_rng(11)
    for trial in range(30):
        m, n = 3, 6
        A = rng.standard_normal((m, n))
        x_feas = rng.uniform(0.1, 1.0, n)
        b = A @ x_feas  # guarantees feasibility
        c = rng.standard_normal(n)
        ref = _brute_force(c, A, b)
        if ref is None:
            continue
        try:
            _, val = solve_lp(c, A, b)
        except UnboundedError:
            continue
        assert val == pytest.approx(ref, abs=1e-8)


def test_solution_satisfies_constraints():
    rng = np.random.default_rng(12)
    A = rng.standard_normal((4, 40))
    x_feas = rng.uniform(0.0, 1.0, 40)
    b = A @ x_feas
    c = rng.standard_normal(40)
    try:
        x, _ = solve_lp(c, A, b)
    except UnboundedError:
        return
    assert np.all(x >= -1e-9)
    assert np.allclose(A @ x, b, atol=1e-8)
