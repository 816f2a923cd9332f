import math

import numpy as np
import pytest

from ocad.quadrature import gauss, gauss_lobatto, lobatto_L_for_degree


def exact_mean(m: int) -> float:
    """(1/2) * integral of x^m over [-1,1], computed directly."""
    return 1.0 / (m + 1) if m % 2 == 0 else 0.0


def test_gauss_small():
    r = gauss(1)
    assert r.nodes.tolist() == [0.0]
    assert r.weights.tolist() == [1.0]
    r = gauss(2)
    assert np.allclose(r.nodes, [-1 / math.sqrt(3), 1 / math.sqrt(3)])
    assert np.allclose(r.weights, [0.5, 0.5])
    r = gauss(3)
    assert np.allclose(r.weights, [5 / 18, 8 / 18, 5 / 18], atol=1e-15)


@pytest.mark.parametrize("Q", range(1, 13))
def test_gauss_exactness(Q):
    r = gauss(Q)
    for m in range(r.degree + 1):
        assert np.dot(r.weights, r.nodes**m) == pytest.approx(
            exact_mean(m), abs=1e-13
        )
    # one degree past the rule must fail (gap shrinks fast with Q)
    if Q <= 8:
        m = r.degree + 1
        assert abs(np.dot(r.weights, r.nodes**m) - exact_mean(m)) > 1e-6


def test_lobatto_small():
    r = gauss_lobatto(2)
    assert r.nodes.tolist() == [-1.0, 1.0]
    assert r.weights.tolist() == [0.5, 0.5]
    r = gauss_lobatto(3)
    assert np.allclose(r.weights, [1 / 6, 2 / 3, 1 / 6], atol=1e-15)
    r = gauss_lobatto(4)
    assert r.weights[0] == pytest.approx(1 / 12, abs=1e-16)
    assert np.allclose(np.abs(r.nodes[1:3]), 1 / math.sqrt(5))


@pytest.mark.parametrize("L", range(2, 13))
def test_lobatto_exactness_and_endpoints(L):
    r = gauss_lobatto(L)
    assert r.nodes[0] == -1.0 and r.nodes[-1] == 1.0
    assert r.weights[0] == r.weights[-1] == 1.0 / (L * (L - 1))
    for m in range(r.degree + 1):
        assert np.dot(r.weights, r.nodes**m) == pytest.approx(
            exact_mean(m), abs=1e-13
        )


@pytest.mark.parametrize("rule", [gauss(q) for q in (2, 5, 9)] + [gauss_lobatto(L) for L in (3, 6, 10)])
def test_symmetry_bitwise(rule):
    assert np.all(rule.nodes == -rule.nodes[::-1])
    assert np.all(rule.weights == rule.weights[::-1])
    assert np.all(np.diff(rule.nodes) > 0)
    assert rule.weights.sum() == pytest.approx(1.0, abs=1e-15)
    assert np.all(rule.weights > 0)


def test_lobatto_L_for_degree():
    assert lobatto_L_for_degree(2) == 3
    assert lobatto_L_for_degree(3) == 3
    assert lobatto_L_for_degree(9) == 6
    assert [lobatto_L_for_degree(k) for k in (1, 4, 5, 6, 7, 8)] == [2, 4, 4, 5, 5, 6]


def test_bad_arguments():
    with pytest.raises(ValueError):
        gauss(0)
    with pytest.raises(ValueError):
        gauss_lobatto(1)
    with pytest.raises(ValueError):
        lobatto_L_for_degree(0)
