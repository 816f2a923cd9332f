import numpy as np
import pytest

from ocad.polyspace import (
    Polynomial2D,
    SpaceId,
    SymOrbit,
    cell_average,
    exponents,
    face_average_signed,
    face_average_x,
    face_average_y,
    from_legendre,
    invariant_basis_gf,
    invariant_basis_gs,
    legendre_matrix,
    monomial_basis,
    orbit_average,
    poly_mul,
    to_legendre,
)


def _mono(space, i, j):
    c = np.zeros(space.dim)
    c[exponents(space).index((i, j))] = 1.0
    return Polynomial2D(space, c)


def test_dims():
    assert SpaceId("P", 1).dim == 3
    assert SpaceId("Q", 1).dim == 4
    assert SpaceId("P", 3).dim == 10
    assert SpaceId("Q", 3).dim == 16


def test_monomial_basis_small_spaces():
    assert [e for e in exponents(SpaceId("P", 1))] == [(0, 0), (1, 0), (0, 1)]
    assert [e for e in exponents(SpaceId("Q", 1))] == [(0, 0), (1, 0), (0, 1), (1, 1)]
    assert len(monomial_basis(SpaceId("P", 3))) == 10


def test_graded_order_is_frozen():
    # total degree first, then descending x power
    assert exponents(SpaceId("P", 2)) == ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))


def test_invariant_basis_gs():
    def exps_of(b):
        return {
            e for c, e in zip(b.coeffs, exponents(b.space)) if c != 0.0
        }

    basis = invariant_basis_gs(SpaceId("P", 3))
    assert [exps_of(b) for b in basis] == [{(0, 0)}, {(2, 0)}, {(0, 2)}]
    assert len(invariant_basis_gs(SpaceId("P", 1))) == 1
    assert len(invariant_basis_gs(SpaceId("P", 5))) == 6


def test_invariant_basis_gf():
    b2 = invariant_basis_gf(2)
    assert len(b2) == 1 + 1  # 1 and x^2+y^2
    assert len(invariant_basis_gf(4)) == 4
    assert len(invariant_basis_gf(0)) == 1
    # each element is swap- and reflection-invariant at random points
    rng = np.random.default_rng(0)
    pts = rng.uniform(-1, 1, size=(20, 2))
    for b in invariant_basis_gf(6):
        v = b(pts[:, 0], pts[:, 1])
        assert np.allclose(b(-pts[:, 0], pts[:, 1]), v, atol=1e-13)
        assert np.allclose(b(pts[:, 1], pts[:, 0]), v, atol=1e-13)


def test_invariant_bases_linearly_independent():
    rng = np.random.default_rng(1)
    for basis in (invariant_basis_gs(SpaceId("P", 7)), invariant_basis_gf(9)):
        pts = rng.uniform(-1, 1, size=(len(basis) * 3, 2))
        M = np.stack([b(pts[:, 0], pts[:, 1]) for b in basis], axis=1)
        assert np.linalg.matrix_rank(M, tol=1e-8) == len(basis)


def test_cell_and_face_averages():
    p6 = SpaceId("P", 6)
    assert cell_average(_mono(p6, 0, 0)) == 1.0
    assert cell_average(_mono(p6, 2, 0)) == pytest.approx(1 / 3, abs=1e-16)
    assert face_average_x(_mono(p6, 2, 0)) == 1.0
    assert face_average_y(_mono(p6, 2, 0)) == pytest.approx(1 / 3, abs=1e-16)
    assert cell_average(_mono(p6, 4, 0)) == pytest.approx(1 / 5, abs=1e-16)
    assert cell_average(_mono(p6, 2, 2)) == pytest.approx(1 / 9, abs=1e-16)
    assert face_average_x(_mono(p6, 2, 2)) == pytest.approx(1 / 3, abs=1e-16)
    assert cell_average(_mono(p6, 1, 0)) == 0.0


def test_face_average_signed():
    p3 = SpaceId("P", 3)
    x = _mono(p3, 1, 0)
    assert face_average_signed(x, "+x") == 1.0
    assert face_average_signed(x, "-x") == -1.0
    assert face_average_signed(x, "+y") == 0.0


def test_averages_against_quadrature_oracle():
    """Cross-check closed-form averages with a dense midpoint rule."""
    rng = np.random.default_rng(2)
    n = 400
    g = (np.arange(n) + 0.5) / n * 2 - 1
    X, Y = np.meshgrid(g, g, indexing="ij")
    space = SpaceId("P", 5)
    for _ in range(5):
        p = Polynomial2D(space, rng.standard_normal(space.dim))
        approx = p(X, Y).mean()
        assert cell_average(p) == pytest.approx(approx, abs=5e-4)
        approx_fx = 0.5 * (p(1.0, g).mean() + p(-1.0, g).mean())
        assert face_average_x(p) == pytest.approx(approx_fx, abs=5e-4)


def test_orbit_average_examples():
    p2 = SpaceId("P", 2)
    x = _mono(p2, 1, 0)
    x2 = _mono(p2, 2, 0)
    assert orbit_average(x, SymOrbit(0.5, 0.5, 1.0, "gs")) == 0.0
    assert orbit_average(x2, SymOrbit(0.5, 0.0, 1.0, "gs")) == pytest.approx(0.25)
    a, b = 0.3, 0.8
    assert orbit_average(x2, SymOrbit(a, b, 1.0, "gf")) == pytest.approx(
        (a * a + b * b) / 2
    )


def test_averages_reflection_invariant():
    """Averages are unchanged when the polynomial is reflected."""
    rng = np.random.default_rng(3)
    space = SpaceId("P", 4)
    exps = exponents(space)
    for _ in range(10):
        c = rng.standard_normal(space.dim)
        p = Polynomial2D(space, c)
        for sx, sy in ((-1, 1), (1, -1), (-1, -1)):
            cg = np.array(
                [ci * sx**i * sy**j for ci, (i, j) in zip(c, exps)]
            )
            g = Polynomial2D(space, cg)
            assert cell_average(g) == pytest.approx(cell_average(p), abs=1e-14)
            orb = SymOrbit(0.37, 0.91, 1.0, "gs")
            assert orbit_average(g, orb) == pytest.approx(
                orbit_average(p, orb), abs=1e-13
            )


def test_cell_average_linear():
    rng = np.random.default_rng(4)
    space = SpaceId("Q", 3)
    p = Polynomial2D(space, rng.standard_normal(space.dim))
    q = Polynomial2D(space, rng.standard_normal(space.dim))
    a, b = 0.7, -2.3
    combo = Polynomial2D(space, a * p.coeffs + b * q.coeffs)
    assert cell_average(combo) == pytest.approx(
        a * cell_average(p) + b * cell_average(q), abs=1e-14
    )


def test_poly_mul_matches_pointwise_product():
    rng = np.random.default_rng(5)
    sp = SpaceId("P", 3)
    p = Polynomial2D(sp, rng.standard_normal(sp.dim))
    q = Polynomial2D(sp, rng.standard_normal(sp.dim))
    prod = poly_mul(p, q)
    assert prod.space.degree == 6
    pts = rng.uniform(-1, 1, size=(30, 2))
    assert np.allclose(
        prod(pts[:, 0], pts[:, 1]),
        p(pts[:, 0], pts[:, 1]) * q(pts[:, 0], pts[:, 1]),
        atol=1e-12,
    )


def test_partial_derivatives():
    sp = SpaceId("P", 3)
    p = _mono(sp, 2, 1)  # x^2 y
    px = p.partial("x")
    py = p.partial("y")
    assert px(0.5, 0.25) == pytest.approx(2 * 0.5 * 0.25)
    assert py(0.5, 0.25) == pytest.approx(0.25)


def test_legendre_round_trip_and_orthonormality():
    rng = np.random.default_rng(6)
    space = SpaceId("P", 6)
    c = rng.standard_normal(space.dim)
    p = Polynomial2D(space, c)
    back = from_legendre(space, to_legendre(p))
    assert np.allclose(back.coeffs, c, atol=1e-11)
    # basis column (0,0) is the constant 1
    C = legendre_matrix(space)
    assert C[0, 0] == pytest.approx(1.0)


def test_validation_errors():
    with pytest.raises(ValueError):
        SpaceId("R", 2)
    with pytest.raises(ValueError):
        SymOrbit(1.2, 0.0, 1.0)
    with pytest.raises(ValueError):
        SymOrbit(0.5, 0.5, -1.0)
    with pytest.raises(ValueError):
        Polynomial2D(SpaceId("P", 1), np.zeros(5))
