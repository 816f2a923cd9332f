import math

import numpy as np
import pytest

from ocad.cad import (
    CAD1D,
    GeneralCAD,
    SymmetricCAD,
    bp_cfl_dt,
    convex_combine,
    expand,
    from_json,
    load,
    reflect_theta,
    save,
    theta_of,
    to_json,
    to_physical,
    verify_feasibility,
)
from ocad.constructors import classic_2d, ocad_p2p3, ocad_pk, ocad_pk_theta_pm1
from ocad.polyspace import Polynomial2D, SpaceId, SymOrbit, face_average_signed


def _decomposition_value(cad, p):
    """Evaluate the right-hand side of a decomposition applied to p."""
    if isinstance(cad, SymmetricCAD):
        from ocad.polyspace import face_average_x, face_average_y, orbit_average

        val = cad.boundary_weight * (
            (1 + cad.theta) * face_average_x(p) + (1 - cad.theta) * face_average_y(p)
        )
        return val + sum(o.weight * orbit_average(p, o) for o in cad.orbits)
    w1m, w1p, w2m, w2p = cad.boundary_weights
    val = (
        w1m * face_average_signed(p, "-x")
        + w1p * face_average_signed(p, "+x")
        + w2m * face_average_signed(p, "-y")
        + w2p * face_average_signed(p, "+y")
    )
    return val + sum(w * p(x, y) for x, y, w in cad.internal)


def test_expand_center_orbit():
    cad = SymmetricCAD(
        SpaceId("P", 2), 0.0, 0.25, (SymOrbit(0.0, 0.0, 0.5, "gs"),), "optimal"
    )
    gen = expand(cad)
    assert gen.boundary_weights == (0.125, 0.125, 0.125, 0.125)
    assert gen.internal == ((0.0, 0.0, 0.5),)


def test_expand_axis_orbit():
    cad = SymmetricCAD(
        SpaceId("P", 2), -1.0, 1 / 6, (SymOrbit(0.6, 0.0, 2 / 3, "gs"),), "user"
    )
    gen = expand(cad)
    assert gen.boundary_weights[0] == 0.0  # theta=-1 kills the x faces
    assert sorted(gen.internal) == [(-0.6, 0.0, 1 / 3), (0.6, 0.0, 1 / 3)]


def test_expand_gf_orbit_counts():
    space = SpaceId("P", 4)
    diag = SymmetricCAD(space, 0.0, 0.2, (SymOrbit(0.3, 0.3, 0.6, "gf"),))
    assert len(expand(diag).internal) == 4  # diagonal orbit: 4 points
    offd = SymmetricCAD(space, 0.0, 0.2, (SymOrbit(0.3, 0.7, 0.6, "gf"),))
    assert len(expand(offd).internal) == 8
    axis = SymmetricCAD(space, 0.0, 0.2, (SymOrbit(0.3, 0.0, 0.6, "gf"),))
    assert len(expand(axis).internal) == 4  # (+-a,0) and (0,+-a)


def test_expand_preserves_decomposition_value():
    rng = np.random.default_rng(0)
    for k, th in ((2, -0.4), (4, 0.0), (6, 0.8)):
        cad = ocad_pk(k, th)
        gen = expand(cad)
        space = cad.space
        for _ in range(200 // 3):
            p = Polynomial2D(space, rng.standard_normal(space.dim))
            assert _decomposition_value(cad, p) == pytest.approx(
                _decomposition_value(gen, p), abs=1e-12
            )


def test_verify_feasibility_classic_and_perturbed():
    cad = classic_2d(SpaceId("Q", 2), 0.3)
    rep = verify_feasibility(cad)
    assert rep.feasible and rep.max_residual <= 1e-13

    bad = SymmetricCAD(
        cad.space, cad.theta, cad.boundary_weight + 1e-3, cad.orbits, "user"
    )
    rep_bad = verify_feasibility(bad)
    assert rep_bad.max_residual >= 1e-4
    assert not rep_bad.feasible


def test_verify_feasibility_p2p3_example():
    rep = verify_feasibility(ocad_p2p3(-0.5, 2))
    assert rep.feasible and rep.max_residual <= 1e-13
    rep3 = verify_feasibility(ocad_p2p3(-0.5, 3))
    assert rep3.feasible and rep3.max_residual <= 1e-13


def test_verify_cad1d():
    cad = CAD1D(2, (1 / 6, 1 / 6), ((0.0, 2 / 3),))
    assert verify_feasibility(cad).feasible
    bad = CAD1D(2, (1 / 6, 1 / 6), ((0.1, 2 / 3),))
    assert not verify_feasibility(bad).feasible


def test_reflect_theta_involution_and_feasibility():
    cad = ocad_pk(4, -0.7)
    refl = reflect_theta(cad)
    assert refl.theta == 0.7
    assert verify_feasibility(refl).feasible
    back = reflect_theta(refl)
    assert back.theta == cad.theta
    assert all(
        (a.x, a.y, a.weight) == (b.x, b.y, b.weight)
        for a, b in zip(back.orbits, cad.orbits)
    )


def test_reflect_theta_gf_at_zero_is_equivalent():
    from ocad.constructors import ocad_pk_theta0

    cad = ocad_pk_theta0(4)
    refl = reflect_theta(cad)
    rng = np.random.default_rng(1)
    for _ in range(20):
        p = Polynomial2D(cad.space, rng.standard_normal(cad.space.dim))
        assert _decomposition_value(refl, p) == pytest.approx(
            _decomposition_value(cad, p), abs=1e-13
        )


def test_convex_combine_identity_and_classic():
    a = ocad_pk_theta_pm1(3, -1)
    b = ocad_pk_theta_pm1(3, 1)
    assert convex_combine(a, b, 1.0) .boundary_weight == a.boundary_weight

    theta = -0.3
    combo = convex_combine(a, b, (1 - theta) / 2)
    classic = classic_2d(SpaceId("P", 3), theta)
    assert combo.theta == pytest.approx(theta, abs=1e-15)
    rng = np.random.default_rng(2)
    for _ in range(20):
        p = Polynomial2D(classic.space, rng.standard_normal(classic.space.dim))
        assert _decomposition_value(combo, p) == pytest.approx(
            _decomposition_value(classic, p), abs=1e-13
        )
    rep = verify_feasibility(combo)
    assert rep.feasible


def test_convex_combine_residual_bound():
    a = classic_2d(SpaceId("P", 5), -0.2)
    b = ocad_pk(5, -0.2)
    ra = verify_feasibility(a).max_residual
    rb = verify_feasibility(b).max_residual
    combo = verify_feasibility(convex_combine(a, b, 0.35)).max_residual
    assert combo <= max(ra, rb) + 1e-14


def test_convex_combine_validation():
    a = ocad_pk(2, 0.0)
    with pytest.raises(ValueError):
        convex_combine(a, a, 1.5)
    with pytest.raises(ValueError):
        convex_combine(a, ocad_pk(4, 0.0), 0.5)


def test_to_physical():
    cad = ocad_pk(2, -1.0)
    phys = to_physical(cad, 0.1, 0.2, (3.0, 7.0))
    gen = expand(cad)
    assert len(phys.nodes) == len(gen.internal)
    for (px, py, pw), (rx, ry, rw) in zip(phys.nodes, gen.internal):
        assert px == pytest.approx(3.0 + 0.05 * rx)
        assert py == pytest.approx(7.0 + 0.1 * ry)
        assert pw == rw
    # corners map to corners
    corner = to_physical(
        SymmetricCAD(SpaceId("P", 2), 0.0, 0.25, (SymOrbit(1.0, 1.0, 0.5, "gs"),)),
        0.1,
        0.2,
        (0.0, 0.0),
    )
    xs = {round(x, 12) for x, _, _ in corner.nodes}
    assert xs == {0.05, -0.05}


def test_bp_cfl_dt():
    classic = classic_2d(SpaceId("P", 2), 0.0)
    assert bp_cfl_dt(classic, 1, 1, 1, 1, 1.0) == pytest.approx(1 / 12)
    opt = ocad_pk(2, 0.0)
    assert bp_cfl_dt(opt, 1, 1, 1, 1, 1.0) == pytest.approx(1 / 8)
    doubled = SymmetricCAD(opt.space, 0.0, 2 * opt.boundary_weight, opt.orbits)
    assert bp_cfl_dt(doubled, 1, 1, 1, 1, 1.0) == pytest.approx(1 / 4)
    assert bp_cfl_dt(opt, 0.0, 0.0, 1, 1, 1.0) == math.inf
    gen = expand(ocad_pk(2, -1.0))
    # only the y faces carry weight; x faces are zero and a1 drops out
    assert bp_cfl_dt(gen, 0.0, 1.0, 1, 1, 1.0) == pytest.approx(1 / 6)


def test_theta_of():
    assert theta_of(1, 1, 1, 1) == 0.0
    assert theta_of(1, 0, 1, 1) == 1.0
    assert theta_of(1, 3, 1, 1) == pytest.approx(-0.5)
    with pytest.raises(ValueError):
        theta_of(0, 0, 1, 1)


def test_json_round_trip(tmp_path):
    cad = ocad_pk(6, -0.35)
    path = tmp_path / "cad.json"
    save(cad, path)
    back = load(path)
    assert back.space == cad.space
    assert back.theta == cad.theta
    assert back.boundary_weight == cad.boundary_weight
    for a, b in zip(back.orbits, cad.orbits):
        assert (a.x, a.y, a.weight, a.kind) == (b.x, b.y, b.weight, b.kind)
    assert back.provenance == "optimal"


def test_json_schema_fields():
    doc = to_json(ocad_pk(2, 0.0))
    assert '"space"' in doc and '"boundary_weight"' in doc and '"orbits"' in doc
    cad = from_json(doc)
    assert cad.space == SpaceId("P", 2)


def test_vectorized_residuals_match_per_monomial_oracle():
    """The fast residual path agrees with a direct per-monomial evaluation."""
    from ocad.cad import _monomial_residuals
    from ocad.constructors import ocad_qk
    from ocad.polyspace import (
        cell_average,
        face_average_x,
        face_average_y,
        monomial_basis,
        orbit_average,
    )

    def slow(cad):
        out = []
        if isinstance(cad, SymmetricCAD):
            for b in monomial_basis(cad.space):
                val = cad.boundary_weight * (
                    (1 + cad.theta) * face_average_x(b)
                    + (1 - cad.theta) * face_average_y(b)
                )
                val += sum(o.weight * orbit_average(b, o) for o in cad.orbits)
                out.append(cell_average(b) - val)
        else:
            w1m, w1p, w2m, w2p = cad.boundary_weights
            for b in monomial_basis(cad.space):
                val = (
                    w1m * face_average_signed(b, "-x")
                    + w1p * face_average_signed(b, "+x")
                    + w2m * face_average_signed(b, "-y")
                    + w2p * face_average_signed(b, "+y")
                )
                val += sum(w * b(x, y) for x, y, w in cad.internal)
                out.append(cell_average(b) - val)
        return np.array(out)

    for cad in (ocad_pk(5, -0.3), ocad_qk(4, 0.6)[0], ocad_pk(6, 0.0)):
        assert np.allclose(_monomial_residuals(cad), slow(cad), atol=1e-14)
        gen = expand(cad)
        assert np.allclose(_monomial_residuals(gen), slow(gen), atol=1e-14)


def test_weight_sum_invariants():
    for k in (1, 2, 4, 6):
        for th in (-1.0, -0.35, 0.0, 0.8):
            cad = ocad_pk(k, th)
            assert cad.weight_sum() == pytest.approx(1.0, abs=1e-13)
            assert expand(cad).weight_sum() == pytest.approx(1.0, abs=1e-13)
