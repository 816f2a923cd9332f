"""Closed-form cell average decompositions.

Covers the classic tensor decompositions (1D and 2D), the tensor optima at
theta = +-1, the fully symmetric optima at theta = 0 for quadratic through
septic total-degree spaces, the general-theta optima for those spaces, and
the quasi-optimal convex combination.  Tensor-product spaces are optimal
with the classic construction at every theta.
"""

from __future__ import annotations

import math

import numpy as np

from .cad import SymmetricCAD, CAD1D, convex_combine, expand
from .polyspace import Polynomial2D, SpaceId, SymOrbit, poly_mul
from .quadrature import gauss, gauss_lobatto, lobatto_L_for_degree

__all__ = [
    "omega1_gl",
    "classic_1d",
    "certificate_1d",
    "classic_2d",
    "ocad_qk",
    "ocad_pk_theta_pm1",
    "certificate_pk_theta_pm1",
    "ocad_pk_theta0",
    "ocad_p2p3",
    "ocad_p4p5",
    "ocad_p6p7",
    "ocad_pk",
    "quasi_optimal",
    "quasi_omega",
]


def omega1_gl(k: int) -> float:
    """Endpoint Lobatto weight 1/(L(L-1)) for the rule resolving degree k."""
    L = lobatto_L_for_degree(k)
    return 1.0 / (L * (L - 1))


def classic_1d(k: int) -> CAD1D:
    """Lobatto split of the interval mean; this is also the 1D optimum."""
    L = lobatto_L_for_degree(k)
    rule = gauss_lobatto(L)
    internal = tuple(
        (float(x), float(w)) for x, w in zip(rule.nodes[1:-1], rule.weights[1:-1])
    )
    wb = 1.0 / (L * (L - 1))
    return CAD1D(k, (wb, wb), internal)


def certificate_1d(k: int, cad: CAD1D) -> np.polynomial.Polynomial:
    """Nonnegative degree <= k witness vanishing at the interior nodes."""
    p = np.polynomial.Polynomial([1.0])
    for x, _ in cad.internal:
        p = p * np.polynomial.Polynomial([-x, 1.0]) ** 2
    return p


def _folded(nodes, weights):
    """Fold a symmetric 1D rule onto [0,1]: (value, total weight) pairs."""
    out = []
    for x, w in zip(nodes, weights):
        if x > 0.0:
            out.append((float(x), 2.0 * float(w)))
        elif x == 0.0:
            out.append((0.0, float(w)))
    return out


def classic_2d(space: SpaceId, theta: float, Q: int | None = None) -> SymmetricCAD:
    """Tensor Lobatto x Gauss decomposition, boundary weight 1/(L(L-1)).

    The interior mass is split (1+theta)/2 on the Lobatto-in-x orientation
    and (1-theta)/2 on the Lobatto-in-y orientation; a vanishing factor
    drops that orientation entirely.
    """
    k = space.degree
    L = lobatto_L_for_degree(k)
    if Q is None:
        Q = math.ceil((k + 1) / 2)
    lob = gauss_lobatto(L)
    g = gauss(Q)
    lob_fold = _folded(lob.nodes[1:-1], lob.weights[1:-1])
    g_fold = _folded(g.nodes, g.weights)
    fx = (1.0 + theta) / 2.0
    fy = (1.0 - theta) / 2.0
    orbits = []
    for a, wa in lob_fold:
        for b, wb in g_fold:
            if fx > 0.0:
                orbits.append(SymOrbit(a, b, fx * wa * wb))
    for a, wa in lob_fold:
        for b, wb in g_fold:
            if fy > 0.0:
                orbits.append(SymOrbit(b, a, fy * wa * wb))
    wbar = 1.0 / (L * (L - 1))
    return SymmetricCAD(space, theta, wbar, tuple(orbits), "classic")


def _tensor_poly_1d(roots, axis: str, family: str, degree: int) -> Polynomial2D:
    """prod (axis - r) as a 2D polynomial in the given space."""
    coeffs_1d = np.polynomial.polynomial.polyfromroots(roots) if len(roots) else np.array([1.0])
    space = SpaceId(family, degree)
    from .polyspace import exponents

    index = {e: n for n, e in enumerate(exponents(space))}
    c = np.zeros(space.dim)
    for n, cn in enumerate(coeffs_1d):
        key = (n, 0) if axis == "x" else (0, n)
        c[index[key]] += cn
    return Polynomial2D(space, c)


def ocad_qk(k: int, theta: float, Q: int | None = None):
    """Classic decomposition for the tensor space plus its optimality witness.

    Returns ``(cad, p_star)`` where ``p_star`` is the squared product of the
    interior Lobatto factors in both variables; it vanishes at every interior
    node (asserted) and certifies optimality.
    """
    space = SpaceId("Q", k)
    cad = classic_2d(space, theta, Q)
    L = lobatto_L_for_degree(k)
    interior = gauss_lobatto(L).nodes[1:-1]
    half = max(L - 2, 0)
    qx = _tensor_poly_1d(list(interior), "x", "Q", half)
    qy = _tensor_poly_1d(list(interior), "y", "Q", half)
    q_star = poly_mul(qx, qy)
    p_star = poly_mul(q_star, q_star)
    for x, y, _ in expand(cad).internal:
        if abs(p_star(x, y)) > 1e-12:
            raise AssertionError("certificate does not vanish at an interior node")
    cad = SymmetricCAD(space, theta, cad.boundary_weight, cad.orbits, "optimal")
    return cad, p_star


def ocad_pk_theta_pm1(k: int, sign: int) -> SymmetricCAD:
    """Single-orientation tensor optimum for total-degree spaces at theta=+-1."""
    if sign not in (-1, 1):
        raise ValueError("sign must be -1 or +1")
    cad = classic_2d(SpaceId("P", k), float(sign))
    return SymmetricCAD(cad.space, cad.theta, cad.boundary_weight, cad.orbits, "optimal")


def certificate_pk_theta_pm1(k: int, sign: int) -> Polynomial2D:
    """Witness for the theta=+-1 optimum: interior Lobatto factors in one axis."""
    L = lobatto_L_for_degree(k)
    interior = gauss_lobatto(L).nodes[1:-1]
    axis = "y" if sign < 0 else "x"
    return _tensor_poly_1d(list(interior), axis, "P", k // 2)


def ocad_pk_theta0(k: int) -> SymmetricCAD:
    """Fully symmetric optimum at theta = 0 for 2 <= k <= 7 (closed form).

    For sextic/septic spaces the optimum is not unique; this returns the
    fully symmetric representative.
    """
    if not 2 <= k <= 7:
        raise ValueError("closed forms cover 2 <= k <= 7 only")
    space = SpaceId("P", k)
    if k <= 3:
        return SymmetricCAD(space, 0.0, 0.25, (SymOrbit(0.0, 0.0, 0.5, "gf"),), "optimal")
    if k <= 5:
        s14 = math.sqrt(14.0)
        wbar = 2.0 - s14 / 2.0
        d = math.sqrt((7.0 - s14) / 15.0)
        a = math.sqrt((14.0 - 2.0 * s14) / 15.0)
        orbits = (
            SymOrbit(d, d, (5.0 * s14 - 15.0) / 7.0, "gf"),
            SymOrbit(a, 0.0, 2.0 * (s14 - 3.0) / 7.0, "gf"),
        )
        return SymmetricCAD(space, 0.0, wbar, orbits, "optimal")
    s30 = math.sqrt(30.0)
    wbar = 1.0 - s30 / 6.0
    d = math.sqrt(3.0 / 5.0 - s30 / 25.0)
    a = math.sqrt(6.0 / 7.0 - 2.0 * s30 / 35.0)
    orbits = (
        SymOrbit(d, d, (875.0 * s30 - 3125.0) / 4563.0, "gf"),
        SymOrbit(a, 0.0, 2.0 * (343.0 * s30 - 1225.0) / 4563.0, "gf"),
        SymOrbit(0.0, 0.0, (1012.0 - 40.0 * s30) / 4563.0, "gf"),
    )
    return SymmetricCAD(space, 0.0, wbar, orbits, "optimal")


def ocad_p2p3(theta: float, k: int = 2) -> SymmetricCAD:
    """Optimal decomposition for quadratic/cubic total-degree spaces."""
    if k not in (2, 3):
        raise ValueError("k must be 2 or 3")
    t = abs(theta)
    wbar = 1.0 / (4.0 + 2.0 * t)
    w1 = (1.0 + t) / (2.0 + t)
    a = math.sqrt(2.0 * t / (3.0 + 3.0 * t))
    node = (a, 0.0) if theta <= 0 else (0.0, a)
    return SymmetricCAD(
        SpaceId("P", k), theta, wbar, (SymOrbit(node[0], node[1], w1, "gs"),), "optimal"
    )


def _p4p5_omega(theta: float) -> float:
    t2 = theta * theta
    r = math.sqrt(78.0 * t2 + 46.0)
    ang = math.acos((1476.0 * t2 - 244.0) / r**3) / 3.0
    return 1.0 / (14.0 / 3.0 + 2.0 / 3.0 * r * math.cos(ang))


def ocad_p4p5(theta: float, k: int = 4) -> SymmetricCAD:
    """Optimal decomposition for quartic/quintic total-degree spaces.

    The boundary weight is the trigonometric closed form of the relevant
    cubic; its residual in that cubic is asserted below 1e-12.
    """
    if k not in (4, 5):
        raise ValueError("k must be 4 or 5")
    t = abs(theta)
    wbar = _p4p5_omega(theta)
    res = (
        12.0 * (1.0 - theta * theta) * wbar**3
        + (26.0 * theta * theta - 50.0) * wbar**2
        + 14.0 * wbar
        - 1.0
    )
    if abs(res) > 1e-12:
        raise AssertionError(f"boundary weight fails its cubic (residual {res:.2e})")
    w1 = 5.0 * (1.0 - 4.0 * wbar + 2.0 * t * wbar) ** 2 / (
        9.0 * (1.0 - 6.0 * wbar + 4.0 * t * wbar)
    )
    w2 = 1.0 - 2.0 * wbar - w1
    u = math.sqrt(
        3.0 * (1.0 - 6.0 * wbar + 4.0 * t * wbar) / (5.0 * (1.0 - 4.0 * wbar + 2.0 * t * wbar))
    )
    v = math.sqrt((1.0 - 6.0 * wbar) / (3.0 * (1.0 - 4.0 * wbar + 2.0 * t * wbar)))
    v2 = math.sqrt((1.0 - 4.0 * wbar - 2.0 * t * wbar - 3.0 * w1 * v * v) / (3.0 * w2))
    if theta <= 0:
        orbits = (SymOrbit(u, v, w1, "gs"), SymOrbit(0.0, v2, w2, "gs"))
    else:
        orbits = (SymOrbit(v, u, w1, "gs"), SymOrbit(v2, 0.0, w2, "gs"))
    return SymmetricCAD(SpaceId("P", k), theta, wbar, orbits, "optimal")


def _p6p7_omega(theta: float) -> float:
    t = abs(theta)
    r = math.sqrt(126.0 * t * t + 96.0 * t + 94.0)
    ang = math.acos((864.0 * t**3 + 2916.0 * t * t + 288.0 * t - 532.0) / r**3) / 3.0
    return 1.0 / (2.0 * t + 20.0 / 3.0 + 2.0 / 3.0 * r * math.cos(ang))


def _clamped_sqrt(r: float, what: str) -> float:
    # printed radicals are analytically nonnegative but may round below zero
    if r < -1e-13:
        raise AssertionError(f"negative radicand for {what}: {r:.3e}")
    return math.sqrt(max(r, 0.0))


def p6p7_root_factor(theta: float) -> np.ndarray:
    """Coefficients (cubic first) of the determinant factor whose smallest
    real root is the sextic/septic boundary weight; branch chosen by sign."""
    th = theta
    if th <= 0:
        return np.array(
            [
                12 * th**3 - 48 * th**2 - 12 * th + 48,
                48 * th + 30 * th**2 - 102,
                -6 * th + 20,
                -1.0,
            ]
        )
    return np.array(
        [
            12 * th**3 + 48 * th**2 - 12 * th - 48,
            48 * th - 30 * th**2 + 102,
            -6 * th - 20,
            1.0,
        ]
    )


def ocad_p6p7(theta: float, k: int = 6) -> SymmetricCAD:
    """Optimal decomposition for sextic/septic total-degree spaces.

    Evaluated in the theta <= 0 frame and mirrored for positive theta; the
    boundary weight is asserted to be the smallest real root of the matching
    determinant factor.
    """
    if k not in (6, 7):
        raise ValueError("k must be 6 or 7")
    t = -abs(theta)
    wbar = _p6p7_omega(theta)

    roots = np.roots(p6p7_root_factor(t))
    real = sorted(r.real for r in roots if abs(r.imag) < 1e-9)
    if not real or abs(wbar - real[0]) > 1e-10:
        raise AssertionError("boundary weight is not the smallest real root")

    m = {}
    for i in (0, 2, 4, 6):
        for j in (0, 2, 4, 6):
            if i + j <= 6:
                m[(i, j)] = 1.0 / ((i + 1) * (j + 1)) - wbar * (
                    (1.0 + t) / (1 + j) + (1.0 - t) / (1 + i)
                )
    beta1 = 1.0 - m[(2, 2)] ** 2 / (m[(4, 2)] * m[(0, 2)]) + (math.sqrt(30.0) + 2.0) / 36.0 * t * t
    beta2 = m[(4, 2)] * m[(0, 2)] - m[(2, 2)] ** 2
    beta3 = m[(0, 6)] * m[(0, 2)] - m[(0, 4)] ** 2

    x1 = _clamped_sqrt(
        (m[(2, 2)] - _clamped_sqrt((1.0 - beta1) * beta2 / beta1, "x1 inner")) / m[(0, 2)],
        "x1",
    )
    y1 = _clamped_sqrt(
        (m[(0, 4)] + _clamped_sqrt((1.0 - beta1) * beta3 / beta1, "y1 inner")) / m[(0, 2)],
        "y1",
    )
    w1 = beta1 * m[(0, 2)] / (y1 * y1)
    x2 = _clamped_sqrt(
        (m[(2, 2)] + _clamped_sqrt(beta1 * beta2 / (1.0 - beta1), "x2 inner")) / m[(0, 2)],
        "x2",
    )
    y2 = _clamped_sqrt(
        (m[(0, 4)] - _clamped_sqrt(beta1 * beta3 / (1.0 - beta1), "y2 inner")) / m[(0, 2)],
        "y2",
    )
    w2 = (1.0 - beta1) * m[(0, 2)] / (y2 * y2)

    mk = {K: m[(K, 0)] - w1 * x1**K - w2 * x2**K for K in (0, 2, 4, 6)}
    m0, m2, m4, m6 = mk[0], mk[2], mk[4], mk[6]
    disc = m4 * m0 - m2 * m2
    beta4 = (m6 * m0 * m0 - 3.0 * m4 * m2 * m0 + 2.0 * m2**3) / disc**1.5
    w3 = m0 / 2.0 * (1.0 + beta4 / math.sqrt(beta4 * beta4 + 4.0))
    w4 = m0 / 2.0 * (1.0 - beta4 / math.sqrt(beta4 * beta4 + 4.0))
    x3 = _clamped_sqrt(m2 / m0 - math.sqrt(w4 / w3) * math.sqrt(disc) / m0, "x3")
    x4 = _clamped_sqrt(m2 / m0 + math.sqrt(w3 / w4) * math.sqrt(disc) / m0, "x4")

    orbits = (
        SymOrbit(x1, y1, w1, "gs"),
        SymOrbit(x2, y2, w2, "gs"),
        SymOrbit(x3, 0.0, w3, "gs"),
        SymOrbit(x4, 0.0, w4, "gs"),
    )
    out = SymmetricCAD(SpaceId("P", k), t, wbar, orbits, "optimal")
    if theta > 0:
        from .cad import reflect_theta

        out = reflect_theta(out)
    return out


def ocad_pk(k: int, theta: float) -> SymmetricCAD:
    """Analytic optimum for total-degree spaces, k <= 7, any theta."""
    if k == 1:
        return SymmetricCAD(SpaceId("P", 1), theta, 0.5, (), "optimal")
    if k in (2, 3):
        return ocad_p2p3(theta, k)
    if k in (4, 5):
        return ocad_p4p5(theta, k)
    if k in (6, 7):
        return ocad_p6p7(theta, k)
    raise ValueError("analytic optima cover k <= 7; use the numeric path for k >= 8")


def quasi_omega(k: int, theta: float, omega_star0: float) -> float:
    """Boundary weight of the quasi-optimal combination."""
    t = abs(theta)
    w_gl = omega1_gl(k)
    return omega_star0 * w_gl / (omega_star0 * t + w_gl * (1.0 - t))


def quasi_optimal(
    k: int, theta: float, theta0_cad: SymmetricCAD | None = None
) -> SymmetricCAD:
    """Convex combination of the theta=sign(theta) and theta=0 optima.

    ``theta0_cad`` supplies the theta = 0 optimum when no closed form exists
    (k >= 8, numeric continuation output); for k <= 7 it is built here.
    """
    if k == 1:
        return SymmetricCAD(SpaceId("P", 1), theta, 0.5, (), "quasi_optimal")
    if theta0_cad is None:
        if k > 7:
            raise ValueError(
                "theta0_cad is required for k >= 8 (numeric theta=0 optimum)"
            )
        theta0_cad = ocad_pk_theta0(k)
    space = SpaceId("P", k)
    if theta0_cad.space != space:
        if theta0_cad.space.degree > k or theta0_cad.space.family != "P":
            raise ValueError("theta0_cad space is incompatible")
        theta0_cad = SymmetricCAD(
            space,
            theta0_cad.theta,
            theta0_cad.boundary_weight,
            theta0_cad.orbits,
            theta0_cad.provenance,
        )
    w0 = theta0_cad.boundary_weight
    t = abs(theta)
    w_gl = omega1_gl(k)
    tau = w0 * t / (w0 * t + w_gl * (1.0 - t))
    sign = -1 if theta <= 0 else 1
    tensor = ocad_pk_theta_pm1(k, sign)
    out = convex_combine(tensor, theta0_cad, tau)
    if abs(out.theta - theta) > 1e-12:
        raise AssertionError("combined decomposition has the wrong anisotropy")
    return SymmetricCAD(space, out.theta, out.boundary_weight, out.orbits, "quasi_optimal")
