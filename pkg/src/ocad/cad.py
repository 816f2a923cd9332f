"""Cell average decompositions: data model, verification, and transforms.

A decomposition expresses the cell mean of every polynomial in a space as a
positive combination of face means and interior point values.  Three forms
are supported:

* :class:`CAD1D` on an interval,
* :class:`SymmetricCAD` on the reference square, with a single boundary
  weight split ``(1+theta)/2 : (1-theta)/2`` between x- and y-faces and
  reflection-symmetric interior orbits,
* :class:`GeneralCAD`, four independent face weights plus explicit interior
  points (what a symmetric decomposition expands to).

JSON (symmetric form only) is the interchange format; floats are written
with 17 significant digits.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np

from .polyspace import SpaceId, SymOrbit

__all__ = [
    "CAD1D",
    "SymmetricCAD",
    "GeneralCAD",
    "PhysicalCAD",
    "FeasibilityReport",
    "expand",
    "verify_feasibility",
    "reflect_theta",
    "convex_combine",
    "to_physical",
    "bp_cfl_dt",
    "theta_of",
    "to_json",
    "from_json",
    "save",
    "load",
]

DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class CAD1D:
    """1D decomposition: boundary weights at the endpoints + interior nodes."""

    degree: int
    boundary: tuple[float, float]  # (omega_minus, omega_plus)
    internal: tuple[tuple[float, float], ...]  # (node, weight)

    def weight_sum(self) -> float:
        return self.boundary[0] + self.boundary[1] + sum(w for _, w in self.internal)


@dataclass(frozen=True)
class SymmetricCAD:
    """Symmetric decomposition on [-1,1]^2.

    ``boundary_weight`` is the common factor on the paired-face means; the
    x-faces carry ``(1+theta)/2`` of it per side and the y-faces
    ``(1-theta)/2``.  Orbit weights are totals, so
    ``2*boundary_weight + sum(orbit weights) == 1``.
    """

    space: SpaceId
    theta: float
    boundary_weight: float
    orbits: tuple[SymOrbit, ...]
    provenance: str = "user"

    def __post_init__(self):
        if not -1.0 <= self.theta <= 1.0:
            raise ValueError("theta must lie in [-1,1]")
        if not self.boundary_weight > 0.0:
            raise ValueError("boundary weight must be positive")
        object.__setattr__(self, "orbits", tuple(self.orbits))

    def internal_weight(self) -> float:
        return sum(o.weight for o in self.orbits)

    def weight_sum(self) -> float:
        return 2.0 * self.boundary_weight + self.internal_weight()


@dataclass(frozen=True)
class GeneralCAD:
    """Fully expanded decomposition with four face weights and point nodes."""

    space: SpaceId
    boundary_weights: tuple[float, float, float, float]  # (w1-, w1+, w2-, w2+)
    internal: tuple[tuple[float, float, float], ...]  # (x, y, weight)

    def weight_sum(self) -> float:
        return sum(self.boundary_weights) + sum(w for _, _, w in self.internal)


@dataclass(frozen=True)
class PhysicalCAD:
    """A GeneralCAD mapped onto a physical cell (nodes in cell coordinates)."""

    ref: GeneralCAD
    dx: float
    dy: float
    center: tuple[float, float]
    nodes: tuple[tuple[float, float, float], ...]


@dataclass(frozen=True)
class FeasibilityReport:
    max_residual: float
    weight_ok: bool
    nodes_ok: bool
    tol: float

    @property
    def feasible(self) -> bool:
        return self.max_residual <= self.tol and self.weight_ok and self.nodes_ok


def _expand_gs(x: float, y: float, w: float) -> list[tuple[float, float, float]]:
    """Reflect one gs orbit, merging the degenerate axis/center cases."""
    if x == 0.0 and y == 0.0:
        return [(0.0, 0.0, w)]
    if x == 0.0:
        return [(0.0, y, w / 2), (0.0, -y, w / 2)]
    if y == 0.0:
        return [(x, 0.0, w / 2), (-x, 0.0, w / 2)]
    return [(x, y, w / 4), (-x, y, w / 4), (x, -y, w / 4), (-x, -y, w / 4)]


def expand(cad: SymmetricCAD) -> GeneralCAD:
    """Expand a symmetric decomposition into explicit faces and points."""
    bw = cad.boundary_weight
    w1 = bw * (1.0 + cad.theta) / 2.0
    w2 = bw * (1.0 - cad.theta) / 2.0
    points: list[tuple[float, float, float]] = []
    for o in cad.orbits:
        if o.kind == "gs":
            points.extend(_expand_gs(o.x, o.y, o.weight))
        else:
            if o.x == o.y:
                points.extend(_expand_gs(o.x, o.y, o.weight))
            else:
                points.extend(_expand_gs(o.x, o.y, o.weight / 2))
                points.extend(_expand_gs(o.y, o.x, o.weight / 2))
    return GeneralCAD(cad.space, (w1, w1, w2, w2), tuple(points))


def _monomial_residuals(cad) -> np.ndarray:
    """Exactness residuals over the full monomial basis, vectorized.

    Uses the closed forms of monomial means: orbit averages of x^i y^j
    vanish unless both exponents are even, in which case they equal the
    plain value (plus the swapped term for full orbits).
    """
    from .polyspace import exponents

    exps = np.array(exponents(cad.space), dtype=float)
    I, J = exps[:, 0], exps[:, 1]
    even_i = I % 2 == 0
    even_j = J % 2 == 0
    mean_i = np.where(even_i, 1.0 / (I + 1), 0.0)
    mean_j = np.where(even_j, 1.0 / (J + 1), 0.0)
    cell = mean_i * mean_j
    if isinstance(cad, SymmetricCAD):
        fx = np.where(even_i, mean_j, 0.0)
        fy = np.where(even_j, mean_i, 0.0)
        val = cad.boundary_weight * (
            (1.0 + cad.theta) * fx + (1.0 - cad.theta) * fy
        )
        both = even_i & even_j
        for o in cad.orbits:
            gs = np.where(both, o.x**I * o.y**J, 0.0)
            if o.kind == "gf":
                gs = 0.5 * (gs + np.where(both, o.y**I * o.x**J, 0.0))
            val = val + o.weight * gs
        return cell - val
    w1m, w1p, w2m, w2p = cad.boundary_weights
    sign_i = np.where(even_i, 1.0, -1.0)
    sign_j = np.where(even_j, 1.0, -1.0)
    val = (w1m * sign_i + w1p) * mean_j + (w2m * sign_j + w2p) * mean_i
    for x, y, w in cad.internal:
        # integral-valued float exponents keep negative bases well defined
        val = val + w * np.power(x, I) * np.power(y, J)
    return cell - val


def verify_feasibility(cad, tol: float = DEFAULT_TOL) -> FeasibilityReport:
    """Check exactness over the full monomial basis, weight signs, node bounds.

    Exactness is tested monomial by monomial rather than only on the
    symmetry-invariant subspace: the stronger test costs little and catches
    orbit bookkeeping errors.
    """
    if isinstance(cad, CAD1D):
        wm, wp = cad.boundary
        res = 0.0
        for m in range(cad.degree + 1):
            exact = 1.0 / (m + 1) if m % 2 == 0 else 0.0
            val = wm * (-1.0) ** m + wp
            val += sum(w * x**m for x, w in cad.internal)
            res = max(res, abs(exact - val))
        weight_ok = wm > 0.0 and wp > 0.0 and all(w > 0.0 for _, w in cad.internal)
        nodes_ok = all(-1.0 <= x <= 1.0 for x, _ in cad.internal)
        return FeasibilityReport(res, weight_ok, nodes_ok, tol)

    res = float(np.max(np.abs(_monomial_residuals(cad))))
    if isinstance(cad, SymmetricCAD):
        weight_ok = cad.boundary_weight > 0.0 and all(
            o.weight > 0.0 for o in cad.orbits
        )
        nodes_ok = all(0.0 <= o.x <= 1.0 and 0.0 <= o.y <= 1.0 for o in cad.orbits)
    else:
        # face weights may legitimately vanish at theta = +-1
        weight_ok = all(w >= 0.0 for w in cad.boundary_weights) and all(
            w > 0.0 for _, _, w in cad.internal
        )
        nodes_ok = all(
            -1.0 <= x <= 1.0 and -1.0 <= y <= 1.0 for x, y, _ in cad.internal
        )
    return FeasibilityReport(res, weight_ok, nodes_ok, tol)


def reflect_theta(cad: SymmetricCAD) -> SymmetricCAD:
    """The decomposition for -theta: swap the orbit coordinates."""
    orbits = tuple(
        SymOrbit(o.y, o.x, o.weight, o.kind) for o in cad.orbits
    )
    return replace(cad, theta=-cad.theta, orbits=orbits)


def convex_combine(a, b, lam: float):
    """Convex combination ``lam * a + (1-lam) * b`` of two decompositions.

    Symmetric operands may have different theta; the combined boundary
    weights are re-expressed as a new (boundary_weight, theta) pair.
    """
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lambda must lie in [0,1]")
    if type(a) is not type(b):
        raise TypeError("operands must have the same decomposition type")
    if isinstance(a, CAD1D):
        if a.degree != b.degree:
            raise ValueError("operands must share the degree")
        boundary = (
            lam * a.boundary[0] + (1 - lam) * b.boundary[0],
            lam * a.boundary[1] + (1 - lam) * b.boundary[1],
        )
        internal = tuple((x, lam * w) for x, w in a.internal if lam > 0) + tuple(
            (x, (1 - lam) * w) for x, w in b.internal if lam < 1
        )
        return CAD1D(a.degree, boundary, internal)
    if a.space != b.space:
        raise ValueError("operands must share the space")
    if isinstance(a, SymmetricCAD):
        w1 = lam * a.boundary_weight * (1 + a.theta) / 2 + (
            1 - lam
        ) * b.boundary_weight * (1 + b.theta) / 2
        w2 = lam * a.boundary_weight * (1 - a.theta) / 2 + (
            1 - lam
        ) * b.boundary_weight * (1 - b.theta) / 2
        bw = w1 + w2
        theta = (w1 - w2) / bw
        orbits = tuple(
            SymOrbit(o.x, o.y, lam * o.weight, o.kind) for o in a.orbits if lam > 0
        ) + tuple(
            SymOrbit(o.x, o.y, (1 - lam) * o.weight, o.kind)
            for o in b.orbits
            if lam < 1
        )
        prov = a.provenance if a.provenance == b.provenance else "user"
        return SymmetricCAD(a.space, theta, bw, orbits, prov)
    bw = tuple(
        lam * wa + (1 - lam) * wb
        for wa, wb in zip(a.boundary_weights, b.boundary_weights)
    )
    internal = tuple((x, y, lam * w) for x, y, w in a.internal if lam > 0) + tuple(
        (x, y, (1 - lam) * w) for x, y, w in b.internal if lam < 1
    )
    return GeneralCAD(a.space, bw, internal)


def to_physical(cad, dx: float, dy: float, cell_center: tuple[float, float]) -> PhysicalCAD:
    """Map reference-cell nodes affinely onto a physical cell; weights unchanged."""
    if dx <= 0 or dy <= 0:
        raise ValueError("cell sizes must be positive")
    gen = expand(cad) if isinstance(cad, SymmetricCAD) else cad
    cx, cy = cell_center
    nodes = tuple(
        (cx + 0.5 * dx * x, cy + 0.5 * dy * y, w) for x, y, w in gen.internal
    )
    return PhysicalCAD(gen, dx, dy, (cx, cy), nodes)


def bp_cfl_dt(cad, a1: float, a2: float, dx: float, dy: float, c0: float) -> float:
    """Largest bound-preserving time step for wave speeds (a1, a2).

    Returns ``inf`` when both speeds vanish (no transport, unbounded step).
    """
    if a1 < 0 or a2 < 0:
        raise ValueError("wave speeds must be nonnegative")
    if a1 == 0.0 and a2 == 0.0:
        return math.inf
    if isinstance(cad, SymmetricCAD):
        return c0 * cad.boundary_weight / (a1 / dx + a2 / dy)
    w1m, w1p, w2m, w2p = cad.boundary_weights
    bounds = []
    if a1 > 0:
        bounds += [w1m * dx / a1, w1p * dx / a1]
    if a2 > 0:
        bounds += [w2m * dy / a2, w2p * dy / a2]
    return c0 * min(bounds)


def theta_of(a1: float, a2: float, dx: float, dy: float) -> float:
    """Mesh-anisotropy parameter (a1/dx - a2/dy)/(a1/dx + a2/dy)."""
    denom = a1 / dx + a2 / dy
    if denom <= 0.0:
        raise ValueError("wave speeds must not both vanish")
    return (a1 / dx - a2 / dy) / denom


# -- JSON interchange ---------------------------------------------------------


def _fmt(x: float) -> float:
    return float(f"{x:.17g}")


def to_json(cad: SymmetricCAD) -> str:
    doc = {
        "space": {"family": cad.space.family, "degree": cad.space.degree},
        "theta": _fmt(cad.theta),
        "boundary_weight": _fmt(cad.boundary_weight),
        "orbits": [
            {"x": _fmt(o.x), "y": _fmt(o.y), "weight": _fmt(o.weight), "kind": o.kind}
            for o in cad.orbits
        ],
        "provenance": cad.provenance,
    }
    return json.dumps(doc, indent=2)


def from_json(text: str) -> SymmetricCAD:
    doc = json.loads(text)
    space = SpaceId(doc["space"]["family"], int(doc["space"]["degree"]))
    orbits = tuple(
        SymOrbit(o["x"], o["y"], o["weight"], o.get("kind", "gs"))
        for o in doc["orbits"]
    )
    return SymmetricCAD(
        space,
        float(doc["theta"]),
        float(doc["boundary_weight"]),
        orbits,
        doc.get("provenance", "user"),
    )


def save(cad: SymmetricCAD, path) -> None:
    with open(path, "w") as fh:
        fh.write(to_json(cad) + "\n")


def load(path) -> SymmetricCAD:
    with open(path) as fh:
        return from_json(fh.read())
