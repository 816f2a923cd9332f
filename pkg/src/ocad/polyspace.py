"""2D polynomial spaces on the reference cell [-1,1]^2.

Coefficient vectors use a frozen graded-lexicographic monomial ordering:
terms are sorted by total degree, and within a degree by descending power
of x (so P^2 reads ``1, x, y, x^2, x*y, y^2``).  Every serialized
coefficient vector in this package relies on that ordering.

All averages are normalized by measure: ``cell_average`` is the mean over
the cell (measure 4) and the face averages are means over the paired faces
(measure 2 each), so the weights of any feasible decomposition sum to one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

__all__ = [
    "SpaceId",
    "Polynomial2D",
    "SymOrbit",
    "monomial_basis",
    "invariant_basis_gs",
    "invariant_basis_gf",
    "cell_average",
    "face_average_x",
    "face_average_y",
    "orbit_average",
    "poly_mul",
    "legendre_matrix",
    "to_legendre",
    "from_legendre",
]


@dataclass(frozen=True)
class SpaceId:
    """Identifies P^k (total degree <= k) or Q^k (max degree <= k)."""

    family: str
    degree: int

    def __post_init__(self):
        if self.family not in ("P", "Q"):
            raise ValueError(f"family must be 'P' or 'Q', got {self.family!r}")
        if self.degree < 0:
            raise ValueError("degree must be nonnegative")

    @property
    def dim(self) -> int:
        k = self.degree
        return (k + 1) * (k + 2) // 2 if self.family == "P" else (k + 1) ** 2


@lru_cache(maxsize=None)
def exponents(space: SpaceId) -> tuple[tuple[int, int], ...]:
    """Exponent pairs (i, j) of the space in the frozen graded order."""
    k = space.degree
    pairs = []
    for d in range(2 * k + 1):
        for j in range(d + 1):
            i = d - j
            if space.family == "P" and d <= k:
                pairs.append((i, j))
            elif space.family == "Q" and max(i, j) <= k:
                pairs.append((i, j))
    assert len(pairs) == space.dim
    return tuple(pairs)


@dataclass(frozen=True, eq=False)
class Polynomial2D:
    """Polynomial over the graded monomial basis of ``space``."""

    space: SpaceId
    coeffs: np.ndarray = field()

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.shape != (self.space.dim,):
            raise ValueError(
                f"coeff length {c.shape} does not match dim {self.space.dim}"
            )
        object.__setattr__(self, "coeffs", c)

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = np.zeros(np.broadcast(x, y).shape)
        # fixed summation order: term order of the graded basis
        for c, (i, j) in zip(self.coeffs, exponents(self.space)):
            if c != 0.0:
                out = out + c * x**i * y**j
        return out if out.shape else float(out)

    def partial(self, wrt: str) -> "Polynomial2D":
        """Partial derivative with respect to ``'x'`` or ``'y'`` (same space)."""
        exps = exponents(self.space)
        index = {e: n for n, e in enumerate(exps)}
        out = np.zeros_like(self.coeffs)
        for c, (i, j) in zip(self.coeffs, exps):
            if c == 0.0:
                continue
            if wrt == "x" and i > 0:
                out[index[(i - 1, j)]] += c * i
            elif wrt == "y" and j > 0:
                out[index[(i, j - 1)]] += c * j
        return Polynomial2D(self.space, out)

    def degree(self) -> int:
        exps = exponents(self.space)
        degs = [i + j for c, (i, j) in zip(self.coeffs, exps) if c != 0.0]
        return max(degs, default=0)


@dataclass(frozen=True)
class SymOrbit:
    """Symmetric orbit of internal nodes: representative in [0,1]^2 + total weight.

    ``kind='gs'`` reflects across both axes (<= 4 points); ``kind='gf'``
    additionally swaps the coordinates (<= 8 points).
    """

    x: float
    y: float
    weight: float
    kind: str = "gs"

    def __post_init__(self):
        if self.kind not in ("gs", "gf"):
            raise ValueError(f"orbit kind must be 'gs' or 'gf', got {self.kind!r}")
        if not (0.0 <= self.x <= 1.0 and 0.0 <= self.y <= 1.0):
            raise ValueError(f"orbit node ({self.x}, {self.y}) outside [0,1]^2")
        if not self.weight > 0.0:
            raise ValueError("orbit weight must be positive")


def monomial_basis(space: SpaceId) -> list[Polynomial2D]:
    """Unit monomials of ``space`` in the frozen graded order."""
    n = space.dim
    basis = []
    for m in range(n):
        c = np.zeros(n)
        c[m] = 1.0
        basis.append(Polynomial2D(space, c))
    return basis


def invariant_basis_gs(space: SpaceId) -> list[Polynomial2D]:
    """Monomials of ``space`` invariant under both axis reflections."""
    exps = exponents(space)
    n = space.dim
    basis = []
    for m, (i, j) in enumerate(exps):
        if i % 2 == 0 and j % 2 == 0:
            c = np.zeros(n)
            c[m] = 1.0
            basis.append(Polynomial2D(space, c))
    return basis


def invariant_basis_gf(k: int) -> list[Polynomial2D]:
    """Basis {(x^2 y^2)^a (x^2+y^2)^b : 4a+2b <= k} of the fully symmetric
    subspace of P^k (reflections and coordinate swap)."""
    space = SpaceId("P", k)
    index = {e: n for n, e in enumerate(exponents(space))}
    basis = []
    for a in range(k // 4 + 1):
        for b in range((k - 4 * a) // 2 + 1):
            c = np.zeros(space.dim)
            # (x^2 y^2)^a (x^2+y^2)^b expanded binomially
            for t in range(b + 1):
                c[index[(2 * a + 2 * t, 2 * a + 2 * (b - t))]] += math.comb(b, t)
            basis.append(Polynomial2D(space, c))
    return basis


def _mono_mean(i: int) -> float:
    """Mean of x^i over [-1,1]."""
    return 1.0 / (i + 1) if i % 2 == 0 else 0.0


def cell_average(p: Polynomial2D) -> float:
    """Mean of p over the cell [-1,1]^2."""
    total = 0.0
    for c, (i, j) in zip(p.coeffs, exponents(p.space)):
        total += c * _mono_mean(i) * _mono_mean(j)
    return total


def face_average_x(p: Polynomial2D) -> float:
    """Mean of p over the two faces x = +-1 (averaged pair)."""
    total = 0.0
    for c, (i, j) in zip(p.coeffs, exponents(p.space)):
        if i % 2 == 0:
            total += c * _mono_mean(j)
    return total


def face_average_y(p: Polynomial2D) -> float:
    """Mean of p over the two faces y = +-1 (averaged pair)."""
    total = 0.0
    for c, (i, j) in zip(p.coeffs, exponents(p.space)):
        if j % 2 == 0:
            total += c * _mono_mean(i)
    return total


def face_average_signed(p: Polynomial2D, face: str) -> float:
    """Mean over a single face: one of '+x', '-x', '+y', '-y'."""
    total = 0.0
    sign = -1.0 if face[0] == "-" else 1.0
    along_y = face[1] == "x"
    for c, (i, j) in zip(p.coeffs, exponents(p.space)):
        if along_y:
            total += c * sign**i * _mono_mean(j)
        else:
            total += c * sign**j * _mono_mean(i)
    return total


def orbit_average(p: Polynomial2D, orbit: SymOrbit) -> float:
    """Symmetric average of p over the orbit of (x, y)."""
    x, y = orbit.x, orbit.y
    gs = 0.25 * (p(x, y) + p(-x, y) + p(x, -y) + p(-x, -y))
    if orbit.kind == "gs":
        return gs
    swapped = 0.25 * (p(y, x) + p(-y, x) + p(y, -x) + p(-y, -x))
    return 0.5 * (gs + swapped)


def poly_mul(p: Polynomial2D, q: Polynomial2D) -> Polynomial2D:
    """Product polynomial, in the space of summed degree (same family)."""
    if p.space.family != q.space.family:
        raise ValueError("cannot multiply polynomials of different families")
    space = SpaceId(p.space.family, p.space.degree + q.space.degree)
    index = {e: n for n, e in enumerate(exponents(space))}
    out = np.zeros(space.dim)
    pe, qe = exponents(p.space), exponents(q.space)
    for cp, (i1, j1) in zip(p.coeffs, pe):
        if cp == 0.0:
            continue
        for cq, (i2, j2) in zip(q.coeffs, qe):
            if cq != 0.0:
                out[index[(i1 + i2, j1 + j2)]] += cp * cq
    return Polynomial2D(space, out)


@lru_cache(maxsize=None)
def _legendre_monomial_coeffs(n: int) -> np.ndarray:
    """Monomial coefficients (ascending powers) of the Legendre polynomial P_n."""
    if n == 0:
        return np.array([1.0])
    if n == 1:
        return np.array([0.0, 1.0])
    pm1 = _legendre_monomial_coeffs(n - 1)
    pm2 = _legendre_monomial_coeffs(n - 2)
    c = np.zeros(n + 1)
    c[1:] += (2 * n - 1) / n * pm1
    c[: n - 1] -= (n - 1) / n * pm2
    return c


@lru_cache(maxsize=None)
def legendre_matrix(space: SpaceId) -> np.ndarray:
    """Columns express the mean-orthonormal tensor-Legendre basis in monomials.

    Basis element m is ``sqrt(2i+1) P_i(x) * sqrt(2j+1) P_j(y)`` for the
    m-th exponent pair (i, j) of the space; the matrix C satisfies
    ``monomial_coeffs = C @ legendre_coeffs``.
    """
    exps = exponents(space)
    index = {e: n for n, e in enumerate(exps)}
    n = space.dim
    C = np.zeros((n, n))
    for m, (i, j) in enumerate(exps):
        ci = _legendre_monomial_coeffs(i) * np.sqrt(2 * i + 1)
        cj = _legendre_monomial_coeffs(j) * np.sqrt(2 * j + 1)
        for a, ca in enumerate(ci):
            if ca == 0.0:
                continue
            for b, cb in enumerate(cj):
                if cb != 0.0 and (a, b) in index:
                    C[index[(a, b)], m] += ca * cb
    return C


def to_legendre(p: Polynomial2D) -> np.ndarray:
    """Coefficients of p in the mean-orthonormal tensor-Legendre basis."""
    C = legendre_matrix(p.space)
    return np.linalg.solve(C, p.coeffs)


def from_legendre(space: SpaceId, coeffs: np.ndarray) -> Polynomial2D:
    """Polynomial from tensor-Legendre coefficients."""
    C = legendre_matrix(space)
    return Polynomial2D(space, C @ np.asarray(coeffs, dtype=float))
