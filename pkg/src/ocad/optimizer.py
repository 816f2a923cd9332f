"""Numeric optimality machinery for symmetric decompositions.

The sharp boundary weight over squared half-degree polynomials is the
reciprocal of the top eigenvalue of a small symmetric matrix pencil built
from cell and face moment matrices.  That value feeds three consumers: the
optimality criteria for analytic decompositions, the nonlinear system whose
solution yields numeric optima for k >= 8 (solved by damped least squares
with anisotropy continuation), and a pair of independent bounding oracles
(a grid LP from below, random squared polynomials from above).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .cad import SymmetricCAD, expand, verify_feasibility
from .constructors import classic_2d
from .polyspace import (
    Polynomial2D,
    SpaceId,
    SymOrbit,
    cell_average,
    face_average_x,
    face_average_y,
    legendre_matrix,
    exponents,
)
from .simplex import solve_lp

__all__ = [
    "MomentMatrices",
    "PhiStarResult",
    "SolverError",
    "moment_matrices",
    "phi_star_sq",
    "phi_of",
    "check_criterion_2",
    "check_criterion_4",
    "solve_ocad_system",
    "continuation_driver",
    "lower_bound_lp",
    "lower_bound_lp_1d",
    "upper_bound_sampling",
]


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class MomentMatrices:
    """Cell/face moment matrices over a half-degree basis."""

    half_space: SpaceId
    m_omega: np.ndarray
    m_x: np.ndarray
    m_y: np.ndarray
    basis: str  # 'monomial' or 'legendre'

    def m_theta(self, theta: float) -> np.ndarray:
        return (1.0 + theta) * self.m_x + (1.0 - theta) * self.m_y


@dataclass(frozen=True)
class PhiStarResult:
    value: float
    q_star: Polynomial2D
    eigen_multiplicity: int


def _mono_mean(i: int) -> float:
    return 1.0 / (i + 1) if i % 2 == 0 else 0.0


def moment_matrices(k: int, family: str = "P", basis: str = "legendre") -> MomentMatrices:
    """Moment matrices of the half-degree space of P^k or Q^k.

    In the tensor-Legendre basis the cell matrix is the identity, which keeps
    the eigenproblem well conditioned at high degree.
    """
    half = SpaceId(family, k // 2)
    exps = exponents(half)
    D = half.dim
    m_omega = np.empty((D, D))
    m_x = np.empty((D, D))
    m_y = np.empty((D, D))
    for a, (i1, j1) in enumerate(exps):
        for b, (i2, j2) in enumerate(exps):
            i, j = i1 + i2, j1 + j2
            m_omega[a, b] = _mono_mean(i) * _mono_mean(j)
            m_x[a, b] = (1.0 if i % 2 == 0 else 0.0) * _mono_mean(j)
            m_y[a, b] = _mono_mean(i) * (1.0 if j % 2 == 0 else 0.0)
    if basis == "legendre":
        C = legendre_matrix(half)
        m_omega = C.T @ m_omega @ C
        m_x = C.T @ m_x @ C
        m_y = C.T @ m_y @ C
    return MomentMatrices(half, m_omega, m_x, m_y, basis)


def phi_of(p: Polynomial2D, theta: float) -> float:
    """Cell mean over weighted face means of a nonnegative polynomial."""
    denom = (1.0 + theta) * face_average_x(p) + (1.0 - theta) * face_average_y(p)
    if denom == 0.0:
        return math.inf
    return cell_average(p) / denom


def phi_star_sq(k: int, theta: float, family: str = "P") -> PhiStarResult:
    """Sharp boundary-weight bound over squared half-degree polynomials.

    Solves the symmetric eigenproblem for the whitened face-moment matrix;
    the bound is the reciprocal top eigenvalue and the minimizing polynomial
    comes from the corresponding eigenvector.  When the top eigenvalue is
    (numerically) multiple, the eigenvector with the largest magnitude on
    the highest pure-y monomial is the reported representative.
    """
    mm = moment_matrices(k, family=family)
    L = np.linalg.cholesky(mm.m_omega)
    A = np.linalg.solve(L, np.linalg.solve(L, mm.m_theta(theta)).T)
    A = 0.5 * (A + A.T)
    evals, evecs = np.linalg.eigh(A)
    lam = evals[-1]
    if lam <= 0.0:
        raise SolverError("top eigenvalue is not positive")
    group = np.nonzero(evals >= lam * (1.0 - 1e-8))[0]
    half = mm.half_space
    exps = exponents(half)
    y_top = max(range(len(exps)), key=lambda m: exps[m][1] if exps[m][0] == 0 else -1)
    C = legendre_matrix(half)
    best, best_score = None, -1.0
    for idx in group:
        q_leg = np.linalg.solve(L.T, evecs[:, idx])
        mono = C @ q_leg
        score = abs(mono[y_top])
        if score > best_score:
            best, best_score = mono, score
    best = best / np.linalg.norm(best)
    if best[np.argmax(np.abs(best))] < 0:
        best = -best
    return PhiStarResult(1.0 / lam, Polynomial2D(half, best), int(len(group)))


def _expanded_nodes(cad: SymmetricCAD):
    return [(x, y) for x, y, _ in expand(cad).internal]


def check_criterion_2(
    cad: SymmetricCAD,
    p_star: Polynomial2D,
    vanish_tol: float = 1e-8,
    grid_n: int = 101,
    nonneg_tol: float = -1e-10,
) -> bool:
    """Certificate check: p_star >= 0 on a grid and vanishes at every node."""
    xs = np.linspace(-1.0, 1.0, grid_n)
    X, Y = np.meshgrid(xs, xs)
    if np.min(p_star(X, Y)) < nonneg_tol:
        return False
    return all(abs(p_star(x, y)) <= vanish_tol for x, y in _expanded_nodes(cad))


def check_criterion_4(cad: SymmetricCAD, tol: float = 1e-10) -> bool:
    """Boundary weight matches the squared-polynomial bound."""
    ref = phi_star_sq(cad.space.degree, cad.theta, cad.space.family)
    return abs(cad.boundary_weight - ref.value) <= tol


# -- nonlinear system for numeric optima --------------------------------------


def _gs_exponent_pairs(k: int):
    return [(i, j) for i, j in exponents(SpaceId("P", k)) if i % 2 == 0 and j % 2 == 0]


def _moment_targets(k: int, theta: float, wbar: float, pairs) -> np.ndarray:
    r = np.empty(len(pairs))
    for n, (i, j) in enumerate(pairs):
        cell = _mono_mean(i) * _mono_mean(j)
        fx = _mono_mean(j)  # i even for every invariant monomial
        fy = _mono_mean(i)
        r[n] = cell - wbar * ((1.0 + theta) * fx + (1.0 - theta) * fy)
    return r


def _seed_orbits(k: int, q_extra: int) -> list[tuple[float, float, float]]:
    Q = math.ceil((k + 1) / 2) + q_extra
    cad = classic_2d(SpaceId("P", k), -1.0, Q=Q)
    return [(o.x, o.y, o.weight) for o in cad.orbits]


def _residual_and_jac(z, pairs, targets, q_star, dqx, dqy):
    S = len(z) // 3
    x, y, w = z[:S], z[S : 2 * S], z[2 * S :]
    m = len(pairs)
    F = np.empty(S + m)
    J = np.zeros((S + m, 3 * S))
    F[:S] = q_star(x, y)
    J[np.arange(S), np.arange(S)] = dqx(x, y)
    J[np.arange(S), S + np.arange(S)] = dqy(x, y)
    for n, (i, j) in enumerate(pairs):
        gx = x**i * y**j
        F[S + n] = w @ gx - targets[n]
        row = S + n
        if i > 0:
            J[row, :S] = w * i * x ** (i - 1) * y**j
        if j > 0:
            J[row, S : 2 * S] = w * x**i * j * y ** (j - 1)
        J[row, 2 * S :] = gx
    return F, J


def solve_ocad_system(
    k: int,
    theta: float,
    warm_start=None,
    q_extra: int = 0,
    residual_target: float = 1e-12,
    max_iter: int = 200,
):
    """Solve the invariant-moment system pinning nodes on the zero set of the
    critical half-degree polynomial; returns a verified numeric optimum.

    ``theta`` must lie in [-1, 0]; positive anisotropy is served by
    reflecting the returned decomposition.  Returns ``(cad, info)`` with the
    final residual and iteration count in ``info``.
    """
    if k % 2 != 0 or k < 2:
        raise ValueError("the numeric system is solved for even k")
    if not -1.0 <= theta <= 0.0:
        raise ValueError("theta must lie in [-1, 0]")
    star = phi_star_sq(k, theta)
    wbar = star.value
    pairs = _gs_exponent_pairs(k)
    targets = _moment_targets(k, theta, wbar, pairs)
    q_star = star.q_star
    dqx, dqy = q_star.partial("x"), q_star.partial("y")

    orbits = warm_start if warm_start is not None else _seed_orbits(k, q_extra)
    S = len(orbits)
    z = np.concatenate(
        [
            np.array([o[0] for o in orbits]),
            np.array([o[1] for o in orbits]),
            np.array([o[2] for o in orbits]),
        ]
    )

    lam = 1e-8
    F, J = _residual_and_jac(z, pairs, targets, q_star, dqx, dqy)
    norm = np.max(np.abs(F))
    history = [(0, float(norm))]
    iters = 0
    for iters in range(1, max_iter + 1):
        if norm <= residual_target:
            break
        scale = np.sqrt(np.sum(J * J, axis=0))
        scale[scale == 0.0] = 1.0
        Jhat = np.vstack([J, math.sqrt(lam) * np.diag(scale)])
        rhs = np.concatenate([-F, np.zeros(3 * S)])
        step = np.linalg.lstsq(Jhat, rhs, rcond=None)[0]
        z_new = z + step
        z_new[: 2 * S] = np.clip(z_new[: 2 * S], 0.0, 1.0)
        F_new, J_new = _residual_and_jac(z_new, pairs, targets, q_star, dqx, dqy)
        norm_new = np.max(np.abs(F_new))
        if norm_new < norm:
            z, F, J, norm = z_new, F_new, J_new, norm_new
            lam = max(lam / 4.0, 1e-14)
        else:
            lam *= 10.0
            if lam > 1e8:
                break
        history.append((iters, float(norm)))
    if norm > residual_target:
        raise SolverError(
            f"no convergence for k={k}, theta={theta:+.3f} (residual {norm:.3e})"
        )

    S = len(z) // 3
    xs, ys, ws = z[:S], z[S : 2 * S], z[2 * S :]
    if np.any(ws < -1e-12):
        raise SolverError("infeasible stationary point: negative weight")
    keep = ws > 1e-13
    orbs = tuple(
        SymOrbit(float(x), float(y), float(w), "gs")
        for x, y, w in zip(xs[keep], ys[keep], ws[keep])
    )
    cad = SymmetricCAD(SpaceId("P", k), theta, wbar, orbs, "numeric")
    report = verify_feasibility(cad)
    if not report.feasible:
        raise SolverError(
            f"infeasible stationary point (residual {report.max_residual:.3e})"
        )
    for x, y, _ in expand(cad).internal:
        if abs(q_star(x, y)) > 1e-10:
            raise SolverError("stationary point violates the vanishing certificate")
    info = {
        "residual": float(norm),
        "iterations": iters,
        "orbits": int(keep.sum()),
        "history": history,
    }
    return cad, info


def continuation_driver(
    k: int,
    theta_target: float,
    dtheta: float = 0.05,
    q_extra: int = 0,
    residual_target: float = 1e-12,
    log_path=None,
    collect=None,
):
    """March the nonlinear solve from theta = -1 to the target with warm starts.

    ``collect`` may list intermediate theta values whose solved decompositions
    are wanted; they are snapped onto the continuation grid.  Returns
    ``(cad, record)`` where record maps collected theta values to
    ``(cad, info)``.  Retries with extra seed orbits and a finer grid before
    giving up.
    """
    if not -1.0 <= theta_target <= 0.0:
        raise ValueError("continuation targets theta in [-1, 0]")
    attempts = [(q_extra, dtheta), (q_extra, dtheta / 2), (q_extra + 1, dtheta), (q_extra + 2, dtheta)]
    last_exc = None
    for extra, step in attempts:
        try:
            return _continuation_once(
                k, theta_target, step, extra, residual_target, log_path, collect
            )
        except SolverError as exc:
            last_exc = exc
    raise SolverError(f"continuation failed for k={k}: {last_exc}")


def _solve_pruning(k, theta, orbits, residual_target):
    """Solve one theta step, pruning near-dead orbits if the full set stalls.

    A continuation branch can lose an orbit (its weight crosses zero, e.g.
    the even-k axis orbit as theta approaches 0); retrying without the
    lightest orbits lands on the reduced branch.
    """
    last_exc = None
    for prune in (0.0, 1e-3, 1e-2, 6e-2):
        trial = [o for o in orbits if o[2] > prune]
        if not trial:
            break
        try:
            return solve_ocad_system(
                k, theta, warm_start=trial, residual_target=residual_target
            )
        except SolverError as exc:
            last_exc = exc
    raise last_exc


def _continuation_once(k, theta_target, dtheta, q_extra, residual_target, log_path, collect):
    thetas = [-1.0]
    t = -1.0
    while t < theta_target - 1e-12:
        t = min(t + dtheta, theta_target)
        thetas.append(t)
    wanted = sorted(set(collect or []))
    record = {}
    rows = []
    orbits = _seed_orbits(k, q_extra)
    cad, info = None, {"residual": 0.0, "iterations": 0}
    for t in thetas:
        cad, info = _solve_pruning(k, t, orbits, residual_target)
        # keep dropped zero-weight orbits out of the warm start
        orbits = [(o.x, o.y, o.weight) for o in cad.orbits]
        for it, res in info["history"]:
            rows.append((t, it, res))
        for w in wanted:
            if abs(w - t) < min(dtheta / 2, 1e-9) or (w == t):
                record[w] = (cad, info)
    if log_path is not None:
        with open(log_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["theta", "iter", "residual"])
            for t, it, res in rows:
                writer.writerow([f"{t:.12g}", it, f"{res:.12g}"])
    return cad, record


# -- independent bounding oracles ----------------------------------------------


def lower_bound_lp(k: int, theta: float, grid_n: int, family: str = "P") -> float:
    """Feasible lower bound: maximize the boundary weight over decompositions
    whose interior nodes live on a grid_n x grid_n lattice in [0,1]^2.

    Any LP optimum is itself a feasible symmetric decomposition, so the value
    never exceeds the true optimum.
    """
    if grid_n < 2:
        raise ValueError("grid_n must be >= 2")
    pairs = [(i, j) for i, j in exponents(SpaceId(family, k)) if i % 2 == 0 and j % 2 == 0]
    m = len(pairs)
    xs = np.linspace(0.0, 1.0, grid_n)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    xf, yf = X.ravel(), Y.ravel()
    n = 1 + xf.size
    A = np.empty((m, n))
    b = np.empty(m)
    for row, (i, j) in enumerate(pairs):
        A[row, 0] = (1.0 + theta) * _mono_mean(j) + (1.0 - theta) * _mono_mean(i)
        A[row, 1:] = xf**i * yf**j
        b[row] = _mono_mean(i) * _mono_mean(j)
    c = np.zeros(n)
    c[0] = 1.0
    _, value = solve_lp(c, A, b)
    return value


def lower_bound_lp_1d(k: int, grid_n: int = 201) -> float:
    """1D oracle: maximize min(boundary weights) over grid-node decompositions."""
    xs = np.linspace(-1.0, 1.0, grid_n)
    m = k + 1
    # variables: t, s-, s+, node weights;  omega-+ = t + s-+
    n = 3 + grid_n
    A = np.empty((m, n))
    b = np.empty(m)
    for deg in range(m):
        A[deg, 0] = (-1.0) ** deg + 1.0
        A[deg, 1] = (-1.0) ** deg
        A[deg, 2] = 1.0
        A[deg, 3:] = xs**deg
        b[deg] = _mono_mean(deg)
    c = np.zeros(n)
    c[0] = 1.0
    _, value = solve_lp(c, A, b)
    return value


def upper_bound_sampling(
    k: int, theta: float, trials: int, seed: int = 0, family: str = "P"
) -> float:
    """Upper bound: minimum of the mean/face-mean ratio over random squared
    half-degree polynomials, plus the eigenvector minimizer itself."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    mm = moment_matrices(k, family=family)
    m_theta = mm.m_theta(theta)
    star = phi_star_sq(k, theta, family)
    rng = np.random.default_rng(seed)
    V = rng.standard_normal((trials, mm.half_space.dim))
    num = np.einsum("td,de,te->t", V, mm.m_omega, V)
    den = np.einsum("td,de,te->t", V, m_theta, V)
    ok = den > 0.0
    best = float(np.min(num[ok] / den[ok])) if ok.any() else math.inf
    return min(best, star.value)
