"""Modal DG solver with bound-preserving limiting driven by a decomposition.

The decomposition enters in exactly two places: the BP CFL step size is
proportional to its boundary weight, and the limiter checks either its
interior nodes (full mode) or the single aggregated interior value
reconstructed from the boundary traces (simplified mode).  The spatial
discretization itself never touches it, so decompositions are
interchangeable at fixed step size.
"""

from __future__ import annotations

import csv
import math
import os
import time
from dataclasses import dataclass

import numpy as np

from ..cad import SymmetricCAD, expand, load as load_cad, theta_of
from ..constructors import classic_2d, ocad_pk, quasi_optimal
from ..polyspace import SpaceId
from . import kernels
from .basis import modal_basis
from .mesh import Mesh2D
from .problems import Advection, Burgers, Euler, conservative_state


@dataclass
class DGField:
    """Per-cell modal coefficients, layout (ny, nx, ncomp, nmodes)."""

    k: int
    mesh: Mesh2D
    coeffs: np.ndarray

    @property
    def ncomp(self) -> int:
        return self.coeffs.shape[2]

    @property
    def cell_averages(self) -> np.ndarray:
        return self.coeffs[..., 0]

    def copy(self) -> "DGField":
        return DGField(self.k, self.mesh, self.coeffs.copy())


def _cell_points(mesh: Mesh2D, ref_xy: np.ndarray):
    """Physical coordinates of reference points in every cell, (ny, nx, npts)."""
    shape = (mesh.ny, mesh.nx, ref_xy.shape[0])
    cx = mesh.centers_x[None, :, None]
    cy = mesh.centers_y[:, None, None]
    X = np.broadcast_to(cx + 0.5 * mesh.dx * ref_xy[None, None, :, 0], shape).copy()
    Y = np.broadcast_to(cy + 0.5 * mesh.dy * ref_xy[None, None, :, 1], shape).copy()
    return X, Y


def l2_project(ic, mesh: Mesh2D, k: int, ncomp: int = 1) -> DGField:
    """Cell-wise L2 projection using the (k+2)^2 tensor Gauss rule."""
    basis = modal_basis(k)
    X, Y = _cell_points(mesh, basis.vol_xy)
    vals = np.asarray(ic(X, Y))
    if vals.ndim == 3:
        vals = vals[:, :, None, :]
    coeffs = vals @ basis.project_table  # (ny, nx, m, nmodes)
    assert coeffs.shape == (mesh.ny, mesh.nx, ncomp, basis.nmodes)
    return DGField(k, mesh, np.ascontiguousarray(coeffs))


def _eval(coeffs: np.ndarray, table: np.ndarray) -> np.ndarray:
    ny, nx, m, nm = coeffs.shape
    flat = kernels.eval_points(coeffs.reshape(-1, nm), table)
    return flat.reshape(ny, nx, m, table.shape[1])


def traces(field: DGField):
    """Face-trace values {xm, xp, ym, yp}, each (ny, nx, ncomp, Q)."""
    basis = modal_basis(field.k)
    Q = basis.face_q
    merged = _eval(field.coeffs, basis.b_face_all)
    order = ("xm", "xp", "ym", "yp")
    return {key: merged[..., i * Q : (i + 1) * Q] for i, key in enumerate(order)}


def lf_flux(uL, uR, fL, fR, alpha: float):
    """Lax-Friedrichs flux (kernel-backed)."""
    return kernels.lf_flux(uL, uR, fL, fR, alpha)


def _interface_states(tr, mesh: Mesh2D, axis: str, inflow):
    """Left/right (or bottom/top) interface states including ghost closure."""
    if axis == "x":
        minus, plus = tr["xm"], tr["xp"]
        ny, nx, m, Q = minus.shape
        uL = np.empty((ny, nx + 1, m, Q))
        uR = np.empty((ny, nx + 1, m, Q))
        uL[:, 1:] = plus
        uR[:, :nx] = minus
        lo_kind, hi_kind = mesh.bc["left"], mesh.bc["right"]
        if lo_kind == "periodic":
            uL[:, 0] = plus[:, -1]
        elif lo_kind == "outflow":
            uL[:, 0] = minus[:, 0]
        else:
            uL[:, 0] = inflow["left"][None, :, None]
        if hi_kind == "periodic":
            uR[:, nx] = minus[:, 0]
        elif hi_kind == "outflow":
            uR[:, nx] = plus[:, -1]
        else:
            uR[:, nx] = inflow["right"][None, :, None]
        return uL, uR
    minus, plus = tr["ym"], tr["yp"]
    ny, nx, m, Q = minus.shape
    uL = np.empty((ny + 1, nx, m, Q))
    uR = np.empty((ny + 1, nx, m, Q))
    uL[1:] = plus
    uR[:ny] = minus
    lo_kind, hi_kind = mesh.bc["bottom"], mesh.bc["top"]
    if lo_kind == "periodic":
        uL[0] = plus[-1]
    elif lo_kind == "outflow":
        uL[0] = minus[0]
    else:
        uL[0] = inflow["bottom"][None, :, None]
    if hi_kind == "periodic":
        uR[ny] = minus[0]
    elif hi_kind == "outflow":
        uR[ny] = plus[-1]
    else:
        uR[ny] = inflow["top"][None, :, None]
    return uL, uR


def dg_rhs(field: DGField, problem, alphas=None, inflow=None, tr=None):
    """Semi-discrete right-hand side for the modal coefficients.

    The mean-mode row is algebraically the Gauss-quadrature flux difference
    of the cell-average evolution; higher modes add the standard weak-form
    volume terms.
    """
    mesh = field.mesh
    basis = modal_basis(field.k)
    if tr is None:
        tr = traces(field)
    if alphas is None:
        alphas = problem.wave_speeds(list(tr.values()))
    a1, a2 = alphas

    def contract(vals, table):
        # one large GEMM instead of a batch of tiny per-cell products
        lead = vals.shape[:-1]
        flat = np.ascontiguousarray(vals).reshape(-1, vals.shape[-1])
        return (flat @ table).reshape(*lead, table.shape[1])

    uL, uR = _interface_states(tr, mesh, "x", inflow)
    fx = lf_flux(uL, uR, problem.flux_x(uL), problem.flux_x(uR), a1)
    term_xp = contract(fx[:, 1:], basis.face_mean["xp"])
    term_xm = contract(fx[:, :-1], basis.face_mean["xm"])

    uB, uT = _interface_states(tr, mesh, "y", inflow)
    fy = lf_flux(uB, uT, problem.flux_y(uB), problem.flux_y(uT), a2)
    term_yp = contract(fy[1:], basis.face_mean["yp"])
    term_ym = contract(fy[:-1], basis.face_mean["ym"])

    dU = -(term_xp - term_xm) / mesh.dx - (term_yp - term_ym) / mesh.dy
    if field.k > 0:
        uvol = _eval(field.coeffs, basis.b_vol)
        f1, f2 = problem.fluxes(uvol)
        dU += (2.0 / mesh.dx) * contract(f1, basis.vol_mean_dx)
        dU += (2.0 / mesh.dy) * contract(f2, basis.vol_mean_dy)
    return dU


def mean_rhs_oracle(field: DGField, problem, alphas, inflow=None):
    """Independent cell-average flux-difference evolution (plain loops).

    Cross-checks the mean mode of :func:`dg_rhs`; test-sized meshes only.
    """
    mesh = field.mesh
    basis = modal_basis(field.k)
    tr = traces(field)
    a1, a2 = alphas
    wq = basis.face_weights
    ny, nx, m, Q = tr["xm"].shape
    out = np.zeros((ny, nx, m))
    uL, uR = _interface_states(tr, mesh, "x", inflow)
    uB, uT = _interface_states(tr, mesh, "y", inflow)
    for j in range(ny):
        for i in range(nx):
            left = np.zeros(m)
            right = np.zeros(m)
            bottom = np.zeros(m)
            top = np.zeros(m)
            for q in range(Q):
                fl = 0.5 * (
                    problem.flux_x(uL[j, i, :, q : q + 1])
                    + problem.flux_x(uR[j, i, :, q : q + 1])
                ) - 0.5 * a1 * (uR[j, i, :, q : q + 1] - uL[j, i, :, q : q + 1])
                fr = 0.5 * (
                    problem.flux_x(uL[j, i + 1, :, q : q + 1])
                    + problem.flux_x(uR[j, i + 1, :, q : q + 1])
                ) - 0.5 * a1 * (uR[j, i + 1, :, q : q + 1] - uL[j, i + 1, :, q : q + 1])
                fb = 0.5 * (
                    problem.flux_y(uB[j, i, :, q : q + 1])
                    + problem.flux_y(uT[j, i, :, q : q + 1])
                ) - 0.5 * a2 * (uT[j, i, :, q : q + 1] - uB[j, i, :, q : q + 1])
                ft = 0.5 * (
                    problem.flux_y(uB[j + 1, i, :, q : q + 1])
                    + problem.flux_y(uT[j + 1, i, :, q : q + 1])
                ) - 0.5 * a2 * (uT[j + 1, i, :, q : q + 1] - uB[j + 1, i, :, q : q + 1])
                left += wq[q] * fl[:, 0]
                right += wq[q] * fr[:, 0]
                bottom += wq[q] * fb[:, 0]
                top += wq[q] * ft[:, 0]
            out[j, i] = -(right - left) / mesh.dx - (top - bottom) / mesh.dy
    return out


def compute_dt(field: DGField, problem, cad: SymmetricCAD, c0=1.0, cssp=1.0, dt_max=None):
    """BP/linear-stability step size; returns (dt, active_bound_name)."""
    if getattr(problem, "constant_speeds", False):
        a1, a2 = problem.wave_speeds([])
    else:
        tr = traces(field)
        a1, a2 = problem.wave_speeds(list(tr.values()))
    mesh = field.mesh
    denom = a1 / mesh.dx + a2 / mesh.dy
    if denom <= 0.0:
        dt = dt_max if dt_max is not None else math.inf
        return dt, "dt_max"
    bp = cad.boundary_weight * c0
    linear = 1.0 / (2 * field.k + 1)
    coeff = min(bp, linear)
    active = "bp" if bp <= linear else "linear"
    dt = cssp * coeff / denom
    if dt_max is not None and dt > dt_max:
        return dt_max, "dt_max"
    return dt, active


def _minmod_tvb(a, b, c, m_dx2):
    """TVB-corrected minmod: keep a where |a| <= M dx^2, else minmod(a,b,c)."""
    keep = np.abs(a) <= m_dx2
    sgn = np.sign(a)
    agree = (np.sign(b) == sgn) & (np.sign(c) == sgn)
    mm = np.where(agree, sgn * np.minimum(np.abs(a), np.minimum(np.abs(b), np.abs(c))), 0.0)
    return np.where(keep, a, mm), keep


def _padded_mean_diffs(ubar, mesh, axis):
    """Forward/backward neighbor mean differences with boundary closure."""
    if axis == "x":
        periodic = mesh.bc["left"] == "periodic"
        roll_ax = 1
    else:
        periodic = mesh.bc["bottom"] == "periodic"
        roll_ax = 0
    if periodic:
        fwd = np.roll(ubar, -1, axis=roll_ax) - ubar
        bwd = ubar - np.roll(ubar, 1, axis=roll_ax)
    else:
        # replicate edge means: one-sided differences vanish at the boundary
        fwd = np.zeros_like(ubar)
        bwd = np.zeros_like(ubar)
        if axis == "x":
            fwd[:, :-1] = ubar[:, 1:] - ubar[:, :-1]
            bwd[:, 1:] = fwd[:, :-1]
        else:
            fwd[:-1] = ubar[1:] - ubar[:-1]
            bwd[1:] = fwd[:-1]
    return fwd, bwd


def tvb_limit(field: DGField, tvb_m: float = 0.0) -> DGField:
    """Componentwise TVB minmod troubled-cell limiter on the linear modes.

    Cells whose rescaled slope disagrees with the minmod of neighbor mean
    differences get the minmod slope and lose all higher modes.  Simpler and
    more dissipative than a WENO reconstruction, but enough oscillation
    control for the shock cases here.
    """
    if field.k == 0:
        return field
    mesh = field.mesh
    coeffs = field.coeffs
    ubar = coeffs[..., 0]
    s3 = math.sqrt(3.0)
    # mode order is graded: index 1 is (1,0), index 2 is (0,1)
    ux = s3 * coeffs[..., 1]
    uy = s3 * coeffs[..., 2]
    fwd_x, bwd_x = _padded_mean_diffs(ubar, mesh, "x")
    fwd_y, bwd_y = _padded_mean_diffs(ubar, mesh, "y")
    new_ux, keep_x = _minmod_tvb(ux, fwd_x, bwd_x, tvb_m * mesh.dx**2)
    new_uy, keep_y = _minmod_tvb(uy, fwd_y, bwd_y, tvb_m * mesh.dy**2)
    troubled = ~(keep_x & keep_y)
    if not troubled.any():
        return field
    out = coeffs.copy()
    out[..., 1] = np.where(troubled, new_ux / s3, coeffs[..., 1])
    out[..., 2] = np.where(troubled, new_uy / s3, coeffs[..., 2])
    if coeffs.shape[-1] > 3:
        out[..., 3:] *= np.where(troubled, 0.0, 1.0)[..., None]
    return DGField(field.k, field.mesh, out)


# -- BP limiters ----------------------------------------------------------------


class Limiter:
    """Mean-preserving scaling limiter bound to one decomposition."""

    def __init__(
        self,
        cad: SymmetricCAD,
        mode: str = "simplified",
        workers: int = 1,
        track: bool = False,
        tvb_m: float | None = None,
    ):
        if mode not in ("full", "simplified", "none"):
            raise ValueError(f"unknown limiter mode {mode!r}")
        self.cad = cad
        self.mode = mode
        self.workers = max(1, workers)
        self.track = track  # audit post-limit check values (costs a second pass)
        self.tvb_m = tvb_m  # troubled-cell prepass when not None
        self._node_table = {}
        self.last_check_min = math.inf
        self.last_check_max = -math.inf

    def _nodes_matrix(self, k: int) -> np.ndarray:
        if k not in self._node_table:
            basis = modal_basis(k)
            pts = expand(self.cad).internal
            if pts:
                xs = np.array([p[0] for p in pts])
                ys = np.array([p[1] for p in pts])
                self._node_table[k] = basis.eval_matrix(xs, ys)
            else:
                self._node_table[k] = np.zeros((basis.nmodes, 0))
        return self._node_table[k]

    def _check_table(self, k: int) -> np.ndarray:
        basis = modal_basis(k)
        mats = [basis.b_face[key] for key in ("xm", "xp", "ym", "yp")]
        if self.mode == "full":
            mats.append(self._nodes_matrix(k))
        return np.ascontiguousarray(np.concatenate(mats, axis=1))

    def _minmax(self, coeffs2d: np.ndarray, table: np.ndarray):
        """Row-wise min/max of point values, chunked over OCAD_THREADS workers.

        Chunks write disjoint output slices, so the result is deterministic
        for any worker count.
        """
        if self.workers <= 1 or coeffs2d.shape[0] < 4 * self.workers:
            return kernels.eval_minmax(coeffs2d, table)
        from concurrent.futures import ThreadPoolExecutor

        rows = coeffs2d.shape[0]
        lo = np.empty(rows)
        hi = np.empty(rows)
        bounds_list = np.linspace(0, rows, self.workers + 1).astype(int)

        def work(a, b):
            lo[a:b], hi[a:b] = kernels.eval_minmax(
                np.ascontiguousarray(coeffs2d[a:b]), table
            )

        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            futures = [
                pool.submit(work, bounds_list[i], bounds_list[i + 1])
                for i in range(self.workers)
            ]
            for f in futures:
                f.result()
        return lo, hi

    def _pi_value(self, field: DGField, tr):
        """Aggregated interior value from boundary traces (simplified mode)."""
        cad = self.cad
        wq = modal_basis(field.k).face_weights
        mean_x = (tr["xm"] + tr["xp"]) @ wq
        mean_y = (tr["ym"] + tr["yp"]) @ wq
        wbar, th = cad.boundary_weight, cad.theta
        interior = 1.0 - 2.0 * wbar
        if interior <= 1e-14:
            return None
        ubar = field.cell_averages
        return (ubar - wbar * (0.5 * (1 + th) * mean_x + 0.5 * (1 - th) * mean_y)) / interior

    def limit_scalar(self, field: DGField, bounds) -> DGField:
        if self.mode == "none":
            return field
        umin, umax = bounds
        basis = modal_basis(field.k)
        ubar = field.cell_averages[..., 0]
        if np.min(ubar) < umin - 1e-12 or np.max(ubar) > umax + 1e-12:
            raise RuntimeError("cell average escaped the invariant region")
        nm = field.coeffs.shape[-1]
        Q = basis.face_q
        tv = _eval(field.coeffs, basis.b_face_all)  # all face traces, one pass
        lo = tv[..., 0, :].min(axis=-1)
        hi = tv[..., 0, :].max(axis=-1)
        pi = None
        if self.mode == "simplified":
            wbar, th = self.cad.boundary_weight, self.cad.theta
            interior = 1.0 - 2.0 * wbar
            if interior > 1e-14:
                wq = basis.face_weights
                mean_x = (tv[..., 0, :Q] + tv[..., 0, Q : 2 * Q]) @ wq
                mean_y = (tv[..., 0, 2 * Q : 3 * Q] + tv[..., 0, 3 * Q :]) @ wq
                pi = (
                    ubar
                    - wbar * (0.5 * (1 + th) * mean_x + 0.5 * (1 - th) * mean_y)
                ) / interior
                lo = np.minimum(lo, pi)
                hi = np.maximum(hi, pi)
        else:
            node_tab = self._nodes_matrix(field.k)
            if node_tab.shape[1]:
                nlo, nhi = self._minmax(field.coeffs.reshape(-1, nm), node_tab)
                lo = np.minimum(lo, nlo.reshape(ubar.shape))
                hi = np.maximum(hi, nhi.reshape(ubar.shape))
        tiny = 1e-300
        d_hi = np.where(hi > umax, (umax - ubar) / (hi - ubar + tiny), 1.0)
        d_lo = np.where(lo < umin, (ubar - umin) / (ubar - lo + tiny), 1.0)
        delta = np.clip(np.minimum(d_hi, d_lo), 0.0, 1.0)
        out = kernels.scale_about_mean(
            field.coeffs.reshape(-1, nm), delta.reshape(-1)
        ).reshape(field.coeffs.shape)
        limited = DGField(field.k, field.mesh, out)
        if self.track:
            # limiting is affine about the mean, so check values transform too
            lo2 = ubar + delta * (lo - ubar)
            hi2 = ubar + delta * (hi - ubar)
            self.last_check_min = min(self.last_check_min, float(lo2.min()))
            self.last_check_max = max(self.last_check_max, float(hi2.max()))
        return limited

    def _euler_check_values(self, field: DGField, merged=None):
        """Face traces + aggregated interior value (+ nodes in full mode)."""
        basis = modal_basis(field.k)
        if merged is None:
            merged = _eval(field.coeffs, basis.b_face_all)
        vals = [merged]
        wbar, th = self.cad.boundary_weight, self.cad.theta
        interior = 1.0 - 2.0 * wbar
        if interior > 1e-14:
            Q = basis.face_q
            wq = basis.face_weights
            mean_x = (merged[..., :Q] + merged[..., Q : 2 * Q]) @ wq
            mean_y = (merged[..., 2 * Q : 3 * Q] + merged[..., 3 * Q :]) @ wq
            pi = (
                field.cell_averages
                - wbar * (0.5 * (1 + th) * mean_x + 0.5 * (1 - th) * mean_y)
            ) / interior
            vals.append(pi[..., None])
        if self.mode == "full":
            node_tab = self._nodes_matrix(field.k)
            if node_tab.shape[1]:
                vals.append(_eval(field.coeffs, node_tab))
        return np.concatenate(vals, axis=-1) if len(vals) > 1 else merged

    def limit_euler(self, field: DGField, problem: Euler) -> DGField:
        if self.mode == "none":
            return field
        coeffs = field.coeffs
        ubar = field.cell_averages  # (ny, nx, 4)
        rho_bar = ubar[..., 0]
        rho_e_bar = problem.rho_e(ubar[..., None])[..., 0]
        if np.min(rho_bar) <= 0.0 or np.min(rho_e_bar) <= 0.0:
            raise RuntimeError("inadmissible cell average")

        # stage 1: positive density
        merged = _eval(coeffs, modal_basis(field.k).b_face_all)
        vals = self._euler_check_values(field, merged)
        rho_min = vals[..., 0, :].min(axis=-1)
        eps1 = np.minimum(1e-13, rho_bar)
        tiny = 1e-300
        th1 = np.where(
            rho_min < eps1,
            np.abs(rho_bar - eps1) / (np.abs(rho_bar - rho_min) + tiny),
            1.0,
        )
        th1 = np.clip(th1, 0.0, 1.0)
        out = coeffs.copy()
        out[..., 0, 1:] *= th1[..., None]
        stage1 = DGField(field.k, field.mesh, out)

        # stage 2: positive internal energy; density traces rescale affinely,
        # so the stage-1 trace table is updated in place of a re-evaluation
        merged2 = merged.copy()
        merged2[..., 0, :] = rho_bar[..., None] + th1[..., None] * (
            merged[..., 0, :] - rho_bar[..., None]
        )
        vals = self._euler_check_values(stage1, merged2)
        rho_e_min = problem.rho_e(vals).min(axis=-1)
        eps2 = np.minimum(1e-13, rho_e_bar)
        th2 = np.where(
            rho_e_min < eps2,
            np.abs(rho_e_bar - eps2) / (np.abs(rho_e_bar - rho_e_min) + tiny),
            1.0,
        )
        th2 = np.clip(th2, 0.0, 1.0)
        out2 = stage1.coeffs.copy()
        out2[..., 1:] *= th2[..., None, None]
        limited = DGField(field.k, field.mesh, out2)
        if self.track:
            final_vals = self._euler_check_values(limited)
            self.last_check_min = min(
                self.last_check_min,
                float(final_vals[..., 0, :].min()),
                float(problem.rho_e(final_vals).min()),
            )
        return limited

    def apply(self, field: DGField, problem, bounds=None) -> DGField:
        if self.mode == "none":
            return field
        if self.tvb_m is not None:
            field = tvb_limit(field, self.tvb_m)
        if problem.m == 1:
            return self.limit_scalar(field, bounds)
        return self.limit_euler(field, problem)


def bp_limit_scalar(field: DGField, cad: SymmetricCAD, bounds, mode: str = "simplified") -> DGField:
    """One-shot scalar BP limiting against a decomposition."""
    return Limiter(cad, mode).limit_scalar(field, bounds)


def bp_limit_euler(field: DGField, cad: SymmetricCAD, problem: Euler | None = None) -> DGField:
    """One-shot Euler BP limiting (positive density, then internal energy)."""
    return Limiter(cad, "simplified").limit_euler(field, problem or Euler())


def ssp_rk3_step(
    field: DGField,
    problem,
    dt: float,
    limiter: Limiter,
    bounds=None,
    inflow=None,
    per_stage: bool = True,
):
    """Shu-Osher three-stage step.

    ``per_stage=True`` limits after every stage (the BP guarantee needs
    admissible stage inputs).  ``per_stage=False`` limits once per step,
    matching how single-evaluation SSP multistep methods are limited;
    transient stage overshoots then never get clipped, which keeps smooth
    extrema clean in accuracy studies.
    """

    def stage(u_field):
        du = dg_rhs(u_field, problem, inflow=inflow)
        if np.isnan(du).any():
            j, i = np.argwhere(np.isnan(du))[0][:2]
            raise FloatingPointError(f"NaN in RHS at cell (ix={i}, iy={j})")
        return du

    def maybe_limit(f):
        return limiter.apply(f, problem, bounds) if per_stage else f

    u0 = field.coeffs
    u1 = u0 + dt * stage(field)
    f1 = maybe_limit(DGField(field.k, field.mesh, u1))
    u2 = 0.75 * u0 + 0.25 * (f1.coeffs + dt * stage(f1))
    f2 = maybe_limit(DGField(field.k, field.mesh, u2))
    u3 = u0 / 3.0 + 2.0 / 3.0 * (f2.coeffs + dt * stage(f2))
    return limiter.apply(DGField(field.k, field.mesh, u3), problem, bounds)


# -- case driver ----------------------------------------------------------------


def _sine_sum(x, y):
    return np.sin(np.pi * (x + y))[..., None, :]


def _advection_exact(t, ax, ay):
    def ic(x, y):
        return np.sin(np.pi * (x + y - (ax + ay) * t))[..., None, :]

    return ic


def _shock_vortex_ic(gamma: float, mach: float, params: dict):
    """Stationary shock at x = shock_x with an isentropic low-pressure vortex
    superposed on the upstream state."""
    shock_x = params.get("shock_x", 0.5)
    eps = params.get("vortex_strength", 1.378106)
    alpha = params.get("vortex_decay", 0.204)
    rc = params.get("vortex_radius", 0.4)
    xc, yc = params.get("vortex_center", (0.25, 0.5))
    rho_l, v1_l, v2_l, p_l = 1.0, mach * math.sqrt(gamma), 0.0, 1.0
    m2 = mach * mach
    rho_r = rho_l * (gamma + 1) * m2 / (2 + (gamma - 1) * m2)
    p_r = p_l * (1 + 2 * gamma / (gamma + 1) * (m2 - 1))
    v1_r = v1_l * (2 + (gamma - 1) * m2) / ((gamma + 1) * m2)

    def ic(x, y):
        xb, yb = x - xc, y - yc
        r2 = (xb * xb + yb * yb) / (rc * rc)
        bump = np.exp(alpha * (1.0 - r2))
        dv1 = eps / rc * bump * yb
        dv2 = -eps / rc * bump * xb
        dT = -(gamma - 1) * eps * eps / (4 * alpha * gamma) * bump * bump
        upstream = x < shock_x
        T = np.where(upstream, p_l / rho_l + dT, p_r / rho_r)
        T = np.maximum(T, 1e-14)
        # upstream entropy p/rho^gamma = 1: rho = T^(1/(gamma-1))
        rho = np.where(upstream, T ** (1.0 / (gamma - 1)), rho_r)
        P = np.where(upstream, rho * T, p_r)
        v1 = np.where(upstream, v1_l + dv1, v1_r)
        v2 = np.where(upstream, dv2, 0.0)
        return conservative_state(gamma, rho, v1, v2, P)

    E_l = 0.5 * rho_l * v1_l * v1_l + p_l / (gamma - 1.0)
    left_state = np.array([rho_l, rho_l * v1_l, rho_l * v2_l, E_l])
    return ic, left_state


def _build_problem(cfg: dict):
    kind = cfg.get("kind", "advection")
    if kind == "advection":
        return Advection(cfg.get("ax", 1.0), cfg.get("ay", 1.0))
    if kind == "burgers":
        return Burgers()
    if kind == "euler":
        return Euler(cfg.get("gamma", 1.4))
    raise ValueError(f"unknown problem kind {kind!r}")


def select_cad(selection: str, k: int, theta: float, theta0_cad=None) -> SymmetricCAD:
    """Build the decomposition named by a config value."""
    from dataclasses import replace

    space = SpaceId("P", k)
    if selection.startswith("file:"):
        return load_cad(selection[5:])
    if selection == "classic":
        return classic_2d(space, theta, Q=k + 1)
    if selection == "optimal":
        if k <= 7:
            return ocad_pk(k, theta)
        from ..optimizer import continuation_driver
        from ..cad import reflect_theta

        cad, _ = continuation_driver(k - (k % 2), -abs(theta))
        if theta > 0:
            cad = reflect_theta(cad)
        return replace(cad, space=space)
    if selection == "quasi":
        return quasi_optimal(k, theta, theta0_cad)
    raise ValueError(f"unknown cad selection {selection!r}")


def l2_error(field: DGField, exact_ic) -> float:
    """Quadrature L2 norm of (u_h - u_exact) over the domain (RMS sense)."""
    basis = modal_basis(field.k)
    X, Y = _cell_points(field.mesh, basis.vol_xy)
    diff = _eval(field.coeffs, basis.b_vol) - np.asarray(exact_ic(X, Y))
    sq = (diff * diff) @ basis.vol_weights
    return float(np.sqrt(np.mean(sq)))


def _single_run(cfg: dict, nx: int, ny: int):
    problem = _build_problem(cfg.get("problem", {}))
    k = int(cfg["k"])
    domain = cfg.get("domain", [-1.0, 1.0, -1.0, 1.0])
    bc = cfg.get("bc", {s: "periodic" for s in ("left", "right", "bottom", "top")})
    mesh = Mesh2D(nx, ny, domain[0], domain[1], domain[2], domain[3], bc)
    gamma = cfg.get("problem", {}).get("gamma", 1.4)

    inflow = None
    if problem.kind == "euler":
        ic, left_state = _shock_vortex_ic(
            gamma, cfg.get("problem", {}).get("mach", 1.1), cfg.get("problem", {})
        )
        inflow = {"left": left_state}
        field = l2_project(ic, mesh, k, ncomp=4)
        exact = None
        bounds = None
    else:
        ic = _sine_sum
        field = l2_project(ic, mesh, k, ncomp=1)
        bounds = tuple(cfg.get("bounds", (-1.0, 1.0)))
        if problem.kind == "advection":
            exact = _advection_exact(cfg["t_end"], problem.ax, problem.ay)
        else:
            exact = None

    tr0 = traces(field)
    a1, a2 = problem.wave_speeds(list(tr0.values()))
    theta_cfg = cfg.get("theta", "auto")
    theta = theta_of(a1, a2, mesh.dx, mesh.dy) if theta_cfg == "auto" else float(theta_cfg)
    cad = select_cad(cfg.get("cad", "classic"), k, theta, cfg.get("_theta0_cad"))
    from ..cad import verify_feasibility

    cad_check = verify_feasibility(cad, cfg.get("tol", 1e-10))
    if not cad_check.feasible:
        raise RuntimeError(
            f"selected decomposition fails verification "
            f"(residual {cad_check.max_residual:.3e})"
        )

    limiter = Limiter(
        cad,
        cfg.get("limiter", "simplified"),
        workers=int(os.environ.get("OCAD_THREADS", "1")),
        track=bool(cfg.get("track_checks", problem.kind == "burgers")),
        tvb_m=cfg.get("tvb_m", 0.0 if problem.kind == "euler" else None),
    )
    field = limiter.apply(field, problem, bounds)

    c0 = cfg.get("c0", 1.0)
    cssp = cfg.get("cssp", 1.0)
    scaling = cfg.get("dt_scaling", {})
    exponent = scaling.get("exponent", 1.0)
    n_ref = scaling.get("n_ref", nx)

    t_end = float(cfg["t_end"])
    t = 0.0
    steps = 0
    avg_min, avg_max = math.inf, -math.inf
    wall0 = time.perf_counter()
    theta_per_step = bool(cfg.get("theta_per_step", False))
    while t < t_end - 1e-14:
        if theta_per_step and steps > 0:
            trs = traces(field)
            a1s, a2s = problem.wave_speeds(list(trs.values()))
            theta_now = theta_of(a1s, a2s, mesh.dx, mesh.dy)
            cad = select_cad(cfg.get("cad", "classic"), k, theta_now, cfg.get("_theta0_cad"))
            limiter.cad = cad
        dt, _ = compute_dt(field, problem, cad, c0, cssp, cfg.get("dt_max"))
        dt *= (n_ref / nx) ** (exponent - 1.0)
        dt = min(dt, t_end - t)
        field = ssp_rk3_step(
            field,
            problem,
            dt,
            limiter,
            bounds,
            inflow,
            per_stage=cfg.get("limiter_frequency", "stage") == "stage",
        )
        t += dt
        steps += 1
        avgs = field.cell_averages
        if problem.m == 1:
            avg_min = min(avg_min, float(avgs.min()))
            avg_max = max(avg_max, float(avgs.max()))
        else:
            avg_min = min(avg_min, float(avgs[..., 0].min()))
    wall_ms = 1000.0 * (time.perf_counter() - wall0)

    out = {
        "n": nx,
        "steps": steps,
        "wall_ms": wall_ms,
        "avg_min": avg_min,
        "avg_max": avg_max,
        "check_min": limiter.last_check_min,
        "check_max": limiter.last_check_max,
        "cad_boundary_weight": cad.boundary_weight,
        "theta": theta,
    }
    if exact is not None:
        out["l2_error"] = l2_error(field, exact)
    if problem.kind == "euler":
        avgs = field.cell_averages[..., None]
        out["rho_min"] = float(avgs[..., 0, :].min())
        out["rho_e_min"] = float(problem.rho_e(avgs).min())
        out["nan"] = bool(np.isnan(field.coeffs).any())
    out["field"] = field
    return out


def run_case(cfg: dict, output_dir=None):
    """Run one configured case (or a convergence family); emit CSV artifacts."""
    ns = cfg.get("convergence", {}).get("ns")
    aspect = cfg.get("aspect", 1)  # ny = nx // aspect
    results = []
    if ns:
        for n in ns:
            results.append(_single_run(cfg, n, max(1, n // aspect)))
    else:
        nx = int(cfg.get("nx", cfg.get("n", 20)))
        ny = int(cfg.get("ny", max(1, nx // aspect)))
        results.append(_single_run(cfg, nx, ny))

    rows = []
    prev = None
    for r in results:
        order = ""
        if prev is not None and "l2_error" in r and prev["l2_error"] > 0:
            order = math.log(prev["l2_error"] / r["l2_error"]) / math.log(r["n"] / prev["n"])
        rows.append(
            {
                "N": r["n"],
                "l2_error": r.get("l2_error", ""),
                "order": order,
                "steps": r["steps"],
                "wall_ms": r["wall_ms"],
            }
        )
        prev = r

    if output_dir:
        os.makedirs(output_dir, exist_ok=True)
        with open(os.path.join(output_dir, "errors.csv"), "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["N", "l2_error", "order", "steps", "wall_ms"])
            for row in rows:
                writer.writerow(
                    [
                        row["N"],
                        _fmt12(row["l2_error"]),
                        _fmt12(row["order"]),
                        row["steps"],
                        f"{row['wall_ms']:.1f}",
                    ]
                )
        if cfg.get("dump_fields"):
            field = results[-1]["field"]
            _dump_field(field, os.path.join(output_dir, "field.csv"))
    return {"runs": results, "rows": rows}


def _fmt12(x):
    return f"{x:.12g}" if isinstance(x, float) else x


def _dump_field(field: DGField, path: str):
    mesh = field.mesh
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        comps = [f"u{c}" for c in range(field.ncomp)]
        writer.writerow(["x", "y"] + comps)
        for j in range(mesh.ny):
            for i in range(mesh.nx):
                writer.writerow(
                    [f"{mesh.centers_x[i]:.12g}", f"{mesh.centers_y[j]:.12g}"]
                    + [f"{field.cell_averages[j, i, c]:.12g}" for c in range(field.ncomp)]
                )
