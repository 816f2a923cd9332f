"""Command-line surface: build, verify, table reproduction, sweeps, solver runs.

Exit codes: 0 success, 1 verification/certification failure, 2 usage error,
3 numeric-solver failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

import numpy as np

from . import cad as cadmod
from .cad import (
    SymmetricCAD,
    bp_cfl_dt,
    reflect_theta,
    verify_feasibility,
)
from .constructors import (
    classic_2d,
    ocad_pk,
    ocad_qk,
    omega1_gl,
    quasi_omega,
    quasi_optimal,
)
from .optimizer import (
    SolverError,
    check_criterion_2,
    check_criterion_4,
    continuation_driver,
    phi_star_sq,
)
from .polyspace import SpaceId, poly_mul

USAGE_ERROR = 2
VERIFY_ERROR = 1
SOLVER_ERROR = 3


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _numeric_theta0(k: int):
    cad, _ = continuation_driver(k - (k % 2), 0.0)
    return cad


def _build_cad(family: str, k: int, theta: float, kind: str) -> SymmetricCAD:
    space = SpaceId(family, k)
    if kind == "classic":
        return classic_2d(space, theta)
    if kind == "optimal":
        if family == "Q":
            return ocad_qk(k, theta)[0]
        if k <= 7:
            return ocad_pk(k, theta)
        if k > 9:
            raise ValueError("optimal P-space decompositions are provided for k <= 9")
        cad, _ = continuation_driver(k - (k % 2), -abs(theta))
        if theta > 0:
            cad = reflect_theta(cad)
        # the even-degree optimum is also optimal one degree up
        return replace(cad, space=SpaceId("P", k))
    if kind == "quasi":
        if family == "Q":
            raise ValueError("quasi-optimal applies to P spaces (Q is optimal classic)")
        theta0 = _numeric_theta0(k) if k > 7 else None
        return quasi_optimal(k, theta, theta0)
    raise ValueError(f"unknown kind {kind!r} (expected classic|optimal|quasi)")


def cmd_build(args) -> int:
    try:
        cad = _build_cad(args.family, args.k, args.theta, args.kind)
    except (ValueError, SolverError) as exc:
        kind = SOLVER_ERROR if isinstance(exc, SolverError) else USAGE_ERROR
        print(f"error: {exc}", file=sys.stderr)
        return kind
    report = verify_feasibility(cad, args.tol)
    if not report.feasible:
        print(
            f"error: built decomposition fails verification "
            f"(residual {report.max_residual:.3e})",
            file=sys.stderr,
        )
        return VERIFY_ERROR
    cadmod.save(cad, args.out)
    print(
        f"wrote {args.out}: {args.family}^{args.k} theta={_fmt(args.theta)} "
        f"{args.kind}, boundary weight {_fmt(cad.boundary_weight)}, "
        f"residual {report.max_residual:.3e}"
    )
    return 0


def cmd_verify(args) -> int:
    try:
        cad = cadmod.load(args.path)
    except (OSError, KeyError, ValueError) as exc:
        print(f"error: cannot read {args.path}: {exc}", file=sys.stderr)
        return USAGE_ERROR
    report = verify_feasibility(cad, args.tol)
    g2 = bp_cfl_dt(cad, 1.0, 1.0, 2.0, 2.0, 1.0)
    print(f"space:            {cad.space.family}^{cad.space.degree}")
    print(f"theta:            {_fmt(cad.theta)}")
    print(f"boundary weight:  {_fmt(cad.boundary_weight)}")
    print(f"orbits:           {len(cad.orbits)}")
    print(f"max residual:     {report.max_residual:.3e} (tol {args.tol:g})")
    print(f"weights positive: {report.weight_ok}")
    print(f"nodes in cell:    {report.nodes_ok}")
    print(f"G2 (unit speeds on the reference cell): {_fmt(g2)}")
    ok = report.feasible
    if cad.provenance in ("optimal", "numeric", "quasi_optimal"):
        star = phi_star_sq(cad.space.degree, cad.theta, cad.space.family)
        if cad.provenance in ("optimal", "numeric"):
            c4 = check_criterion_4(cad)
            print(f"criterion#4:      {'PASS' if c4 else 'FAIL'}")
            q = star.q_star
            c2 = check_criterion_2(cad, poly_mul(q, q))
            print(f"criterion#2:      {'PASS' if c2 else 'FAIL'}")
            ok = ok and c4 and c2
        else:
            ratio = cad.boundary_weight / star.value
            print(f"quasi/optimal boundary-weight ratio: {_fmt(ratio)}")
            ok = ok and ratio <= 1.0 + 1e-10
    print("status: " + ("FEASIBLE" if ok else "NOT FEASIBLE"))
    return 0 if ok else VERIFY_ERROR


def cmd_table1(args) -> int:
    lines = ["k,standard,classic,optimal"]
    for k in range(1, 10):
        standard = 1.0 / (2 * k + 1)
        classic = omega1_gl(k)
        optimal = phi_star_sq(k, 0.0).value
        lines.append(f"{k},{_fmt(standard)},{_fmt(classic)},{_fmt(optimal)}")
    text = "\n".join(lines)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def _theta_grid(spec: str) -> np.ndarray:
    if ":" in spec:
        lo, hi, step = (float(t) for t in spec.split(":"))
        n = int(round((hi - lo) / step)) + 1
        return np.linspace(lo, hi, n)
    return np.array([float(t) for t in spec.split(",")])


def cmd_ratio_sweep(args) -> int:
    if args.k > 9:
        print("error: sweep covers k <= 9", file=sys.stderr)
        return USAGE_ERROR
    thetas = _theta_grid(args.thetas)
    w_gl = omega1_gl(args.k)
    w0 = phi_star_sq(args.k, 0.0).value
    lines = ["theta,omega_star,classic_ratio,quasi_ratio"]
    for th in thetas:
        star = phi_star_sq(args.k, float(th)).value
        quasi = quasi_omega(args.k, float(th), w0)
        lines.append(
            f"{_fmt(float(th))},{_fmt(star)},{_fmt(w_gl / star)},{_fmt(quasi / star)}"
        )
    text = "\n".join(lines)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def cmd_run(args) -> int:
    from .dg.solver import run_case

    try:
        with open(args.config) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return USAGE_ERROR
    cfg.setdefault("tol", args.tol)
    try:
        out = run_case(cfg, output_dir=args.out)
    except (FloatingPointError, RuntimeError, SolverError) as exc:
        print(f"error: solver failed: {exc}", file=sys.stderr)
        return SOLVER_ERROR
    for row in out["rows"]:
        err = row["l2_error"]
        err_s = _fmt(err) if isinstance(err, float) else "-"
        order = row["order"]
        order_s = _fmt(order) if isinstance(order, float) else "-"
        print(
            f"N={row['N']:>5}  l2_error={err_s:>14}  order={order_s:>8}  "
            f"steps={row['steps']:>6}  wall_ms={row['wall_ms']:.1f}"
        )
    last = out["runs"][-1]
    if "rho_min" in last:
        print(
            f"admissibility: rho_min={last['rho_min']:.6g} "
            f"rho_e_min={last['rho_e_min']:.6g} nan={last['nan']}"
        )
    if "avg_min" in last and last["avg_min"] is not None:
        print(f"cell-average range: [{last['avg_min']:.12g}, {last['avg_max']:.12g}]")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ocad",
        description="Build, verify, and exercise cell average decompositions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="construct a decomposition and write JSON")
    p.add_argument("family", choices=["P", "Q"])
    p.add_argument("k", type=int)
    p.add_argument("theta", type=float)
    p.add_argument("kind", choices=["classic", "optimal", "quasi"])
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", help="verify a decomposition JSON file")
    p.add_argument("path")
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("table1", help="standard/classic/optimal CFL coefficients")
    p.add_argument("-o", "--out")
    p.add_argument("--tol", type=float, default=1e-10, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("ratio-sweep", help="boundary-weight ratios over theta")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--thetas", default="-1:1:0.1", help="lo:hi:step or comma list")
    p.add_argument("-o", "--out")
    p.add_argument("--tol", type=float, default=1e-10, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_ratio_sweep)

    p = sub.add_parser("run", help="run a DG case from a JSON config")
    p.add_argument("config")
    p.add_argument("-o", "--out", help="output directory for CSV artifacts")
    p.add_argument("--tol", type=float, default=1e-10,
                   help="feasibility tolerance for the selected decomposition")
    p.set_defaults(func=cmd_run)

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
