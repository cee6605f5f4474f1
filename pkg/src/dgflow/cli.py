"""Command line interface: run, convergence, robustness, project-test."""

from __future__ import annotations

import argparse
import dataclasses
import sys

import numpy as np

from .config import ConfigError, emit_csv, parse_config
from .diagnostics import max_pointwise_div
from .krylov import SolverError
from .runner import cumulative_errors, observed_rates, run_single, setup


def _load(path):
    return parse_config(path)


def _cmd_run(args):
    cfg = _load(args.config)
    records, final, ops, problem = run_single(cfg)
    out = args.out or cfg.out_path
    if out:
        norm = (problem.rho * ops.mesh.domain_measure
                if cfg.normalized_energies else None)
        emit_csv(records, out, normalize=norm)
        print(f"wrote {len(records)} records to {out}")
    last = records[-1]
    print(f"final t={last.t:.6g}  e_kin={last.e_kin:.6g}  "
          f"max_div={last.max_div:.3e}")
    if last.err_v_l2 is not None:
        print(f"errors: v_l2={last.err_v_l2:.6e}  v_h1={last.err_v_h1:.6e}  "
              f"p_l2={last.err_p_l2:.6e}")
    return 0


def _parse_levels(spec):
    if ".." in spec:
        a, b = spec.split("..")
        return list(range(int(a), int(b) + 1))
    return [int(s) for s in spec.split(",")]


def _cmd_convergence(args):
    cfg = _load(args.config)
    levels = _parse_levels(args.levels)
    rows = []
    for level in levels:
        cells = 2 ** (level + 2)
        lcfg = dataclasses.replace(cfg, nx=cells, ny=cells)
        records, _, ops, _ = run_single(lcfg)
        cum = cumulative_errors(records)
        h = (ops.mesh.x_max - ops.mesh.x_min) / cells
        rows.append((level, cells, h, cum["err_v_l2"], cum["err_v_h1"],
                     cum["err_p_l2"]))
        print(f"level {level}: {cells}^2 cells  "
              f"v_l2={cum['err_v_l2']:.6e}  v_h1={cum['err_v_h1']:.6e}  "
              f"p_l2={cum['err_p_l2']:.6e}")
    for idx in (3, 4, 5):
        errs = [r[idx] for r in rows]
        rates = observed_rates(errs)
        name = ("v_l2", "v_h1", "p_l2")[idx - 3]
        print(f"rates {name}: " + "  ".join(f"{r:.3f}" for r in rates))
    if args.out:
        import csv as _csv
        with open(args.out, "w", newline="") as fh:
            w = _csv.writer(fh)
            w.writerow(("level", "cells", "h", "err_v_l2", "err_v_h1",
                        "err_p_l2"))
            w.writerows(rows)
    return 0


def _cmd_robustness(args):
    cfg = _load(args.config)
    nus = [float(s) for s in args.nu.split(",")]
    if args.variant:
        from .projection import ProjectionVariant
        cfg = dataclasses.replace(
            cfg, variant=ProjectionVariant(kind=args.variant,
                                           tau_d=cfg.variant.tau_d,
                                           tau_c=cfg.variant.tau_c))
    rows = []
    for nu in nus:
        ncfg = dataclasses.replace(cfg, nu=nu)
        records, _, _, _ = run_single(ncfg)
        cum = cumulative_errors(records)
        rows.append((nu, cum["err_v_l2"], cum["err_v_h1"], cum["err_p_l2"]))
        print(f"nu={nu:g}  v_l2={cum['err_v_l2']:.6e}  "
              f"v_h1={cum['err_v_h1']:.6e}  p_l2={cum['err_p_l2']:.6e}")
    if args.out:
        import csv as _csv
        with open(args.out, "w", newline="") as fh:
            w = _csv.writer(fh)
            w.writerow(("nu", "cum_err_v_l2", "cum_err_v_h1", "cum_err_p_l2"))
            w.writerows(rows)
    return 0


def _cmd_project_test(args):
    cfg = _load(args.config)
    problem, ops, projector, _, state = setup(cfg)
    rng = np.random.default_rng(args.seed)
    w = rng.uniform(-1.0, 1.0, size=state.v.shape)
    w /= ops.l2_norm_vector(w)
    res = projector.project(w, t=0.0, dt=state.dt)
    div_residual = ops.divergence_form(res.v) - ops.boundary_flux_residual(0.0)
    print(f"variant: {cfg.variant.kind}")
    print(f"max pointwise divergence: {max_pointwise_div(ops, res.v):.3e}")
    print(f"max continuity residual: {np.max(np.abs(div_residual)):.3e}")
    print(f"max local mass residual: "
          f"{np.max(np.abs(ops.local_mass_residual(res.v, 0.0))):.3e}")
    res2 = projector.project(res.v, t=0.0, dt=state.dt)
    delta = ops.l2_norm_vector(res2.v - res.v)
    print(f"reapplication change (L2): {delta:.3e}")
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="dgflow",
        description="DG incompressible flow benchmarks with pressure-robust "
                    "Helmholtz projections")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one configured simulation")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", help="CSV output path (overrides config)")
    p_run.set_defaults(fn=_cmd_run)

    p_conv = sub.add_parser("convergence",
                            help="spatial convergence study over mesh levels")
    p_conv.add_argument("--config", required=True)
    p_conv.add_argument("--levels", default="2..4",
                        help="level range a..b (cells per direction 2^(l+2))")
    p_conv.add_argument("--out")
    p_conv.set_defaults(fn=_cmd_convergence)

    p_rob = sub.add_parser("robustness",
                           help="viscosity sweep of cumulative errors")
    p_rob.add_argument("--config", required=True)
    p_rob.add_argument("--nu", required=True,
                       help="comma-separated viscosity list")
    p_rob.add_argument("--variant", help="override projection variant")
    p_rob.add_argument("--out")
    p_rob.set_defaults(fn=_cmd_robustness)

    p_pt = sub.add_parser("project-test",
                          help="apply the projection to a random field and "
                               "print structure diagnostics")
    p_pt.add_argument("--config", required=True)
    p_pt.add_argument("--seed", type=int, default=0)
    p_pt.set_defaults(fn=_cmd_project_test)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 1


run_cli = main

if __name__ == "__main__":
    sys.exit(main())
