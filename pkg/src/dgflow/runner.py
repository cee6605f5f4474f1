"""Single-run driver shared by the CLI subcommands and the test suite."""

from __future__ import annotations

import numpy as np

from .config import RunConfig
from .diagnostics import cumulative_norm, make_record
from .fields import interpolate
from .forms import DGOperators, FormConfig
from .mesh import build_mesh
from .problems import get_problem
from .projection import Projector
from .ripcs import SplittingState, TimeStepper


def setup(config: RunConfig):
    """Build (problem, ops, projector, stepper, initial state)."""
    problem = get_problem(config.problem, nu=config.nu)
    dt = config.dt if config.dt is not None else problem.dt
    mesh = build_mesh(config.nx, config.ny, problem.bounds, problem.periodic)
    form_cfg = FormConfig(mu=problem.nu * problem.rho, rho=problem.rho,
                          g=problem.g, f=problem.f)
    ops = DGOperators(mesh, config.p, form_cfg)
    projector = Projector(ops, config.variant,
                          pressure_tol=config.pressure_tol,
                          max_it=config.max_it, dt_hint=dt)
    stepper = TimeStepper(ops, projector, convection=problem.convection,
                          linear_tol=config.linear_tol,
                          newton_tol=config.newton_tol,
                          newton_linear_tol=config.newton_linear_tol,
                          max_it=config.max_it)

    v0 = interpolate(mesh, config.p, problem.v0, rank="vector").data
    if problem.p0 is not None:
        p0 = ops.mean_project(interpolate(mesh, config.p - 1, problem.p0).data)
    else:
        p0 = initial_pressure(ops, projector, v0, problem)
    state = SplittingState(v=v0, p=p0, t=0.0, dt=dt, omega=config.omega)
    return problem, ops, projector, stepper, state


def initial_pressure(ops, projector, v0, problem):
    """Startup pressure from one Poisson solve: the potential of the
    irrotational part of the initial acceleration (momentum right-hand
    side without the pressure term)."""
    accel = ops.viscous_rhs(0.0) - ops.apply_viscous(v0)
    if problem.convection:
        accel -= ops.cfg.rho * ops.convection(v0, 0.0)
    accel = ops.inv_mass_vector(accel) / ops.cfg.rho
    from .krylov import cg_solve, euclid_mean_project
    rhs = ops.divergence_form(accel)
    psi, _ = cg_solve(ops.apply_alpha, rhs, tol=projector.pressure_tol,
                      max_it=projector.max_it,
                      precond=projector._alpha_precond(),
                      project=euclid_mean_project)
    return ops.mean_project(psi)


def run_single(config: RunConfig, collect=True):
    """Run one simulation; returns (records, final_state, ops, problem)."""
    problem, ops, projector, stepper, state = setup(config)
    T = config.T if config.T is not None else problem.T
    records = []

    def callback(s, k):
        if collect:
            records.append(make_record(ops, s, problem))

    final = stepper.run_simulation(state, T, callback)
    return records, final, ops, problem


def cumulative_errors(records):
    """Cumulative-in-time (trapezoidal) L2 errors from a record stream."""
    ts = [r.t for r in records]
    out = {}
    for name in ("err_v_l2", "err_v_h1", "err_p_l2"):
        vals = [getattr(r, name) for r in records]
        out[name] = (cumulative_norm(ts, vals)
                     if all(v is not None for v in vals) else None)
    return out


def observed_rates(errors):
    """log2(err_l / err_{l+1}) for successive refinement levels."""
    rates = []
    for a, b in zip(errors[:-1], errors[1:]):
        rates.append(np.log2(a / b) if (a and b) else float("nan"))
    return rates
