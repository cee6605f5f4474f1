"""Scalar functionals, error norms, and per-step benchmark records.

Broken integrals are evaluated on the overintegration grid (p+2 Gauss
points per direction), including the pointwise divergence diagnostic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass
class BenchmarkRecord:
    t: float
    e_kin: float
    enstrophy: float
    dissipation: float
    max_div: float
    max_mass_residual: float
    err_v_l2: Optional[float] = None
    err_v_h1: Optional[float] = None
    err_p_l2: Optional[float] = None

    def __post_init__(self):
        assert self.e_kin >= 0 and self.enstrophy >= 0 and self.dissipation >= 0


def _vel_grads_diag(ops, vdata):
    gx0, gy0 = ops.gradients(vdata[:, 0], ops.Vvd, ops.Dvd)
    gx1, gy1 = ops.gradients(vdata[:, 1], ops.Vvd, ops.Dvd)
    return gx0, gy0, gx1, gy1


def kinetic_energy(ops, vdata):
    """E = (1/2) (v, v)."""
    vx = ops.values(vdata[:, 0], ops.Vvd)
    vy = ops.values(vdata[:, 1], ops.Vvd)
    return 0.5 * ops.integrate(vx ** 2 + vy ** 2, ops.w2d)


def enstrophy(ops, vdata):
    """(1/2) ||curl v||^2 with the broken scalar curl d1 v2 - d2 v1."""
    _, gy0, gx1, _ = _vel_grads_diag(ops, vdata)
    return 0.5 * ops.integrate((gx1 - gy0) ** 2, ops.w2d)


def dissipation(ops, vdata, nu):
    """(nu/|Omega|) (grad v, grad v), broken."""
    gx0, gy0, gx1, gy1 = _vel_grads_diag(ops, vdata)
    val = gx0 ** 2 + gy0 ** 2 + gx1 ** 2 + gy1 ** 2
    return nu / ops.mesh.domain_measure * ops.integrate(val, ops.w2d)


def max_pointwise_div(ops, vdata):
    """max |div v| over the overintegration quadrature grid."""
    gx0, _, _, gy1 = _vel_grads_diag(ops, vdata)
    return float(np.max(np.abs(gx0 + gy1)))


def error_norms(ops, vdata, pdata, problem, t):
    """(L2 velocity error, broken H1 seminorm error, L2 pressure error).

    The pressure error is computed after removing the mean of the
    difference, both fields being defined up to constants.
    """
    X, Y = ops.quad_coords(ops.rule_diag)
    ex_vx, ex_vy = problem.exact_v(X, Y, t)
    vx = ops.values(vdata[:, 0], ops.Vvd)
    vy = ops.values(vdata[:, 1], ops.Vvd)
    w2 = ops.w2d
    err_l2 = np.sqrt(ops.integrate((vx - ex_vx) ** 2 + (vy - ex_vy) ** 2, w2))

    err_h1 = None
    if problem.exact_grad_v is not None:
        gx0, gy0, gx1, gy1 = _vel_grads_diag(ops, vdata)
        e00, e01, e10, e11 = problem.exact_grad_v(X, Y, t)
        val = ((gx0 - e00) ** 2 + (gy0 - e01) ** 2
               + (gx1 - e10) ** 2 + (gy1 - e11) ** 2)
        err_h1 = np.sqrt(ops.integrate(val, w2))

    err_p = None
    if problem.exact_p is not None and pdata is not None:
        ph = ops.values(pdata, ops.Vpd)
        diff = ph - problem.exact_p(X, Y, t)
        mean = ops.integrate(diff, w2) / ops.mesh.domain_measure
        err_p = np.sqrt(ops.integrate((diff - mean) ** 2, w2))
    return float(err_l2), None if err_h1 is None else float(err_h1), \
        None if err_p is None else float(err_p)


def cumulative_norm(ts, values):
    """Trapezoidal L2(t0,T) accumulation of instantaneous norms."""
    ts = np.asarray(ts, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(ts) < 2:
        raise ValueError("cumulative norm needs at least two records")
    return float(np.sqrt(np.trapz(values ** 2, ts)))


def make_record(ops, state, problem):
    """Assemble the per-step diagnostics row."""
    nu = ops.cfg.mu / ops.cfg.rho
    ev = eh = ep = None
    if problem is not None and problem.exact_v is not None:
        ev, eh, ep = error_norms(ops, state.v, state.p, problem, state.t)
    return BenchmarkRecord(
        t=state.t,
        e_kin=kinetic_energy(ops, state.v),
        enstrophy=enstrophy(ops, state.v),
        dissipation=dissipation(ops, state.v, nu),
        max_div=max_pointwise_div(ops, state.v),
        max_mass_residual=float(np.max(np.abs(
            ops.local_mass_residual(state.v, state.t)))),
        err_v_l2=ev, err_v_h1=eh, err_p_l2=ep)
