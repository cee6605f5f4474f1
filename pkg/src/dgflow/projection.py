"""Discrete Helmholtz decompositions behind a single projection interface.

All four variants share the pressure Poisson solve: find psi in the
pressure space with alpha(psi, q) = b(w, q) - r(q; t) for all q, where w
is the tentative velocity.  They differ in how the irrotational part is
removed from w:

- divdiv: per-cell mass + penalized divergence solve, subtracting the
  broken gradient of psi (block-local dense systems);
- divdivconti: adds a normal-continuity face penalty, giving a globally
  coupled SPD system solved by CG with block-Jacobi;
- ppoisson_rt: adds the Raviart-Thomas reconstruction of -grad(psi)
  (degree p-2 by default) to w;
- helmholtz_rt: reconstructs the full Helmholtz flux in RT^{p-1}; the
  result is pointwise divergence-free and satisfies the discrete
  continuity equation, and the projection is idempotent.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from . import rt_space
from .krylov import (SolverError, cg_solve, constant_coarse_matrix,
                     euclid_mean_project, two_level_precond)

_VARIANTS = ("divdiv", "divdivconti", "ppoisson_rt", "helmholtz_rt")


@dataclass
class ProjectionVariant:
    """Projection selection plus penalty constants.

    tau_d / tau_c default to dt*(|w|_inf * h + nu) resolved at the first
    projection call; rt_degree only applies to ppoisson_rt (default p-2).
    """

    kind: str
    tau_d: Optional[float] = None
    tau_c: Optional[float] = None
    rt_degree: Optional[int] = None

    def __post_init__(self):
        if self.kind not in _VARIANTS:
            raise ValueError(f"unknown projection variant {self.kind!r}")
        for name in ("tau_d", "tau_c"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise ValueError(f"{name} must be nonnegative")


@dataclass
class HelmholtzResult:
    v: np.ndarray
    psi: np.ndarray
    div_rhs: np.ndarray  # residual of q -> b(w,q) - r(q;t), reused by the
    # rotational pressure update
    reports: dict = field(default_factory=dict)


class Projector:
    """Applies one projection variant to tentative velocities.

    Caches the pressure-Poisson block-Jacobi preconditioner and any
    variant-specific factorizations; safe to reuse across time steps.
    """

    def __init__(self, ops, variant, pressure_tol=1e-10, max_it=5000,
                 dt_hint=None):
        self.ops = ops
        self.variant = variant
        self.pressure_tol = pressure_tol
        self.max_it = max_it
        self.dt_hint = dt_hint
        self._alpha_bj = None
        self._divdiv_factor = {}
        self._conti_bj = {}
        self._resolved_tau = None
        self._psi_warm = None
        p = ops.p
        if variant.kind in ("ppoisson_rt", "helmholtz_rt") and p < 2:
            raise ValueError("RT-based projections need velocity degree p >= 2")
        if variant.kind == "ppoisson_rt":
            k = variant.rt_degree if variant.rt_degree is not None else p - 2
            if not 0 <= k <= p - 1:
                raise ValueError(f"ppoisson_rt needs 0 <= k <= p-1, got {k}")
            self.rt_degree = k
        elif variant.kind == "helmholtz_rt":
            self.rt_degree = p - 1
        else:
            self.rt_degree = None

    # ------------------------------------------------------------------

    def _alpha_precond(self):
        if self._alpha_bj is None:
            ops = self.ops
            mesh = ops.mesh
            n = ops.pr_basis.n
            w_int = (ops.sigma_pr / mesh.hx * mesh.hy,
                     ops.sigma_pr / mesh.hy * mesh.hx)
            coarse = constant_coarse_matrix(mesh, w_int, (0.0, 0.0),
                                            regularize=1e-8)
            self._alpha_bj = two_level_precond(ops.apply_alpha, mesh, (n, n),
                                               [coarse])
        return self._alpha_bj

    def solve_pressure_poisson(self, w_data, t, tol=None):
        """Shared first step of all variants: the Helmholtz potential.

        Returns (psi, raw divergence residual, solve report); psi has
        zero mean.  The CG solve warm-starts from the previous potential,
        which changes iteration counts but not the converged tolerance
        (it is relative to the right-hand side).
        """
        ops = self.ops
        rhs = ops.divergence_form(w_data) - ops.boundary_flux_residual(t)
        psi, report = cg_solve(
            ops.apply_alpha, rhs, tol=self.pressure_tol if tol is None else tol,
            max_it=self.max_it, precond=self._alpha_precond(),
            project=euclid_mean_project, x0=self._psi_warm)
        self._psi_warm = psi.copy()
        psi = ops.mean_project(psi)
        return psi, rhs, report

    # ------------------------------------------------------------------

    def _resolve_taus(self, w_data, dt):
        if self._resolved_tau is None:
            v = self.variant
            nu = self.ops.cfg.mu / self.ops.cfg.rho
            h = max(self.ops.mesh.hx, self.ops.mesh.hy)
            if dt is None:
                dt = self.dt_hint if self.dt_hint is not None else 1.0
            auto = dt * (np.max(np.abs(w_data)) * h + nu)
            tau_d = v.tau_d if v.tau_d is not None else auto
            tau_c = v.tau_c if v.tau_c is not None else auto
            self._resolved_tau = (float(tau_d), float(tau_c))
        return self._resolved_tau

    def _divdiv_matrix(self, tau_d):
        """Per-cell matrix of (v,phi) + tau_d (div v, div phi); identical
        for every cell of the uniform mesh."""
        key = tau_d
        if key not in self._divdiv_factor:
            ops = self.ops
            n = ops.vel_basis.n
            cm = ops.mesh.cell_measure
            M2 = np.kron(ops.M1v, ops.M1v) * cm
            A = scipy.linalg.block_diag(M2, M2)
            if tau_d != 0.0:
                V, D = ops.Vv, ops.Dv
                q = ops.rule_main.n
                Bx = np.einsum("qi,rj->qrij", D, V).reshape(q * q, n * n) / ops.mesh.hx
                By = np.einsum("qi,rj->qrij", V, D).reshape(q * q, n * n) / ops.mesh.hy
                B = np.hstack([Bx, By])  # (q^2, 2 n^2), div of each basis fn
                W = (ops.w2 * cm).reshape(-1)
                A = A + tau_d * (B.T * W) @ B
            self._divdiv_factor[key] = scipy.linalg.cho_factor(A)
        return self._divdiv_factor[key]

    def _project_divdiv(self, w_data, t, dt):
        tau_d, _ = self._resolve_taus(w_data, dt)
        psi, rhs, rep = self.solve_pressure_poisson(w_data, t)
        ops = self.ops
        RHS = ops.mass_vector(w_data) - ops.grad_scalar_residual(psi)
        nc = ops.mesh.ncells
        factor = self._divdiv_matrix(tau_d)
        sol = scipy.linalg.cho_solve(factor, RHS.reshape(nc, -1).T).T
        v = np.ascontiguousarray(sol.reshape(w_data.shape))
        return HelmholtzResult(v, psi, rhs, {"poisson": rep})

    def _project_divdivconti(self, w_data, t, dt):
        tau_d, tau_c = self._resolve_taus(w_data, dt)
        psi, rhs, rep = self.solve_pressure_poisson(w_data, t)
        ops = self.ops

        def apply_fn(V):
            out = ops.mass_vector(V)
            if tau_d != 0.0:
                out += tau_d * ops.divdiv_residual(V)
            if tau_c != 0.0:
                out += tau_c * ops.normal_jump_residual(V)
            return out

        key = (tau_d, tau_c)
        if key not in self._conti_bj:
            n = ops.vel_basis.n
            mesh = ops.mesh
            cm = mesh.cell_measure
            cx = constant_coarse_matrix(mesh, (tau_c * mesh.hy, 0.0),
                                        (0.0, 0.0), diag=cm)
            cy = constant_coarse_matrix(mesh, (0.0, tau_c * mesh.hx),
                                        (0.0, 0.0), diag=cm)
            self._conti_bj[key] = two_level_precond(apply_fn, mesh, (2, n, n),
                                                    [cx, cy])
        RHS = ops.mass_vector(w_data) - ops.grad_scalar_residual(psi)
        v, rep2 = cg_solve(apply_fn, RHS, tol=1e-12, max_it=self.max_it,
                           precond=self._conti_bj[key])
        if not rep2.converged and rep2.relative_residual > 1e-8:
            raise SolverError(
                f"div-div-conti projection CG failed (res {rep2.relative_residual:.2e})")
        return HelmholtzResult(v, psi, rhs, {"poisson": rep, "projection": rep2})

    def _project_ppoisson_rt(self, w_data, t):
        psi, rhs, rep = self.solve_pressure_poisson(w_data, t)
        rt = rt_space.reconstruct_pressure_flux(self.ops, psi, self.rt_degree)
        v = w_data + rt_space.rt_embed_to_dg(rt, self.ops.p)
        return HelmholtzResult(v, psi, rhs, {"poisson": rep})

    def _project_helmholtz_rt(self, w_data, t):
        psi, rhs, rep = self.solve_pressure_poisson(w_data, t)
        rt = rt_space.reconstruct_helmholtz_flux(self.ops, w_data, psi, t)
        v = rt_space.rt_embed_to_dg(rt, self.ops.p)
        return HelmholtzResult(v, psi, rhs, {"poisson": rep})

    def project(self, w_data, t, dt=None):
        kind = self.variant.kind
        if kind == "divdiv":
            return self._project_divdiv(w_data, t, dt)
        if kind == "divdivconti":
            return self._project_divdivconti(w_data, t, dt)
        if kind == "ppoisson_rt":
            return self._project_ppoisson_rt(w_data, t)
        return self._project_helmholtz_rt(w_data, t)

    __call__ = project
