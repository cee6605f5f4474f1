"""Matrix-free application of the mesh-dependent DG forms.

All operators act on nodal coefficient arrays and return the residual
against every test basis function (the Riesz representation in the
coefficient basis).  Cell loops are batched over all cells at once,
face loops over all faces of one orientation/kind at once; traversal
order is fixed, so results are reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .basis import TensorBasis1D, gauss_legendre
from .fields import DGField
from .kernels import tensor2d


def jump_and_average(interior, exterior):
    """Jump (int - ext) and average (int + ext)/2 of face traces."""
    interior = np.asarray(interior, dtype=float)
    exterior = np.asarray(exterior, dtype=float)
    return interior - exterior, 0.5 * (interior + exterior)


def penalty_sigma(p, d=2, alpha=3.0, space="velocity"):
    """Interior penalty strength.

    velocity space of degree p: alpha*p*(p+d-1); pressure space of degree
    p-1: alpha*(p-1)*(p+d-2).
    """
    if p < 1:
        raise ValueError("penalty_sigma requires p >= 1")
    if space == "velocity":
        return alpha * p * (p + d - 1)
    if space == "pressure":
        return alpha * (p - 1) * (p + d - 2)
    raise ValueError(f"unknown space {space!r}")


@dataclass
class FormConfig:
    """Physical constants and data functions entering the forms.

    g and f are time-dependent callables g(x, y, t) -> (gx, gy); both may
    be None for homogeneous data.  epsilon is fixed to -1 (symmetric
    interior penalty); other variants are not compiled in.
    """

    mu: float
    rho: float = 1.0
    alpha_pen: float = 3.0
    epsilon: int = -1
    g: Optional[Callable] = None
    f: Optional[Callable] = None

    def __post_init__(self):
        if self.mu <= 0:
            raise ValueError("viscosity mu must be positive")
        if self.rho <= 0:
            raise ValueError("density rho must be positive")
        if self.epsilon != -1:
            raise ValueError("only the symmetric variant (epsilon = -1) is supported")


class _FaceGroup:
    """Faces of one orientation and kind, with quadrature point coords."""

    def __init__(self, axis, kind, cl, cr, ids, fx, fy):
        self.axis = axis
        self.kind = kind  # 'int' | 'dmin' | 'dmax'
        self.cl = np.asarray(cl, dtype=int)
        self.cr = None if cr is None else np.asarray(cr, dtype=int)
        self.ids = np.asarray(ids, dtype=int)
        self.fx = np.asarray(fx, dtype=float)
        self.fy = np.asarray(fy, dtype=float)
        self.nsign = -1.0 if kind == "dmin" else 1.0
        self.upper = kind != "dmin"  # trace side of the owner cell
        self._coords = {}

    def __len__(self):
        return len(self.cl)

    def coords(self, rule, mesh):
        key = id(rule)
        if key not in self._coords:
            t = rule.points
            if self.axis == 0:
                X = np.repeat(self.fx[:, None], len(t), axis=1)
                Y = self.fy[:, None] + t[None, :] * mesh.hy
            else:
                X = self.fx[:, None] + t[None, :] * mesh.hx
                Y = np.repeat(self.fy[:, None], len(t), axis=1)
            self._coords[key] = (X, Y)
        return self._coords[key]


class DGOperators:
    """Operator bundle for one mesh / velocity degree / configuration.

    Velocity fields live in the degree-p tensor space, pressure-like
    fields in degree p-1.  Volume and face quadrature use p+1 Gauss
    points per direction; the convective term and diagnostics use p+2.
    """

    def __init__(self, mesh, p, config):
        if p < 1:
            raise ValueError("velocity degree must be >= 1")
        self.mesh = mesh
        self.p = p
        self.cfg = config

        self.vel_basis = TensorBasis1D(p)
        self.pr_basis = TensorBasis1D(p - 1)
        self.rule_main = gauss_legendre(p + 1)
        self.rule_conv = gauss_legendre(p + 2)
        self.rule_diag = gauss_legendre(p + 2)

        self.sigma_vel = penalty_sigma(p, 2, config.alpha_pen, "velocity")
        self.sigma_pr = penalty_sigma(p, 2, config.alpha_pen, "pressure")

        # volume tables
        self.Vv, self.Dv = self.vel_basis.tables(self.rule_main)
        self.Vp, self.Dp = self.pr_basis.tables(self.rule_main)
        self.Vvc, self.Dvc = self.vel_basis.tables(self.rule_conv)
        self.Vvd, self.Dvd = self.vel_basis.tables(self.rule_diag)
        self.Vpd, self.Dpd = self.pr_basis.tables(self.rule_diag)
        for name in ("Vv", "Dv", "Vp", "Dp", "Vvc", "Dvc", "Vvd", "Dvd", "Vpd", "Dpd"):
            setattr(self, name + "t", np.ascontiguousarray(getattr(self, name).T))

        w = self.rule_main.weights
        self.w2 = np.outer(w, w)
        wc = self.rule_conv.weights
        self.w2c = np.outer(wc, wc)
        wd = self.rule_diag.weights
        self.w2d = np.outer(wd, wd)

        self.dvel = (self.vel_basis.derivs_at_0, self.vel_basis.derivs_at_1)
        self.dpr = (self.pr_basis.derivs_at_0, self.pr_basis.derivs_at_1)

        # 1D mass factors (exact: integrand degree 2p <= 2(p+1)-1)
        self.M1v = self.Vv.T @ (w[:, None] * self.Vv)
        self.M1p = self.Vp.T @ (w[:, None] * self.Vp)
        self.M1v_inv = np.linalg.inv(self.M1v)
        self.M1p_inv = np.linalg.inv(self.M1p)
        self.int1v = w @ self.Vv  # 1D integrals of velocity basis
        self.int1p = w @ self.Vp

        m = mesh
        self.groups = [
            _FaceGroup(0, "int", m.xint_cl, m.xint_cr, m.xint_ids, m.xint_x, m.xint_y0),
            _FaceGroup(0, "dmin", m.xmin_cells, None, m.xmin_ids,
                       np.full(len(m.xmin_cells), m.x_min), m.xmin_y0),
            _FaceGroup(0, "dmax", m.xmax_cells, None, m.xmax_ids,
                       np.full(len(m.xmax_cells), m.x_max), m.xmax_y0),
            _FaceGroup(1, "int", m.yint_cl, m.yint_cr, m.yint_ids, m.yint_x0, m.yint_y),
            _FaceGroup(1, "dmin", m.ymin_cells, None, m.ymin_ids,
                       m.ymin_x0, np.full(len(m.ymin_cells), m.y_min)),
            _FaceGroup(1, "dmax", m.ymax_cells, None, m.ymax_ids,
                       m.ymax_x0, np.full(len(m.ymax_cells), m.y_max)),
        ]
        self._quad_coords = {}

    # ------------------------------------------------------------------
    # small gather / scatter helpers

    @staticmethod
    def _gline(C, cells, axis, upper):
        B = C[cells]
        if axis == 0:
            return B[:, -1, :] if upper else B[:, 0, :]
        return B[:, :, -1] if upper else B[:, :, 0]

    @staticmethod
    def _gdline(C, cells, axis, upper, dpair):
        d = dpair[1] if upper else dpair[0]
        B = C[cells]
        if axis == 0:
            return np.einsum("i,fij->fj", d, B)
        return np.einsum("j,fij->fi", d, B)

    @staticmethod
    def _sline(R, cells, axis, upper, M):
        if axis == 0:
            if upper:
                R[cells, -1, :] += M
            else:
                R[cells, 0, :] += M
        else:
            if upper:
                R[cells, :, -1] += M
            else:
                R[cells, :, 0] += M

    @staticmethod
    def _sdline(R, cells, axis, upper, M, dpair):
        d = dpair[1] if upper else dpair[0]
        if axis == 0:
            R[cells] += d[None, :, None] * M[:, None, :]
        else:
            R[cells] += d[None, None, :] * M[:, :, None]

    def _face_geom(self, axis, rule):
        """(h_e, quadrature line weights including the face jacobian)."""
        if axis == 0:
            return self.mesh.hx, rule.weights * self.mesh.hy
        return self.mesh.hy, rule.weights * self.mesh.hx

    # ------------------------------------------------------------------
    # coordinates / evaluation

    def quad_coords(self, rule):
        """Physical coordinates of the tensor quadrature grid, (nc,q,q)."""
        key = id(rule)
        if key not in self._quad_coords:
            x0, y0 = self.mesh.cell_origin(np.arange(self.mesh.ncells))
            t = rule.points
            X = x0[:, None, None] + t[None, :, None] * self.mesh.hx
            Y = y0[:, None, None] + t[None, None, :] * self.mesh.hy
            q = len(t)
            shape = (self.mesh.ncells, q, q)
            self._quad_coords[key] = (np.broadcast_to(X, shape).copy(),
                                      np.broadcast_to(Y, shape).copy())
        return self._quad_coords[key]

    def values(self, data, V):
        """Values of nodal blocks on a quadrature grid (any leading dims)."""
        lead = data.shape[:-2]
        out = tensor2d(V, V, data.reshape((-1,) + data.shape[-2:]))
        return out.reshape(lead + out.shape[-2:])

    def gradients(self, data, V, D):
        """Physical gradient components (d/dx, d/dy) on a quadrature grid."""
        lead = data.shape[:-2]
        C = data.reshape((-1,) + data.shape[-2:])
        gx = tensor2d(D, V, C) / self.mesh.hx
        gy = tensor2d(V, D, C) / self.mesh.hy
        return gx.reshape(lead + gx.shape[-2:]), gy.reshape(lead + gy.shape[-2:])

    def integrate(self, vals, w2=None):
        """Sum of cell integrals of values given on a quadrature grid."""
        w2 = self.w2 if w2 is None else w2
        return float(np.sum(vals * w2) * self.mesh.cell_measure)

    # ------------------------------------------------------------------
    # mass operators

    def mass_scalar(self, data):
        return tensor2d(self.M1p, self.M1p, data) * self.mesh.cell_measure

    def inv_mass_scalar(self, data):
        return tensor2d(self.M1p_inv, self.M1p_inv, data) / self.mesh.cell_measure

    def mass_vector(self, data):
        out = np.empty_like(data)
        for c in (0, 1):
            out[:, c] = tensor2d(self.M1v, self.M1v, data[:, c])
        return out * self.mesh.cell_measure

    def inv_mass_vector(self, data):
        out = np.empty_like(data)
        for c in (0, 1):
            out[:, c] = tensor2d(self.M1v_inv, self.M1v_inv, data[:, c])
        return out / self.mesh.cell_measure

    def mean_value(self, data):
        """Mean of a pressure-space field over the domain."""
        cell_int = np.einsum("cij,i,j->", data, self.int1p, self.int1p)
        return cell_int * self.mesh.cell_measure / self.mesh.domain_measure

    def mean_project(self, data):
        return data - self.mean_value(data)

    def l2_norm_vector(self, data):
        return float(np.sqrt(max(np.sum(data * self.mass_vector(data)), 0.0)))

    def l2_norm_scalar(self, data):
        return float(np.sqrt(max(np.sum(data * self.mass_scalar(data)), 0.0)))

    # ------------------------------------------------------------------
    # scalar SIPG engine shared by the viscous form and the pressure
    # Poisson form

    def _sipg_scalar(self, C, R, space, mu, sigma, with_dirichlet):
        if space == "vel":
            V, D, Vt, Dt = self.Vv, self.Dv, self.Vvt, self.Dvt
            dpair = self.dvel
        else:
            V, D, Vt, Dt = self.Vp, self.Dp, self.Vpt, self.Dpt
            dpair = self.dpr
        hx, hy = self.mesh.hx, self.mesh.hy

        # volume (mu grad u, grad phi)
        gx = tensor2d(D, V, C)
        gy = tensor2d(V, D, C)
        R += mu * (hy / hx) * tensor2d(Dt, Vt, gx * self.w2)
        R += mu * (hx / hy) * tensor2d(Vt, Dt, gy * self.w2)

        for grp in self.groups:
            if len(grp) == 0:
                continue
            axis = grp.axis
            h_e, wline = self._face_geom(axis, self.rule_main)
            if grp.kind == "int":
                Tl = self._gline(C, grp.cl, axis, True) @ V.T
                Tr = self._gline(C, grp.cr, axis, False) @ V.T
                Dl = (self._gdline(C, grp.cl, axis, True, dpair) @ V.T) / h_e
                Dr = (self._gdline(C, grp.cr, axis, False, dpair) @ V.T) / h_e
                avg = 0.5 * (Dl + Dr)
                jmp = Tl - Tr
                Mavg = (avg * wline) @ V
                Mjmp = (jmp * wline) @ V
                self._sline(R, grp.cl, axis, True, -mu * Mavg)
                self._sline(R, grp.cr, axis, False, mu * Mavg)
                self._sdline(R, grp.cl, axis, True, -(mu / (2 * h_e)) * Mjmp, dpair)
                self._sdline(R, grp.cr, axis, False, -(mu / (2 * h_e)) * Mjmp, dpair)
                coef = mu * sigma / h_e
                self._sline(R, grp.cl, axis, True, coef * Mjmp)
                self._sline(R, grp.cr, axis, False, -coef * Mjmp)
            elif with_dirichlet:
                T = self._gline(C, grp.cl, axis, grp.upper) @ V.T
                Dn = grp.nsign * (self._gdline(C, grp.cl, axis, grp.upper, dpair) @ V.T) / h_e
                MT = (T * wline) @ V
                MDn = (Dn * wline) @ V
                self._sline(R, grp.cl, axis, grp.upper, -mu * MDn)
                self._sdline(R, grp.cl, axis, grp.upper,
                             -(mu * grp.nsign / h_e) * MT, dpair)
                self._sline(R, grp.cl, axis, grp.upper, (mu * sigma / h_e) * MT)

    def apply_viscous(self, data):
        """Residual of the SIPG viscous form applied componentwise."""
        R = np.zeros_like(data)
        for c in (0, 1):
            self._sipg_scalar(data[:, c], R[:, c], "vel",
                              self.cfg.mu, self.sigma_vel, True)
        return R

    def apply_alpha(self, data):
        """Residual of the pressure Poisson SIPG form (homogeneous Neumann
        on the Dirichlet boundary: no boundary face terms at all)."""
        R = np.zeros_like(data)
        self._sipg_scalar(data, R, "pr", 1.0, self.sigma_pr, False)
        return R

    # ------------------------------------------------------------------
    # mixed divergence form b and its two residual directions

    def divergence_form(self, data):
        """Residual of v -> b(v, .) against all pressure test functions."""
        nprs = self.pr_basis.n
        R = np.zeros((self.mesh.ncells, nprs, nprs))
        hx, hy = self.mesh.hx, self.mesh.hy
        gx = tensor2d(self.Dv, self.Vv, data[:, 0])
        gy = tensor2d(self.Vv, self.Dv, data[:, 1])
        R -= tensor2d(self.Vpt, self.Vpt, (hy * gx + hx * gy) * self.w2)
        for grp in self.groups:
            if len(grp) == 0:
                continue
            axis = grp.axis
            _, wline = self._face_geom(axis, self.rule_main)
            if grp.kind == "int":
                Tl = self._gline(data[:, axis], grp.cl, axis, True) @ self.Vv.T
                Tr = self._gline(data[:, axis], grp.cr, axis, False) @ self.Vv.T
                M = ((Tl - Tr) * wline) @ self.Vp
                self._sline(R, grp.cl, axis, True, 0.5 * M)
                self._sline(R, grp.cr, axis, False, 0.5 * M)
            else:
                T = self._gline(data[:, axis], grp.cl, axis, grp.upper) @ self.Vv.T
                M = ((grp.nsign * T) * wline) @ self.Vp
                self._sline(R, grp.cl, axis, grp.upper, M)
        return R

    def pressure_gradient(self, pdata):
        """Residual of phi -> b(phi, p) against all velocity tests."""
        nv = self.vel_basis.n
        R = np.zeros((self.mesh.ncells, 2, nv, nv))
        hx, hy = self.mesh.hx, self.mesh.hy
        P = tensor2d(self.Vp, self.Vp, pdata)
        R[:, 0] -= hy * tensor2d(self.Dvt, self.Vvt, P * self.w2)
        R[:, 1] -= hx * tensor2d(self.Vvt, self.Dvt, P * self.w2)
        for grp in self.groups:
            if len(grp) == 0:
                continue
            axis = grp.axis
            _, wline = self._face_geom(axis, self.rule_main)
            if grp.kind == "int":
                Pl = self._gline(pdata, grp.cl, axis, True) @ self.Vp.T
                Pr = self._gline(pdata, grp.cr, axis, False) @ self.Vp.T
                M = ((0.5 * (Pl + Pr)) * wline) @ self.Vv
                self._sline(R[:, axis], grp.cl, axis, True, M)
                self._sline(R[:, axis], grp.cr, axis, False, -M)
            else:
                Pb = self._gline(pdata, grp.cl, axis, grp.upper) @ self.Vp.T
                M = ((grp.nsign * Pb) * wline) @ self.Vv
                self._sline(R[:, axis], grp.cl, axis, grp.upper, M)
        return R

    # ------------------------------------------------------------------
    # upwind convection in conservative form

    def convection(self, data, t):
        """Residual of the conservative upwind convection form at time t
        (t only enters through the Dirichlet datum in the boundary flux)."""
        R = np.zeros_like(data)
        hx, hy = self.mesh.hx, self.mesh.hy
        Vc, Dc = self.Vvc, self.Dvc
        vx = tensor2d(Vc, Vc, data[:, 0])
        vy = tensor2d(Vc, Vc, data[:, 1])
        for c in (0, 1):
            vc = vx if c == 0 else vy
            R[:, c] -= hy * tensor2d(self.Dvct, self.Vvct, (vc * vx) * self.w2c)
            R[:, c] -= hx * tensor2d(self.Vvct, self.Dvct, (vc * vy) * self.w2c)
        for grp in self.groups:
            if len(grp) == 0:
                continue
            axis = grp.axis
            _, wline = self._face_geom(axis, self.rule_conv)
            if grp.kind == "int":
                Tl = [self._gline(data[:, c], grp.cl, axis, True) @ Vc.T for c in (0, 1)]
                Tr = [self._gline(data[:, c], grp.cr, axis, False) @ Vc.T for c in (0, 1)]
                un = 0.5 * (Tl[axis] + Tr[axis])
                up = np.maximum(un, 0.0)
                um = np.minimum(un, 0.0)
                for c in (0, 1):
                    F = up * Tl[c] + um * Tr[c]
                    M = (F * wline) @ Vc
                    self._sline(R[:, c], grp.cl, axis, True, M)
                    self._sline(R[:, c], grp.cr, axis, False, -M)
            else:
                T = [self._gline(data[:, c], grp.cl, axis, grp.upper) @ Vc.T
                     for c in (0, 1)]
                un = grp.nsign * T[axis]
                up = np.maximum(un, 0.0)
                um = np.minimum(un, 0.0)
                X, Y = grp.coords(self.rule_conv, self.mesh)
                if self.cfg.g is None:
                    gx = gy = np.zeros_like(X)
                else:
                    gx, gy = self.cfg.g(X, Y, t)
                for c, gc in ((0, gx), (1, gy)):
                    F = up * T[c] + um * gc
                    M = (F * wline) @ Vc
                    self._sline(R[:, c], grp.cl, axis, grp.upper, M)
        return R

    # ------------------------------------------------------------------
    # right-hand-side functionals

    def forcing_residual(self, t):
        """Volume part of the momentum right-hand side, (f(t), phi)."""
        nv = self.vel_basis.n
        R = np.zeros((self.mesh.ncells, 2, nv, nv))
        if self.cfg.f is None:
            return R
        X, Y = self.quad_coords(self.rule_main)
        fx, fy = self.cfg.f(X, Y, t)
        cm = self.mesh.cell_measure
        R[:, 0] = cm * tensor2d(self.Vvt, self.Vvt,
                                np.broadcast_to(fx, X.shape) * self.w2)
        R[:, 1] = cm * tensor2d(self.Vvt, self.Vvt,
                                np.broadcast_to(fy, X.shape) * self.w2)
        return R

    def viscous_rhs(self, t):
        """Momentum right-hand side: body force plus the symmetric
        Dirichlet lifting and penalty terms carrying the datum g."""
        R = self.forcing_residual(t)
        if self.cfg.g is None:
            return R
        mu = self.cfg.mu
        for grp in self.groups:
            if grp.kind == "int" or len(grp) == 0:
                continue
            axis = grp.axis
            h_e, wline = self._face_geom(axis, self.rule_main)
            X, Y = grp.coords(self.rule_main, self.mesh)
            gx, gy = self.cfg.g(X, Y, t)
            for c, gc in ((0, gx), (1, gy)):
                gc = np.broadcast_to(gc, X.shape)
                Mg = (gc * wline) @ self.Vv
                self._sdline(R[:, c], grp.cl, axis, grp.upper,
                             -(mu * grp.nsign / h_e) * Mg, self.dvel)
                self._sline(R[:, c], grp.cl, axis, grp.upper,
                            (mu * self.sigma_vel / h_e) * Mg)
        return R

    def boundary_flux_residual(self, t):
        """Residual of q -> sum over Dirichlet faces of (g . n, q)."""
        nprs = self.pr_basis.n
        R = np.zeros((self.mesh.ncells, nprs, nprs))
        if self.cfg.g is None:
            return R
        for grp in self.groups:
            if grp.kind == "int" or len(grp) == 0:
                continue
            axis = grp.axis
            _, wline = self._face_geom(axis, self.rule_main)
            X, Y = grp.coords(self.rule_main, self.mesh)
            gx, gy = self.cfg.g(X, Y, t)
            gn = grp.nsign * np.broadcast_to(gx if axis == 0 else gy, X.shape)
            self._sline(R, grp.cl, axis, grp.upper, (gn * wline) @ self.Vp)
        return R

    def grad_scalar_residual(self, pdata):
        """Residual of phi -> (grad_h psi, phi) with the broken gradient."""
        nv = self.vel_basis.n
        R = np.zeros((self.mesh.ncells, 2, nv, nv))
        hx, hy = self.mesh.hx, self.mesh.hy
        gx = tensor2d(self.Dp, self.Vp, pdata)
        gy = tensor2d(self.Vp, self.Dp, pdata)
        R[:, 0] = hy * tensor2d(self.Vvt, self.Vvt, gx * self.w2)
        R[:, 1] = hx * tensor2d(self.Vvt, self.Vvt, gy * self.w2)
        return R

    # ------------------------------------------------------------------
    # derived operators

    def discrete_divergence(self, data, t):
        """Pressure-space representation of the weak divergence:
        (B w, q) = -b(w, q) + r(q; t) for all q."""
        rhs = -self.divergence_form(data) + self.boundary_flux_residual(t)
        return self.inv_mass_scalar(rhs)

    def local_mass_residual(self, data, t):
        """Per-cell face balance: sum of mean normal fluxes (outward
        normals), plus the Dirichlet datum flux."""
        res = np.zeros(self.mesh.ncells)
        for grp in self.groups:
            if len(grp) == 0:
                continue
            axis = grp.axis
            _, wline = self._face_geom(axis, self.rule_main)
            if grp.kind == "int":
                Tl = self._gline(data[:, axis], grp.cl, axis, True) @ self.Vv.T
                Tr = self._gline(data[:, axis], grp.cr, axis, False) @ self.Vv.T
                m = (0.5 * (Tl + Tr)) @ wline
                np.add.at(res, grp.cl, m)
                np.add.at(res, grp.cr, -m)
            else:
                X, Y = grp.coords(self.rule_main, self.mesh)
                if self.cfg.g is None:
                    continue
                gx, gy = self.cfg.g(X, Y, t)
                gn = grp.nsign * np.broadcast_to(gx if axis == 0 else gy, X.shape)
                np.add.at(res, grp.cl, gn @ wline)
        return res

    def divdiv_residual(self, data):
        """Residual of the per-cell penalty (div v, div phi)."""
        R = np.zeros_like(data)
        hx, hy = self.mesh.hx, self.mesh.hy
        gx = tensor2d(self.Dv, self.Vv, data[:, 0]) / hx
        gy = tensor2d(self.Vv, self.Dv, data[:, 1]) / hy
        div_w = (gx + gy) * self.w2 * self.mesh.cell_measure
        R[:, 0] = tensor2d(self.Dvt, self.Vvt, div_w) / hx
        R[:, 1] = tensor2d(self.Vvt, self.Dvt, div_w) / hy
        return R

    def normal_jump_residual(self, data):
        """Residual of the interior-face penalty ([v].n, [phi].n)."""
        R = np.zeros_like(data)
        for grp in self.groups:
            if grp.kind != "int" or len(grp) == 0:
                continue
            axis = grp.axis
            _, wline = self._face_geom(axis, self.rule_main)
            Tl = self._gline(data[:, axis], grp.cl, axis, True) @ self.Vv.T
            Tr = self._gline(data[:, axis], grp.cr, axis, False) @ self.Vv.T
            M = ((Tl - Tr) * wline) @ self.Vv
            self._sline(R[:, axis], grp.cl, axis, True, M)
            self._sline(R[:, axis], grp.cr, axis, False, -M)
        return R

    # ------------------------------------------------------------------
    # field wrappers

    def new_velocity(self):
        return DGField.zeros(self.mesh, self.p, "vector")

    def new_pressure(self):
        return DGField.zeros(self.mesh, self.p - 1, "scalar")
