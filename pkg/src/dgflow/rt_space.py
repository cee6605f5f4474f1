"""Raviart-Thomas spaces on axis-aligned rectangles.

An RT field of degree k has, per cell, an x component of degree k+1 in x
and k in y, and a y component with the roles swapped.  Degrees of freedom
are k+1 normal moments per face (against Legendre polynomials along the
face, shared between the two adjacent cells, which enforces H(div)
conformity) plus, for k>0, interior moments against the Piola-mapped
anisotropic moment space (component i of degree k-1 in direction i and k
in the other).

On rectangles the Piola map reduces to the per-component scaling
(vx, vy) = (vx_ref/hy, vy_ref/hx), and with Legendre face/interior test
polynomials every moment system is diagonal except for a closed-form 2x2
solve per 1D mode that pins the two highest modal coefficients to the
face moments.
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial import legendre as npleg

from .basis import TensorBasis1D, gauss_legendre
from .fields import DGField
from .kernels import tensor2d


class RTField:
    """Raviart-Thomas coefficients: face normal moments plus interior moments.

    fx[i] holds the k+1 moments of the x component against Legendre
    polynomials on global x-face i (positive-axis normal convention);
    fy likewise for y-faces.  mx (ncells, k, k+1) and my (ncells, k+1, k)
    are the interior moments (empty for k=0).
    """

    def __init__(self, mesh, k, fx, fy, mx, my):
        self.mesh = mesh
        self.k = k
        self.fx = fx
        self.fy = fy
        self.mx = mx
        self.my = my

    @classmethod
    def zeros(cls, mesh, k):
        return cls(mesh, k,
                   np.zeros((mesh.n_xfaces, k + 1)),
                   np.zeros((mesh.n_yfaces, k + 1)),
                   np.zeros((mesh.ncells, k, k + 1)),
                   np.zeros((mesh.ncells, k + 1, k)))

    def copy(self):
        return RTField(self.mesh, self.k, self.fx.copy(), self.fy.copy(),
                       self.mx.copy(), self.my.copy())


class RTSpace:
    """Degree-k Raviart-Thomas tables for one mesh."""

    def __init__(self, mesh, k):
        if k < 0:
            raise ValueError("RT degree must be >= 0")
        self.mesh = mesh
        self.k = k
        a = np.arange(k + 2)
        self.gamma = 1.0 / (2.0 * a + 1.0)  # L2 norms^2 of shifted Legendre
        self.signs = (-1.0) ** a
        # derivative of shifted Legendre in the Legendre basis
        self.DL = 2.0 * npleg.legder(np.eye(k + 2), axis=0)
        self._val_cache = {}

    def leg_values(self, x):
        """P~_a(x) table of shape (len(x), k+2) on [0,1]."""
        key = hash(np.asarray(x).tobytes())
        if key not in self._val_cache:
            self._val_cache[key] = npleg.legval(
                2.0 * np.asarray(x, dtype=float) - 1.0, np.eye(self.k + 2)).T
        return self._val_cache[key]

    # ------------------------------------------------------------------

    def to_modal(self, rt):
        """Per-cell modal Legendre coefficients (cx, cy) of the reference
        components; physical components are cx/hy and cy/hx."""
        mesh, k = self.mesh, self.k
        nc = mesh.ncells
        g = self.gamma
        sgn = self.signs
        hx, hy = mesh.hx, mesh.hy

        cx = np.zeros((nc, k + 2, k + 1))
        if k > 0:
            cx[:, :k, :] = rt.mx / ((hx / hy) * g[:k, None] * g[None, :k + 1])
        m0 = rt.fx[mesh.cell_xface_left] / g[None, :k + 1]
        m1 = rt.fx[mesh.cell_xface_right] / g[None, :k + 1]
        s0 = m0 - np.einsum("a,cad->cd", sgn[:k], cx[:, :k, :])
        s1 = m1 - cx[:, :k, :].sum(axis=1)
        sk = sgn[k]
        cx[:, k, :] = 0.5 * (sk * s0 + s1)
        cx[:, k + 1, :] = 0.5 * (s1 - sk * s0)

        cy = np.zeros((nc, k + 1, k + 2))
        if k > 0:
            cy[:, :, :k] = rt.my / ((hy / hx) * g[:k + 1, None] * g[None, :k])
        m0 = rt.fy[mesh.cell_yface_bottom] / g[None, :k + 1]
        m1 = rt.fy[mesh.cell_yface_top] / g[None, :k + 1]
        s0 = m0 - np.einsum("b,cab->ca", sgn[:k], cy[:, :, :k])
        s1 = m1 - cy[:, :, :k].sum(axis=2)
        cy[:, :, k] = 0.5 * (sk * s0 + s1)
        cy[:, :, k + 1] = 0.5 * (s1 - sk * s0)
        return cx, cy

    def divergence(self, rt):
        """Exact polynomial divergence as a degree-k DG scalar field."""
        cx, cy = self.to_modal(rt)
        k = self.k
        dx = np.einsum("ba,cad->cbd", self.DL, cx)  # (nc, k+1, k+1)
        dy = np.einsum("db,cab->cad", self.DL, cy)
        modal = (dx + dy) / self.mesh.cell_measure
        nodes = TensorBasis1D(k).nodes
        N = self.leg_values(nodes)[:, :k + 1]
        return DGField(self.mesh, k, tensor2d(N, N, modal))

    def embed(self, rt, p):
        """Pointwise-exact embedding into the degree-p DG vector space.

        Requires k <= p-1 so that each component lies in the tensor space.
        """
        if self.k > p - 1:
            raise ValueError(f"embedding needs k <= p-1, got k={self.k}, p={p}")
        cx, cy = self.to_modal(rt)
        nodes = TensorBasis1D(p).nodes
        P = self.leg_values(nodes)
        n = len(nodes)
        out = np.empty((self.mesh.ncells, 2, n, n))
        out[:, 0] = tensor2d(P, P[:, :self.k + 1], cx) / self.mesh.hy
        out[:, 1] = tensor2d(P[:, :self.k + 1], P, cy) / self.mesh.hx
        return out


def _face_leg_table(space, ops, rule):
    return space.leg_values(rule.points)[:, :space.k + 1]


def reconstruct_pressure_flux(ops, psi_data, k):
    """Raviart-Thomas reconstruction of the negative broken gradient of a
    pressure-space field: face normal moments from the numerical flux
    (-{grad psi}.n + sigma/h [psi]), zero normal trace on Dirichlet faces,
    and half-weighted jump-lifted interior moments for k > 0.
    """
    p = ops.p
    if k < 0 or k > p - 1:
        raise ValueError(f"flux reconstruction needs 0 <= k <= p-1, got k={k}")
    space = RTSpace(ops.mesh, k)
    rt = RTField.zeros(ops.mesh, k)
    _accumulate_pressure_flux(ops, space, psi_data, rt)
    return rt


def _accumulate_pressure_flux(ops, space, psi_data, rt):
    mesh = ops.mesh
    k = space.k
    Vp = ops.Vp
    PlegF = _face_leg_table(space, ops, ops.rule_main)
    w_ref = ops.rule_main.weights

    for grp in ops.groups:
        if grp.kind != "int" or len(grp) == 0:
            continue
        axis = grp.axis
        h_e, wline = ops._face_geom(axis, ops.rule_main)
        Tl = ops._gline(psi_data, grp.cl, axis, True) @ Vp.T
        Tr = ops._gline(psi_data, grp.cr, axis, False) @ Vp.T
        Dl = (ops._gdline(psi_data, grp.cl, axis, True, ops.dpr) @ Vp.T) / h_e
        Dr = (ops._gdline(psi_data, grp.cr, axis, False, ops.dpr) @ Vp.T) / h_e
        flux = -0.5 * (Dl + Dr) + (ops.sigma_pr / h_e) * (Tl - Tr)
        moments = (flux * wline) @ PlegF
        if axis == 0:
            rt.fx[grp.ids] += moments
        else:
            rt.fy[grp.ids] += moments
        if k > 0:
            # half-weighted lifting of the jump into the interior moments
            jm = ((Tl - Tr) * w_ref) @ PlegF  # reference-face moments
            sgn = space.signs
            if axis == 0:
                rt.mx[grp.cl] += 0.5 * jm[:, None, :]
                rt.mx[grp.cr] += 0.5 * sgn[:k, None] * jm[:, None, :]
            else:
                rt.my[grp.cl] += 0.5 * jm[:, :, None]
                rt.my[grp.cr] += 0.5 * sgn[None, :k] * jm[:, :, None]
    # Dirichlet faces keep zero normal moments.

    if k > 0:
        Px = np.ascontiguousarray(space.leg_values(ops.rule_main.points).T)
        gx = tensor2d(ops.Dp, Vp, psi_data)  # reference d/dx
        gy = tensor2d(Vp, ops.Dp, psi_data)
        rt.mx -= tensor2d(Px[:k], Px[:k + 1], gx * ops.w2)
        rt.my -= tensor2d(Px[:k + 1], Px[:k], gy * ops.w2)


def reconstruct_velocity(ops, w_data, t, k=None):
    """Divergence-preserving projection of a DG velocity into RT^{p-1}:
    face moments from the mean normal trace (Dirichlet faces take the
    boundary datum), interior moments match the input field.
    """
    p = ops.p
    if k is None:
        k = p - 1
    if k != p - 1:
        raise ValueError("velocity reconstruction is defined for k = p-1")
    space = RTSpace(ops.mesh, k)
    rt = RTField.zeros(ops.mesh, k)
    _accumulate_velocity(ops, space, w_data, t, rt)
    return rt


def _accumulate_velocity(ops, space, w_data, t, rt):
    mesh = ops.mesh
    k = space.k
    Vv = ops.Vv
    PlegF = _face_leg_table(space, ops, ops.rule_main)

    for grp in ops.groups:
        if len(grp) == 0:
            continue
        axis = grp.axis
        _, wline = ops._face_geom(axis, ops.rule_main)
        target = rt.fx if axis == 0 else rt.fy
        if grp.kind == "int":
            Tl = ops._gline(w_data[:, axis], grp.cl, axis, True) @ Vv.T
            Tr = ops._gline(w_data[:, axis], grp.cr, axis, False) @ Vv.T
            target[grp.ids] += ((0.5 * (Tl + Tr)) * wline) @ PlegF
        else:
            X, Y = grp.coords(ops.rule_main, mesh)
            if ops.cfg.g is None:
                continue
            gx, gy = ops.cfg.g(X, Y, t)
            gax = np.broadcast_to(gx if axis == 0 else gy, X.shape)
            target[grp.ids] += (gax * wline) @ PlegF

    if k > 0:
        Px = np.ascontiguousarray(space.leg_values(ops.rule_main.points).T)
        wx = tensor2d(Vv, Vv, w_data[:, 0])
        wy = tensor2d(Vv, Vv, w_data[:, 1])
        rt.mx += mesh.hx * tensor2d(Px[:k], Px[:k + 1], wx * ops.w2)
        rt.my += mesh.hy * tensor2d(Px[:k + 1], Px[:k], wy * ops.w2)


def reconstruct_helmholtz_flux(ops, w_data, psi_data, t):
    """Fused reconstruction of the Helmholtz flux (velocity reconstruction
    plus pressure-flux reconstruction) in RT^{p-1}: one moment assignment
    per face / interior mode, algebraically identical to adding the two
    separate reconstructions."""
    space = RTSpace(ops.mesh, ops.p - 1)
    rt = RTField.zeros(ops.mesh, ops.p - 1)
    _accumulate_velocity(ops, space, w_data, t, rt)
    _accumulate_pressure_flux(ops, space, psi_data, rt)
    return rt


def rt_divergence(rt):
    """Exact divergence of an RT field as a degree-k DG scalar field."""
    return RTSpace(rt.mesh, rt.k).divergence(rt)


def rt_embed_to_dg(rt, p):
    """Embed an RT field (k <= p-1) into the degree-p DG vector space."""
    return RTSpace(rt.mesh, rt.k).embed(rt, p)


def rt_interpolate(mesh, k, fn):
    """Moment interpolation of an analytic vector field (for testing):
    fn(x, y) -> (vx, vy) arrays."""
    space = RTSpace(mesh, k)
    rt = RTField.zeros(mesh, k)
    rule = gauss_legendre(k + 3)
    Pleg = space.leg_values(rule.points)[:, :k + 1]
    w = rule.weights

    def face_moments(X, Y, comp, jac):
        vx, vy = fn(X, Y)
        vals = np.broadcast_to(vx if comp == 0 else vy, X.shape)
        return (vals * (w * jac)[None, :]) @ Pleg

    # x faces
    for ids, xs, y0s in _iter_xface_blocks(mesh):
        X = np.repeat(xs[:, None], rule.n, axis=1)
        Y = y0s[:, None] + rule.points[None, :] * mesh.hy
        rt.fx[ids] = face_moments(X, Y, 0, mesh.hy)
    for ids, x0s, ys in _iter_yface_blocks(mesh):
        X = x0s[:, None] + rule.points[None, :] * mesh.hx
        Y = np.repeat(ys[:, None], rule.n, axis=1)
        rt.fy[ids] = face_moments(X, Y, 1, mesh.hx)

    if k > 0:
        x0, y0 = mesh.cell_origin(np.arange(mesh.ncells))
        X = x0[:, None, None] + rule.points[None, :, None] * mesh.hx
        Y = y0[:, None, None] + rule.points[None, None, :] * mesh.hy
        shape = (mesh.ncells, rule.n, rule.n)
        X = np.broadcast_to(X, shape)
        Y = np.broadcast_to(Y, shape)
        vx, vy = fn(X, Y)
        w2 = np.outer(w, w)
        Pt = np.ascontiguousarray(space.leg_values(rule.points).T)
        rt.mx = mesh.hx * tensor2d(Pt[:k], Pt[:k + 1],
                                   np.broadcast_to(vx, shape) * w2)
        rt.my = mesh.hy * tensor2d(Pt[:k + 1], Pt[:k],
                                   np.broadcast_to(vy, shape) * w2)
    return rt


def _iter_xface_blocks(mesh):
    yield mesh.xint_ids, mesh.xint_x, mesh.xint_y0
    if len(mesh.xmin_ids):
        yield mesh.xmin_ids, np.full(len(mesh.xmin_ids), mesh.x_min), mesh.xmin_y0
        yield mesh.xmax_ids, np.full(len(mesh.xmax_ids), mesh.x_max), mesh.xmax_y0


def _iter_yface_blocks(mesh):
    yield mesh.yint_ids, mesh.yint_x0, mesh.yint_y
    if len(mesh.ymin_ids):
        yield mesh.ymin_ids, mesh.ymin_x0, np.full(len(mesh.ymin_ids), mesh.y_min)
        yield mesh.ymax_ids, mesh.ymax_x0, np.full(len(mesh.ymax_ids), mesh.y_max)
