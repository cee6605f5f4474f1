"""Independent dense-assembly oracle for the DG forms.

Everything here is deliberately naive: basis polynomials are built as
explicit monomial-coefficient products with numpy.poly1d, integrals use
oversized Gauss rules from numpy.polynomial, and matrices are assembled
entry by entry with Python loops over cells, faces, and local basis
pairs.  Nothing is shared with the sum-factorized production path except
the mesh connectivity and node positions (both verified separately by
hand counts and closed-form values).
"""

import numpy as np
from numpy.polynomial.legendre import leggauss

from dgflow.basis import gll_nodes


class LagrangeBasis:
    """Monomial-coefficient Lagrange basis at GLL nodes on [0,1]."""

    def __init__(self, p):
        self.p = p
        self.n = p + 1
        if p == 0:
            nodes = np.array([0.5])
        else:
            nodes = gll_nodes(p, 0.0, 1.0)
        self.nodes = nodes
        self.polys = []
        self.dpolys = []
        for i in range(self.n):
            poly = np.poly1d([1.0])
            for j in range(self.n):
                if j != i:
                    poly *= np.poly1d([1.0, -nodes[j]]) / (nodes[i] - nodes[j])
            self.polys.append(poly)
            self.dpolys.append(poly.deriv())

    def val(self, i, x):
        return self.polys[i](x)

    def dval(self, i, x):
        return self.dpolys[i](x)


def gauss01(n):
    u, w = leggauss(n)
    return 0.5 * (u + 1.0), 0.5 * w


class DenseForms:
    """Entry-by-entry assembly of mass, viscous (SIPG), divergence
    coupling, pressure Poisson, and the convection residual on a small
    mesh.  Global velocity dof order: (cell, component, i, j); pressure:
    (cell, i, j)."""

    def __init__(self, mesh, p, mu=1.0, alpha=3.0, nq=None):
        self.mesh = mesh
        self.p = p
        self.mu = mu
        self.bv = LagrangeBasis(p)
        self.bp = LagrangeBasis(p - 1)
        self.nq = nq if nq is not None else p + 4
        self.xq, self.wq = gauss01(self.nq)
        self.sig_v = alpha * p * (p + 1)
        self.sig_p = alpha * (p - 1) * p
        self.nv = self.bv.n ** 2
        self.np_ = self.bp.n ** 2
        self.Nv = mesh.ncells * 2 * self.nv
        self.Np = mesh.ncells * self.np_

    # dof helpers -------------------------------------------------------

    def vdof(self, cell, comp, i, j):
        n = self.bv.n
        return ((cell * 2 + comp) * n + i) * n + j

    def pdof(self, cell, i, j):
        n = self.bp.n
        return (cell * n + i) * n + j

    # local tables ------------------------------------------------------

    def _tables(self, basis):
        V = np.array([[basis.val(i, x) for i in range(basis.n)] for x in self.xq])
        D = np.array([[basis.dval(i, x) for i in range(basis.n)] for x in self.xq])
        e0 = np.array([basis.val(i, 0.0) for i in range(basis.n)])
        e1 = np.array([basis.val(i, 1.0) for i in range(basis.n)])
        d0 = np.array([basis.dval(i, 0.0) for i in range(basis.n)])
        d1 = np.array([basis.dval(i, 1.0) for i in range(basis.n)])
        return V, D, e0, e1, d0, d1

    def _iter_faces(self):
        """(axis, kind, cl, cr, nsign) for every face; nsign only used on
        boundary faces (outward normal sign along the axis)."""
        m = self.mesh
        for cl, cr in zip(m.xint_cl, m.xint_cr):
            yield 0, "int", int(cl), int(cr), 1.0
        for c in m.xmin_cells:
            yield 0, "bnd", int(c), None, -1.0
        for c in m.xmax_cells:
            yield 0, "bnd", int(c), None, 1.0
        for cl, cr in zip(m.yint_cl, m.yint_cr):
            yield 1, "int", int(cl), int(cr), 1.0
        for c in m.ymin_cells:
            yield 1, "bnd", int(c), None, -1.0
        for c in m.ymax_cells:
            yield 1, "bnd", int(c), None, 1.0

    def _face_trace(self, basis, axis, side_upper):
        """1D arrays: trace values t[i,j->line dof], normal derivative."""
        V, D, e0, e1, d0, d1 = self._tables(basis)
        ev = e1 if side_upper else e0
        dv = d1 if side_upper else d0
        return ev, dv, V

    # scalar SIPG matrix -----------------------------------------------

    def sipg_matrix(self, space="vel", mu=None, sigma=None, dirichlet=True):
        """Dense matrix of the scalar SIPG form (one component)."""
        m = self.mesh
        basis = self.bv if space == "vel" else self.bp
        mu = self.mu if mu is None else mu
        if sigma is None:
            sigma = self.sig_v if space == "vel" else self.sig_p
        n = basis.n
        nloc = n * n
        N = m.ncells * nloc
        A = np.zeros((N, N))
        V, D, e0, e1, d0, d1 = self._tables(basis)
        hx, hy = m.hx, m.hy
        w = self.wq

        def ldof(c, i, j):
            return (c * n + i) * n + j

        # volume
        Kx = (D.T * w) @ D  # int of phi_i' phi_k'
        Mx = (V.T * w) @ V
        for c in range(m.ncells):
            for i in range(n):
                for j in range(n):
                    for k in range(n):
                        for l in range(n):
                            val = mu * (hy / hx * Kx[i, k] * Mx[j, l]
                                        + hx / hy * Mx[i, k] * Kx[j, l])
                            A[ldof(c, i, j), ldof(c, k, l)] += val

        # faces
        for axis, kind, cl, cr, nsign in self._iter_faces():
            h_e = hx if axis == 0 else hy
            jac = hy if axis == 0 else hx

            def trace_dofs(cell, upper):
                """list of (global dof, value coeff, dnormal coeff) per
                line quadrature point, as arrays over local dofs."""
                ev = e1 if upper else e0
                dv = d1 if upper else d0
                out = []
                for i in range(n):
                    for j in range(n):
                        if axis == 0:
                            tv = ev[i] * V[:, j]
                            dn = dv[i] * V[:, j] / h_e
                        else:
                            tv = ev[j] * V[:, i]
                            dn = dv[j] * V[:, i] / h_e
                        out.append((ldof(cell, i, j), tv, dn))
                return out

            if kind == "int":
                left = trace_dofs(cl, True)
                right = trace_dofs(cr, False)
                # [u] = u_l - u_r, {du} = (du_l + du_r)/2 along +axis
                entries = ([(d, tv, dn, 1.0) for d, tv, dn in left]
                           + [(d, tv, dn, -1.0) for d, tv, dn in right])
                for du, tvu, dnu, su in entries:
                    for dv_, tvv, dnv, sv in entries:
                        cons = -mu * np.sum(w * jac * 0.5 * dnu * sv * tvv)
                        adj = -mu * np.sum(w * jac * su * tvu * 0.5 * dnv)
                        pen = mu * sigma / h_e * np.sum(w * jac * su * tvu * sv * tvv)
                        A[dv_, du] += cons + adj + pen
            elif dirichlet:
                upper = nsign > 0
                tr = trace_dofs(cl, upper)
                for du, tvu, dnu in tr:
                    for dv_, tvv, dnv in tr:
                        cons = -mu * np.sum(w * jac * nsign * dnu * tvv)
                        adj = -mu * np.sum(w * jac * tvu * nsign * dnv)
                        pen = mu * sigma / h_e * np.sum(w * jac * tvu * tvv)
                        A[dv_, du] += cons + adj + pen
        return A

    def viscous_matrix(self):
        """Vector SIPG: block diagonal over the two components."""
        A1 = self.sipg_matrix("vel")
        m = self.mesh
        n = self.bv.n
        nloc = n * n
        A = np.zeros((self.Nv, self.Nv))
        for c in range(m.ncells):
            for cc in range(m.ncells):
                blk = A1[c * nloc:(c + 1) * nloc, cc * nloc:(cc + 1) * nloc]
                for comp in range(2):
                    r0 = (c * 2 + comp) * nloc
                    c0 = (cc * 2 + comp) * nloc
                    A[r0:r0 + nloc, c0:c0 + nloc] += blk
        return A

    def alpha_matrix(self):
        return self.sipg_matrix("pr", mu=1.0, sigma=self.sig_p, dirichlet=False)

    # mixed divergence form b ------------------------------------------

    def b_matrix(self):
        """B[q-dof, v-dof] = b(phi_v, q)."""
        m = self.mesh
        nv, npb = self.bv.n, self.bp.n
        B = np.zeros((self.Np, self.Nv))
        Vv, Dv, ev0, ev1, dv0, dv1 = self._tables(self.bv)
        Vp, Dp, ep0, ep1, dp0, dp1 = self._tables(self.bp)
        hx, hy = m.hx, m.hy
        w = self.wq
        # volume: -(div v, q)
        DxM = (Dv.T * w) @ Vp  # [i(vel), k(pr)] of phi_i' psi_k
        MM = (Vv.T * w) @ Vp
        for c in range(m.ncells):
            for i in range(nv):
                for j in range(nv):
                    for k in range(npb):
                        for l in range(npb):
                            B[self.pdof(c, k, l), self.vdof(c, 0, i, j)] -= \
                                hy * DxM[i, k] * MM[j, l]
                            B[self.pdof(c, k, l), self.vdof(c, 1, i, j)] -= \
                                hx * MM[i, k] * DxM[j, l]
        # faces
        for axis, kind, cl, cr, nsign in self._iter_faces():
            jac = hy if axis == 0 else hx

            def vel_trace(cell, upper):
                ev = ev1 if upper else ev0
                out = []
                for i in range(nv):
                    for j in range(nv):
                        tv = ev[i] * Vv[:, j] if axis == 0 else ev[j] * Vv[:, i]
                        out.append((self.vdof(cell, axis, i, j), tv))
                return out

            def pr_trace(cell, upper):
                ep = ep1 if upper else ep0
                out = []
                for i in range(npb):
                    for j in range(npb):
                        tv = ep[i] * Vp[:, j] if axis == 0 else ep[j] * Vp[:, i]
                        out.append((self.pdof(cell, i, j), tv))
                return out

            if kind == "int":
                vel = ([(d, tv, 1.0) for d, tv in vel_trace(cl, True)]
                       + [(d, tv, -1.0) for d, tv in vel_trace(cr, False)])
                prs = ([(d, tv, 0.5) for d, tv in pr_trace(cl, True)]
                       + [(d, tv, 0.5) for d, tv in pr_trace(cr, False)])
                for dv_, tvv, sv in vel:
                    for dq, tvq, sq in prs:
                        B[dq, dv_] += np.sum(self.wq * jac * sv * tvv * sq * tvq)
            else:
                upper = nsign > 0
                for dv_, tvv in vel_trace(cl, upper):
                    for dq, tvq in pr_trace(cl, upper):
                        B[dq, dv_] += np.sum(self.wq * jac * nsign * tvv * tvq)
        return B

    def mass_matrix(self, space="vel"):
        m = self.mesh
        basis = self.bv if space == "vel" else self.bp
        V = np.array([[basis.val(i, x) for i in range(basis.n)] for x in self.xq])
        M1 = (V.T * self.wq) @ V * np.sqrt(m.cell_measure)
        M2 = np.kron(M1, M1)  # carries cell_measure after the sqrt trick
        n2 = basis.n ** 2
        if space == "pr":
            A = np.zeros((self.Np, self.Np))
            for c in range(m.ncells):
                A[c * n2:(c + 1) * n2, c * n2:(c + 1) * n2] = M2
            return A
        A = np.zeros((self.Nv, self.Nv))
        for c in range(m.ncells):
            for comp in range(2):
                r0 = (c * 2 + comp) * n2
                A[r0:r0 + n2, r0:r0 + n2] = M2
        return A

    # convection residual (nonlinear, evaluated not assembled) ----------

    def convection_residual(self, vcoef, g=None, t=0.0):
        """c(v, phi) for every velocity test function phi, by naive
        quadrature; vcoef has shape (ncells, 2, n, n)."""
        m = self.mesh
        n = self.bv.n
        out = np.zeros(self.Nv)
        V, D, e0, e1, d0, d1 = self._tables(self.bv)
        hx, hy = m.hx, m.hy
        w = self.wq

        def val2(cell, comp, x, y):
            s = 0.0
            for i in range(n):
                for j in range(n):
                    s += vcoef[cell, comp, i, j] * self.bv.val(i, x) * self.bv.val(j, y)
            return s

        # volume: -(F(v), grad phi)
        for c in range(m.ncells):
            for qx, xx in enumerate(self.xq):
                for qy, yy in enumerate(self.xq):
                    ww = w[qx] * w[qy] * m.cell_measure
                    v1 = val2(c, 0, xx, yy)
                    v2 = val2(c, 1, xx, yy)
                    for comp, vc in ((0, v1), (1, v2)):
                        for i in range(n):
                            for j in range(n):
                                gxphi = D[qx, i] * V[qy, j] / hx
                                gyphi = V[qx, i] * D[qy, j] / hy
                                out[self.vdof(c, comp, i, j)] -= ww * (
                                    vc * v1 * gxphi + vc * v2 * gyphi)

        # faces
        x0s, y0s = m.cell_origin(np.arange(m.ncells))
        for axis, kind, cl, cr, nsign in self._iter_faces():
            jac = hy if axis == 0 else hx
            for q, s in enumerate(self.xq):
                ww = w[q] * jac
                if axis == 0:
                    xl, yl = 1.0, s
                    xr, yr = 0.0, s
                else:
                    xl, yl = s, 1.0
                    xr, yr = s, 0.0
                if kind == "int":
                    vl = np.array([val2(cl, c_, xl, yl) for c_ in range(2)])
                    vr = np.array([val2(cr, c_, xr, yr) for c_ in range(2)])
                    un = 0.5 * (vl[axis] + vr[axis])
                    flux = max(un, 0.0) * vl + min(un, 0.0) * vr
                    for comp in range(2):
                        for i in range(n):
                            for j in range(n):
                                phi_l = (self.bv.val(i, xl) * self.bv.val(j, yl))
                                phi_r = (self.bv.val(i, xr) * self.bv.val(j, yr))
                                out[self.vdof(cl, comp, i, j)] += ww * flux[comp] * phi_l
                                out[self.vdof(cr, comp, i, j)] -= ww * flux[comp] * phi_r
                else:
                    upper = nsign > 0
                    if axis == 0:
                        xb, yb = (1.0, s) if upper else (0.0, s)
                    else:
                        xb, yb = (s, 1.0) if upper else (s, 0.0)
                    vb = np.array([val2(cl, c_, xb, yb) for c_ in range(2)])
                    un = nsign * vb[axis]
                    if g is not None:
                        gx = x0s[cl] + xb * hx
                        gy = y0s[cl] + yb * hy
                        gval = np.array(g(np.array(gx), np.array(gy), t)).reshape(2)
                    else:
                        gval = np.zeros(2)
                    flux = max(un, 0.0) * vb + min(un, 0.0) * gval
                    for comp in range(2):
                        for i in range(n):
                            for j in range(n):
                                phi = self.bv.val(i, xb) * self.bv.val(j, yb)
                                out[self.vdof(cl, comp, i, j)] += ww * flux[comp] * phi
        return out
