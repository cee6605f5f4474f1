"""Iterative solvers: preconditioned CG, Newton-GMRES, block-Jacobi.

Solvers operate on plain coefficient arrays of any shape; reductions use
fixed traversal order so iteration counts are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.sparse.linalg as spla


class SolverError(RuntimeError):
    pass


@dataclass
class SolveReport:
    iterations: int
    relative_residual: float
    converged: bool
    breakdown: bool = False


@dataclass
class LinearOperator:
    """Matrix-free operator with solver-relevant structure flags."""

    apply: Callable
    symmetric: bool = True
    positive_semidefinite: bool = True
    nullspace_constants: bool = False


def _dot(a, b):
    return float(np.sum(a * b))


def euclid_mean_project(r):
    """Remove the component along the all-ones coefficient vector (the
    nullspace of the pure-Neumann pressure operator in a nodal basis)."""
    return r - np.mean(r)


def cg_solve(op, rhs, tol=1e-10, max_it=2000, precond=None, project=None,
             x0=None, stall_window=60):
    """Preconditioned conjugate gradients.

    Parameters
    ----------
    op : callable or LinearOperator (must be symmetric positive
        (semi)definite).
    rhs : ndarray; tol is relative to ||rhs||.
    precond : callable applying an SPD preconditioner, or None.
    project : callable projecting out a known nullspace (applied to the
        right-hand side, the iterates' residuals and preconditioned
        residuals), or None.
    stall_window : iterations without progress before giving up and
        returning the best iterate seen.

    Returns (solution, SolveReport).  Nonpositive curvature triggers a
    breakdown report (signals a non-SPD operator).
    """
    apply_op = op.apply if isinstance(op, LinearOperator) else op
    if project is None and isinstance(op, LinearOperator) and op.nullspace_constants:
        project = euclid_mean_project

    b = rhs.copy()
    if project is not None:
        b = project(b)
    normb = np.sqrt(_dot(b, b))
    if normb == 0.0:
        return np.zeros_like(rhs), SolveReport(0, 0.0, True)

    if x0 is None:
        x = np.zeros_like(rhs)
        r = b.copy()
    else:
        x = x0.copy()
        if project is not None:
            x = project(x)
        r = b - apply_op(x)
        if project is not None:
            r = project(r)

    z = precond(r) if precond is not None else r
    if project is not None:
        z = project(z)
    p = z.copy()
    rz = _dot(r, z)
    best_x = x.copy()
    best_res = np.sqrt(_dot(r, r)) / normb
    best_iter = 0
    if best_res <= tol:
        return x, SolveReport(0, best_res, True)

    for it in range(1, max_it + 1):
        Ap = apply_op(p)
        pAp = _dot(p, Ap)
        if pAp <= 0.0:
            return best_x, SolveReport(it, best_res, False, breakdown=True)
        alpha = rz / pAp
        x += alpha * p
        r -= alpha * Ap
        if project is not None:
            r = project(r)
        relres = np.sqrt(_dot(r, r)) / normb
        if relres < best_res:
            best_res = relres
            best_x = x.copy()
            best_iter = it
        if relres <= tol:
            return x, SolveReport(it, relres, True)
        if it - best_iter > stall_window:
            return best_x, SolveReport(it, best_res, False)
        z = precond(r) if precond is not None else r
        if project is not None:
            z = project(z)
        rz_new = _dot(r, z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    return best_x, SolveReport(max_it, best_res, False)


# ----------------------------------------------------------------------
# block-Jacobi preconditioning via colored probing


def _cycle_colors(n, periodic):
    """Proper coloring of a 1D path/cycle of n cells."""
    c = np.arange(n) % 2
    if periodic and n % 2 == 1:
        c[n - 1] = 2
        return c, 3
    return c, 2


def extract_cell_blocks(apply_fn, mesh, block_shape):
    """Per-cell diagonal blocks of an operator with face-neighbor stencil.

    Probes the operator with unit coefficient vectors placed on all cells
    of one color simultaneously; a proper coloring of the cell adjacency
    keeps neighbor responses from contaminating the diagonal blocks.
    """
    bs = int(np.prod(block_shape))
    nc = mesh.ncells
    cx, ncx = _cycle_colors(mesh.nx, mesh.periodic_x)
    cy, ncy = _cycle_colors(mesh.ny, mesh.periodic_y)
    ix = np.arange(nc) % mesh.nx
    iy = np.arange(nc) // mesh.nx
    color = cx[ix] + ncx * cy[iy]
    blocks = np.zeros((nc, bs, bs))
    for col in range(ncx * ncy):
        cells = np.nonzero(color == col)[0]
        if len(cells) == 0:
            continue
        for d in range(bs):
            e = np.zeros((nc, bs))
            e[cells, d] = 1.0
            y = apply_fn(e.reshape((nc,) + tuple(block_shape)))
            blocks[cells, :, d] = y.reshape(nc, bs)[cells]
    return blocks


class BlockJacobi:
    """Exact per-cell block solves from dense factorization of the
    diagonal blocks (all degrees of freedom of one cell per block)."""

    def __init__(self, blocks, block_shape):
        conds = np.linalg.cond(blocks)
        if not np.all(np.isfinite(conds)):
            raise SolverError("singular cell block in block-Jacobi setup")
        self.inv = np.linalg.inv(blocks)
        self.block_shape = tuple(block_shape)
        self.bs = int(np.prod(block_shape))

    def __call__(self, r):
        nc = r.shape[0]
        z = np.einsum("cab,cb->ca", self.inv, r.reshape(nc, self.bs))
        return z.reshape(r.shape)


def block_jacobi_precond(apply_fn, mesh, block_shape):
    """Build a block-Jacobi preconditioner by probing apply_fn."""
    return BlockJacobi(extract_cell_blocks(apply_fn, mesh, block_shape),
                       block_shape)


def constant_coarse_matrix(mesh, w_int, w_dir, diag=0.0, regularize=0.0):
    """Cell-graph matrix of a DG operator restricted to per-cell constants.

    On constants only the face penalty terms survive: interior faces of
    axis a couple the two neighbors with weight w_int[a], Dirichlet faces
    add w_dir[a] to the diagonal; diag adds a uniform mass shift.  A
    relative regularization is available for singular (pure-Neumann)
    graphs.
    """
    import scipy.sparse as sp

    nc = mesh.ncells
    rows, cols, vals = [], [], []

    def add(i, j, v):
        rows.append(i)
        cols.append(j)
        vals.append(v)

    for axis, cl, cr, cells_min, cells_max in (
            (0, mesh.xint_cl, mesh.xint_cr, mesh.xmin_cells, mesh.xmax_cells),
            (1, mesh.yint_cl, mesh.yint_cr, mesh.ymin_cells, mesh.ymax_cells)):
        w = w_int[axis]
        for a, b in zip(cl, cr):
            add(a, a, w)
            add(b, b, w)
            add(a, b, -w)
            add(b, a, -w)
        wd = w_dir[axis]
        for c in cells_min:
            add(c, c, wd)
        for c in cells_max:
            add(c, c, wd)
    A = sp.csr_matrix((vals, (rows, cols)), shape=(nc, nc))
    shift = diag
    if regularize:
        scale = max(np.abs(A.diagonal()).max(), diag, 1e-300)
        shift += regularize * scale
    if shift:
        A = A + shift * sp.identity(nc, format="csr")
    return A


class TwoLevelConstant:
    """Additive two-level preconditioner: exact block-Jacobi plus an
    exact coarse correction on the per-cell-constant subspace.  Both
    parts are symmetric positive definite, so the sum is admissible in
    CG; the coarse solve removes the mesh-dependent inter-cell coupling
    that block-Jacobi alone leaves behind."""

    def __init__(self, block_jacobi, coarse_solves):
        self.bj = block_jacobi
        self.coarse = coarse_solves  # one factorized solve per component

    def __call__(self, r):
        z = self.bj(r)
        if r.ndim == 3:  # scalar blocks (nc, n, n)
            rc = r.sum(axis=(-2, -1))
            z = z + self.coarse[0](rc)[:, None, None]
        else:  # vector blocks (nc, 2, n, n)
            for comp in (0, 1):
                rc = r[:, comp].sum(axis=(-2, -1))
                z[:, comp] += self.coarse[comp](rc)[:, None, None]
        return z


def two_level_precond(apply_fn, mesh, block_shape, coarse_mats):
    """Block-Jacobi (probed) plus coarse-constant correction(s)."""
    from scipy.sparse.linalg import factorized

    bj = block_jacobi_precond(apply_fn, mesh, block_shape)
    solves = [factorized(A.tocsc()) for A in coarse_mats]
    return TwoLevelConstant(bj, solves)


# ----------------------------------------------------------------------
# Newton-GMRES for the nonlinear viscous substep


def _gmres(matvec, b, rtol, maxiter, M=None, restart=50):
    n = b.size
    A = spla.LinearOperator((n, n), matvec=matvec)
    Mop = None if M is None else spla.LinearOperator((n, n), matvec=M)
    kw = dict(restart=restart, maxiter=maxiter, M=Mop, atol=0.0)
    try:
        x, info = spla.gmres(A, b, rtol=rtol, **kw)
    except TypeError:  # older scipy spells the relative tolerance 'tol'
        x, info = spla.gmres(A, b, tol=rtol, **kw)
    return x, info


def newton_krylov_solve(residual, x0, tol_newton=1e-9, tol_linear=1e-4,
                        max_newton=25, precond=None, gmres_maxiter=400):
    """Inexact Newton with finite-difference Jacobian action and
    restarted GMRES for the linear corrections.

    residual maps a coefficient array to a residual array of the same
    shape.  Directional derivatives use a sqrt(machine epsilon) step
    scaled by the iterate and direction norms.
    """
    x = x0.copy()
    shape = x.shape
    F = residual(x)
    norm0 = np.sqrt(_dot(F, F))
    if norm0 == 0.0:
        return x, SolveReport(0, 0.0, True)
    sqeps = np.sqrt(np.finfo(float).eps)

    normF = norm0
    for it in range(1, max_newton + 1):
        xnorm = np.sqrt(_dot(x, x))
        Fflat = F.ravel()

        def jac_mv(d):
            dnorm = np.linalg.norm(d)
            if dnorm == 0.0:
                return np.zeros_like(d)
            h = sqeps * max(1.0, xnorm) / dnorm
            Fp = residual(x + h * d.reshape(shape))
            return (Fp.ravel() - Fflat) / h

        Mfn = None
        if precond is not None:
            Mfn = lambda r: precond(r.reshape(shape)).ravel()  # noqa: E731
        dx, info = _gmres(jac_mv, -Fflat, rtol=tol_linear,
                          maxiter=gmres_maxiter, M=Mfn)
        if info != 0 and not np.any(dx):
            raise SolverError(f"GMRES failed in Newton step {it} (info={info})")

        # plain update with a simple backtracking guard
        step = 1.0
        for _ in range(6):
            x_new = x + step * dx.reshape(shape)
            F_new = residual(x_new)
            norm_new = np.sqrt(_dot(F_new, F_new))
            if norm_new <= normF * (1.0 - 1e-4 * step) or norm_new <= tol_newton * norm0:
                break
            step *= 0.5
        x, F, normF = x_new, F_new, norm_new
        if normF <= tol_newton * norm0:
            return x, SolveReport(it, normF / norm0, True)
    raise SolverError(
        f"Newton stagnated after {max_newton} steps "
        f"(relative residual {normF / norm0:.3e})")
