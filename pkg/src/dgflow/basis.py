"""Tensor-product Gauss-Lobatto-Lagrange bases and Gauss-Legendre quadrature.

The reference interval is [0,1] throughout the package; functions accept
explicit interval endpoints for convenience in tests.  Basis polynomials
are stored as Legendre coefficient columns (well conditioned up to the
moderate degrees used here), so values and derivatives at arbitrary
points are exact polynomial evaluations.
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial import legendre as npleg

from .kernels import tensor2d


def gll_nodes(p, a=0.0, b=1.0):
    """Gauss-Lobatto points for degree p on [a,b]: endpoints plus the
    roots of the derivative of the Legendre polynomial P_p.

    Requires p >= 1 (a single node has no endpoints).
    """
    p = int(p)
    if p < 1:
        raise ValueError("gll_nodes requires p >= 1")
    if p == 1:
        u = np.array([-1.0, 1.0])
    else:
        c = np.zeros(p + 1)
        c[p] = 1.0
        interior = np.sort(npleg.legroots(npleg.legder(c)))
        u = np.concatenate(([-1.0], interior, [1.0]))
    return a + (u + 1.0) * 0.5 * (b - a)


class QuadratureRule1D:
    """Gauss-Legendre rule with n points on [a,b]; exact for degree <= 2n-1."""

    def __init__(self, points, weights):
        self.points = np.asarray(points, dtype=float)
        self.weights = np.asarray(weights, dtype=float)
        self.n = len(self.points)

    def __repr__(self):
        return f"QuadratureRule1D(n={self.n})"


def gauss_legendre(n, a=0.0, b=1.0):
    n = int(n)
    if n < 1:
        raise ValueError("gauss_legendre requires n >= 1")
    u, w = npleg.leggauss(n)
    half = 0.5 * (b - a)
    return QuadratureRule1D(a + (u + 1.0) * half, w * half)


class TensorBasis1D:
    """Lagrange basis of degree p at Gauss-Lobatto nodes on [0,1].

    Attributes
    ----------
    nodes : (p+1,) node positions, endpoints included.
    coeffs : (p+1, p+1) Legendre coefficients; column i represents basis i.
    """

    def __init__(self, p):
        p = int(p)
        if p < 0:
            raise ValueError("degree must be nonnegative")
        self.p = p
        self.n = p + 1
        if p == 0:
            self.nodes = np.array([0.5])
            self.coeffs = np.array([[1.0]])
        else:
            self.nodes = gll_nodes(p, 0.0, 1.0)
            V = npleg.legvander(2.0 * self.nodes - 1.0, p)  # V[m,a] = P_a(u_m)
            self.coeffs = np.linalg.inv(V)
        # d/dx = 2 d/du on [0,1]
        self._dcoeffs = 2.0 * npleg.legder(self.coeffs, axis=0)
        self.vals_at_0 = self.values_at(np.array([0.0]))[0]
        self.vals_at_1 = self.values_at(np.array([1.0]))[0]
        self.derivs_at_0 = self.derivs_at(np.array([0.0]))[0]
        self.derivs_at_1 = self.derivs_at(np.array([1.0]))[0]

    def values_at(self, x):
        """Table V[q,i] = basis_i(x_q) for points x in [0,1]."""
        x = np.asarray(x, dtype=float)
        return npleg.legval(2.0 * x - 1.0, self.coeffs).T

    def derivs_at(self, x):
        """Table D[q,i] = basis_i'(x_q)."""
        x = np.asarray(x, dtype=float)
        if self.p == 0:
            return np.zeros((len(np.atleast_1d(x)), 1))
        return npleg.legval(2.0 * x - 1.0, self._dcoeffs).T

    def tables(self, rule):
        """(values, derivatives) tables at the points of a quadrature rule."""
        return self.values_at(rule.points), self.derivs_at(rule.points)


_FACE_SIDES = ("xmin", "xmax", "ymin", "ymax")


def eval_cell(coeffs, basis, rule):
    """Evaluate a tensor-product polynomial on the reference cell [0,1]^2.

    Parameters
    ----------
    coeffs : (..., p+1, p+1) nodal coefficients, x index first.
    basis : TensorBasis1D
    rule : QuadratureRule1D applied in both directions.

    Returns
    -------
    values : (..., nq, nq) function values on the tensor quadrature grid.
    grads : (..., 2, nq, nq) reference-coordinate gradients.

    The contraction is sum factorized: O(p^3) work per cell.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    n = basis.n
    if coeffs.shape[-2:] != (n, n):
        raise ValueError(f"expected trailing shape ({n},{n}), got {coeffs.shape}")
    lead = coeffs.shape[:-2]
    C = coeffs.reshape((-1, n, n))
    V, D = basis.tables(rule)
    vals = tensor2d(V, V, C)
    gx = tensor2d(D, V, C)
    gy = tensor2d(V, D, C)
    q = rule.n
    grads = np.stack([gx, gy], axis=1)
    return vals.reshape(lead + (q, q)), grads.reshape(lead + (2, q, q))


def eval_face(coeffs, basis, rule, side):
    """Trace values and outward normal-derivative traces on one cell side.

    side is one of "xmin", "xmax", "ymin", "ymax" (faces x=0, x=1, y=0,
    y=1 of the reference cell).  The normal derivative is taken along the
    outward reference normal of that side.
    """
    if side not in _FACE_SIDES:
        raise ValueError(f"side must be one of {_FACE_SIDES}")
    coeffs = np.asarray(coeffs, dtype=float)
    n = basis.n
    if coeffs.shape[-2:] != (n, n):
        raise ValueError(f"expected trailing shape ({n},{n}), got {coeffs.shape}")
    Vf = basis.values_at(rule.points)
    if side == "xmin":
        line = coeffs[..., 0, :]
        dline = np.einsum("i,...ij->...j", basis.derivs_at_0, coeffs)
        sign = -1.0
    elif side == "xmax":
        line = coeffs[..., -1, :]
        dline = np.einsum("i,...ij->...j", basis.derivs_at_1, coeffs)
        sign = 1.0
    elif side == "ymin":
        line = coeffs[..., :, 0]
        dline = np.einsum("j,...ij->...i", basis.derivs_at_0, coeffs)
        sign = -1.0
    else:
        line = coeffs[..., :, -1]
        dline = np.einsum("j,...ij->...i", basis.derivs_at_1, coeffs)
        sign = 1.0
    return line @ Vf.T, sign * (dline @ Vf.T)
