"""Element-local tensor-product polynomial fields."""

from __future__ import annotations

import numpy as np

from .basis import TensorBasis1D


class DGField:
    """Piecewise polynomial field with nodal (Gauss-Lobatto) coefficients.

    data layout: scalar fields (ncells, p+1, p+1), vector fields
    (ncells, 2, p+1, p+1); within a cell index order is [x node, y node].
    """

    def __init__(self, mesh, degree, data):
        n = degree + 1
        data = np.asarray(data, dtype=float)
        if data.shape not in ((mesh.ncells, n, n), (mesh.ncells, 2, n, n)):
            raise ValueError(
                f"bad coefficient shape {data.shape} for degree {degree} "
                f"on {mesh.ncells} cells")
        self.mesh = mesh
        self.degree = degree
        self.data = data

    @property
    def rank(self):
        return "vector" if self.data.ndim == 4 else "scalar"

    @classmethod
    def zeros(cls, mesh, degree, rank="scalar"):
        n = degree + 1
        shape = (mesh.ncells, 2, n, n) if rank == "vector" else (mesh.ncells, n, n)
        return cls(mesh, degree, np.zeros(shape))

    def copy(self):
        return DGField(self.mesh, self.degree, self.data.copy())

    def __add__(self, other):
        return DGField(self.mesh, self.degree, self.data + other.data)

    def __sub__(self, other):
        return DGField(self.mesh, self.degree, self.data - other.data)

    def __mul__(self, a):
        return DGField(self.mesh, self.degree, self.data * a)

    __rmul__ = __mul__


def node_coords(mesh, degree):
    """Physical coordinates of the tensor GLL nodes of every cell.

    Returns X, Y with shape (ncells, p+1, p+1), index order [x, y].
    """
    basis = TensorBasis1D(degree)
    x0, y0 = mesh.cell_origin(np.arange(mesh.ncells))
    xn = x0[:, None, None] + basis.nodes[None, :, None] * mesh.hx
    yn = y0[:, None, None] + basis.nodes[None, None, :] * mesh.hy
    X = np.broadcast_to(xn, (mesh.ncells, basis.n, basis.n)).copy()
    Y = np.broadcast_to(yn, (mesh.ncells, basis.n, basis.n)).copy()
    return X, Y


def interpolate(mesh, degree, fn, rank="scalar", t=None):
    """Nodal interpolation of a callable fn(x, y[, t]) onto a DGField.

    Scalar fn returns an array; vector fn returns a pair (vx, vy).
    """
    X, Y = node_coords(mesh, degree)
    vals = fn(X, Y) if t is None else fn(X, Y, t)
    if rank == "vector":
        vx, vy = vals
        data = np.stack([np.broadcast_to(vx, X.shape),
                         np.broadcast_to(vy, X.shape)], axis=1)
    else:
        data = np.broadcast_to(vals, X.shape).copy()
    return DGField(mesh, degree, np.ascontiguousarray(data, dtype=float))
