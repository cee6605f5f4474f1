"""Structured axis-aligned rectangular meshes with oriented faces.

Cells are indexed c = iy*nx + ix.  Faces are grouped by axis: x-faces are
vertical (normal along x), y-faces horizontal (normal along y).  Interior
face normals point in the positive axis direction and the "left" cell is
the one on the negative side; boundary face normals point outward.
Periodic identification happens at build time, so downstream form loops
see periodic faces as ordinary interior faces.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Face:
    """One mesh face: either interior (two cells) or a Dirichlet boundary face."""

    kind: str  # "interior" | "dirichlet"
    left_cell: int
    right_cell: int | None
    normal: tuple[float, float]
    measure: float
    axis: int  # 0 = x-face, 1 = y-face


class StructuredMesh2D:
    """Uniform rectangular mesh on [x_min,x_max] x [y_min,y_max].

    Parameters
    ----------
    nx, ny : int
        Cell counts per axis (>= 1; >= 2 along any periodic axis).
    bounds : tuple of 4 floats
        (x_min, x_max, y_min, y_max) with x_min < x_max, y_min < y_max.
    periodic : tuple of 2 bools
        Periodicity along x and y.  Boundary faces removed by periodic
        identification become interior faces; all remaining boundary
        faces are tagged Dirichlet.
    """

    def __init__(self, nx, ny, bounds, periodic=(False, False)):
        nx, ny = int(nx), int(ny)
        if nx < 1 or ny < 1:
            raise ValueError(f"cell counts must be positive, got nx={nx}, ny={ny}")
        x_min, x_max, y_min, y_max = map(float, bounds)
        if not (x_min < x_max and y_min < y_max):
            raise ValueError(f"degenerate bounds {bounds}")
        periodic_x, periodic_y = bool(periodic[0]), bool(periodic[1])
        if periodic_x and nx < 2:
            raise ValueError("periodic x direction needs nx >= 2")
        if periodic_y and ny < 2:
            raise ValueError("periodic y direction needs ny >= 2")

        self.nx, self.ny = nx, ny
        self.x_min, self.x_max, self.y_min, self.y_max = x_min, x_max, y_min, y_max
        self.periodic_x, self.periodic_y = periodic_x, periodic_y
        self.hx = (x_max - x_min) / nx
        self.hy = (y_max - y_min) / ny
        self.ncells = nx * ny
        self.cell_measure = self.hx * self.hy
        self.domain_measure = (x_max - x_min) * (y_max - y_min)

        self._build_xfaces()
        self._build_yfaces()

    # ------------------------------------------------------------------
    # face enumeration
    #
    # Global x-face ids: periodic -> iy*nx + ixf (ixf in 0..nx-1, face at
    # x_min + ixf*hx between cells ixf-1 mod nx and ixf); non-periodic ->
    # iy*(nx+1) + ixf (ixf in 0..nx).  y-faces mirror this with
    # id = iyf*nx + ix.

    def _build_xfaces(self):
        nx, ny = self.nx, self.ny
        iy = np.arange(ny)
        if self.periodic_x:
            self.n_xfaces = nx * ny
            ixf = np.arange(nx)
            IY, IXF = np.meshgrid(iy, ixf, indexing="ij")
            ids = (IY * nx + IXF).ravel()
            cl = (IY * nx + (IXF - 1) % nx).ravel()
            cr = (IY * nx + IXF).ravel()
            self.xint_ids, self.xint_cl, self.xint_cr = ids, cl, cr
            self.xint_x = (self.x_min + IXF * self.hx).ravel()
            self.xint_y0 = (self.y_min + IY * self.hy).ravel()
            empty = np.empty(0, dtype=int)
            self.xmin_ids = self.xmin_cells = self.xmax_ids = self.xmax_cells = empty
            self.xmin_y0 = self.xmax_y0 = np.empty(0)
            ix = np.arange(nx)
            IY2, IX = np.meshgrid(iy, ix, indexing="ij")
            self.cell_xface_left = (IY2 * nx + IX).ravel()
            self.cell_xface_right = (IY2 * nx + (IX + 1) % nx).ravel()
        else:
            self.n_xfaces = (nx + 1) * ny
            ixf = np.arange(1, nx)
            IY, IXF = np.meshgrid(iy, ixf, indexing="ij")
            self.xint_ids = (IY * (nx + 1) + IXF).ravel()
            self.xint_cl = (IY * nx + IXF - 1).ravel()
            self.xint_cr = (IY * nx + IXF).ravel()
            self.xint_x = (self.x_min + IXF * self.hx).ravel()
            self.xint_y0 = (self.y_min + IY * self.hy).ravel()
            self.xmin_ids = iy * (nx + 1)
            self.xmin_cells = iy * nx
            self.xmin_y0 = self.y_min + iy * self.hy
            self.xmax_ids = iy * (nx + 1) + nx
            self.xmax_cells = iy * nx + nx - 1
            self.xmax_y0 = self.y_min + iy * self.hy
            ix = np.arange(nx)
            IY2, IX = np.meshgrid(iy, ix, indexing="ij")
            self.cell_xface_left = (IY2 * (nx + 1) + IX).ravel()
            self.cell_xface_right = (IY2 * (nx + 1) + IX + 1).ravel()

    def _build_yfaces(self):
        nx, ny = self.nx, self.ny
        ix = np.arange(nx)
        if self.periodic_y:
            self.n_yfaces = nx * ny
            iyf = np.arange(ny)
            IYF, IX = np.meshgrid(iyf, ix, indexing="ij")
            self.yint_ids = (IYF * nx + IX).ravel()
            self.yint_cl = (((IYF - 1) % ny) * nx + IX).ravel()
            self.yint_cr = (IYF * nx + IX).ravel()
            self.yint_y = (self.y_min + IYF * self.hy).ravel()
            self.yint_x0 = (self.x_min + IX * self.hx).ravel()
            empty = np.empty(0, dtype=int)
            self.ymin_ids = self.ymin_cells = self.ymax_ids = self.ymax_cells = empty
            self.ymin_x0 = self.ymax_x0 = np.empty(0)
            iy = np.arange(ny)
            IY, IX2 = np.meshgrid(iy, ix, indexing="ij")
            self.cell_yface_bottom = (IY * nx + IX2).ravel()
            self.cell_yface_top = (((IY + 1) % ny) * nx + IX2).ravel()
        else:
            self.n_yfaces = nx * (ny + 1)
            iyf = np.arange(1, ny)
            IYF, IX = np.meshgrid(iyf, ix, indexing="ij")
            self.yint_ids = (IYF * nx + IX).ravel()
            self.yint_cl = ((IYF - 1) * nx + IX).ravel()
            self.yint_cr = (IYF * nx + IX).ravel()
            self.yint_y = (self.y_min + IYF * self.hy).ravel()
            self.yint_x0 = (self.x_min + IX * self.hx).ravel()
            self.ymin_ids = ix
            self.ymin_cells = ix
            self.ymin_x0 = self.x_min + ix * self.hx
            self.ymax_ids = ny * nx + ix
            self.ymax_cells = (ny - 1) * nx + ix
            self.ymax_x0 = self.x_min + ix * self.hx
            iy = np.arange(ny)
            IY, IX2 = np.meshgrid(iy, ix, indexing="ij")
            self.cell_yface_bottom = (IY * nx + IX2).ravel()
            self.cell_yface_top = ((IY + 1) * nx + IX2).ravel()

    # ------------------------------------------------------------------

    @property
    def n_interior_faces(self):
        return len(self.xint_cl) + len(self.yint_cl)

    @property
    def n_dirichlet_faces(self):
        return (len(self.xmin_cells) + len(self.xmax_cells)
                + len(self.ymin_cells) + len(self.ymax_cells))

    def cell_origin(self, c):
        """Lower-left corner of cell c."""
        c = np.asarray(c)
        ix = c % self.nx
        iy = c // self.nx
        return self.x_min + ix * self.hx, self.y_min + iy * self.hy

    def faces(self):
        """Iterate over all faces in a fixed, reproducible order."""
        hx, hy = self.hx, self.hy
        for cl, cr in zip(self.xint_cl, self.xint_cr):
            yield Face("interior", int(cl), int(cr), (1.0, 0.0), hy, 0)
        for c in self.xmin_cells:
            yield Face("dirichlet", int(c), None, (-1.0, 0.0), hy, 0)
        for c in self.xmax_cells:
            yield Face("dirichlet", int(c), None, (1.0, 0.0), hy, 0)
        for cl, cr in zip(self.yint_cl, self.yint_cr):
            yield Face("interior", int(cl), int(cr), (0.0, 1.0), hx, 1)
        for c in self.ymin_cells:
            yield Face("dirichlet", int(c), None, (0.0, -1.0), hx, 1)
        for c in self.ymax_cells:
            yield Face("dirichlet", int(c), None, (0.0, 1.0), hx, 1)

    def boundary_tag(self, face):
        if face.kind != "dirichlet":
            raise ValueError("only boundary faces carry a tag")
        return "dirichlet"

    def __repr__(self):
        return (f"StructuredMesh2D({self.nx}x{self.ny}, "
                f"[{self.x_min},{self.x_max}]x[{self.y_min},{self.y_max}], "
                f"periodic=({self.periodic_x},{self.periodic_y}))")


def build_mesh(nx, ny, bounds, periodic=(False, False)):
    """Build a structured rectangular mesh.  See StructuredMesh2D."""
    return StructuredMesh2D(nx, ny, bounds, periodic)


def face_h_e(mesh, face):
    """Coercivity length scale of a face.

    Interior faces use min(|E_left|, |E_right|)/|e|; boundary faces use
    |E|/|e|.  On a uniform mesh this is hx for x-faces and hy for y-faces.
    """
    cell = mesh.cell_measure
    if face.kind == "interior":
        return min(cell, cell) / face.measure
    return cell / face.measure
