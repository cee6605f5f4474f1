"""High-order discontinuous Galerkin solver for 2D incompressible flow.

The package implements a spectral DG discretization of the incompressible
Navier-Stokes / Stokes equations on structured rectangular meshes, a
rotational incremental pressure-correction time stepper, and four
interchangeable discrete Helmholtz decompositions (div-div penalized,
div-div plus normal-continuity penalized, pressure-Poisson Raviart-Thomas
flux reconstruction, and the pointwise divergence-free Helmholtz-flux
Raviart-Thomas reconstruction).
"""

from .mesh import StructuredMesh2D, Face, build_mesh, face_h_e
from .basis import TensorBasis1D, QuadratureRule1D, gll_nodes, gauss_legendre
from .fields import DGField
from .forms import FormConfig, DGOperators, jump_and_average, penalty_sigma
from .rt_space import RTField, RTSpace
from .projection import ProjectionVariant, HelmholtzResult
from .ripcs import SplittingState, DIRKTableau, alexander_dirk2

__all__ = [
    "StructuredMesh2D",
    "Face",
    "build_mesh",
    "face_h_e",
    "TensorBasis1D",
    "QuadratureRule1D",
    "gll_nodes",
    "gauss_legendre",
    "DGField",
    "FormConfig",
    "DGOperators",
    "jump_and_average",
    "penalty_sigma",
    "RTField",
    "RTSpace",
    "ProjectionVariant",
    "HelmholtzResult",
    "SplittingState",
    "DIRKTableau",
    "alexander_dirk2",
]

__version__ = "0.1.0"
