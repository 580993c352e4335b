"""Strong-form meshless PDE toolkit.

Builds scattered-node discretizations of geometric domains, computes
stencil weights for differential operators (weighted least squares or
RBF-FD with monomial augmentation), and solves PDEs either explicitly
(operator evaluation, time stepping) or implicitly (sparse assembly
plus a preconditioned iterative solver).
"""

from .config import backend_name, set_threads
from .errors import (
    ConfigError,
    GeometryError,
    InstabilityError,
    MeshfreeError,
    NumericalError,
    StencilError,
    StorageError,
    WeightError,
)
from .geometry import (
    Ball,
    Box,
    NodeSet,
    add_ghost_nodes,
    discretize_boundary,
    fill_interior,
    find_closest_stencils,
    grid_nodes,
)
from .approx import (
    ConstantWeight,
    Directional,
    FirstDerivative,
    Gaussian,
    GaussianWeight,
    Identity,
    InverseMultiquadric,
    Laplacian,
    MonomialBasis,
    Multiquadric,
    Operator,
    Polyharmonic,
    RbfFd,
    SecondDerivative,
    WeightedLeastSquares,
)
from .storage import WeightStore, compute_weights
from .assembly import SparseSystem
from .solve import SolverConfig, SolveResult, solve_sparse

__all__ = [
    "Ball",
    "Box",
    "ConfigError",
    "ConstantWeight",
    "Directional",
    "FirstDerivative",
    "Gaussian",
    "GaussianWeight",
    "GeometryError",
    "Identity",
    "InstabilityError",
    "InverseMultiquadric",
    "Laplacian",
    "MeshfreeError",
    "MonomialBasis",
    "Multiquadric",
    "NodeSet",
    "NumericalError",
    "Operator",
    "Polyharmonic",
    "RbfFd",
    "SecondDerivative",
    "SolveResult",
    "SolverConfig",
    "SparseSystem",
    "StencilError",
    "StorageError",
    "WeightError",
    "WeightStore",
    "WeightedLeastSquares",
    "add_ghost_nodes",
    "backend_name",
    "compute_weights",
    "discretize_boundary",
    "fill_interior",
    "find_closest_stencils",
    "grid_nodes",
    "set_threads",
    "solve_sparse",
]

__version__ = "0.1.0"
