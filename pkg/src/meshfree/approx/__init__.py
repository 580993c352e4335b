from .operators import (
    Directional,
    FirstDerivative,
    Identity,
    Laplacian,
    Operator,
    OperatorSum,
    ScaledOperator,
    SecondDerivative,
)
from .basis import (
    Gaussian,
    InverseMultiquadric,
    MonomialBasis,
    Multiquadric,
    Polyharmonic,
)
from .weights import ConstantWeight, GaussianWeight
from .engines import RbfFd, WeightedLeastSquares

__all__ = [
    "ConstantWeight",
    "Directional",
    "FirstDerivative",
    "Gaussian",
    "GaussianWeight",
    "Identity",
    "InverseMultiquadric",
    "Laplacian",
    "MonomialBasis",
    "Multiquadric",
    "Operator",
    "OperatorSum",
    "Polyharmonic",
    "RbfFd",
    "ScaledOperator",
    "SecondDerivative",
    "WeightedLeastSquares",
]
