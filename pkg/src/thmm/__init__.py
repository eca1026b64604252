"""Truncated Hausdorff matrix moment problem: orthogonal matrix polynomials,
resolvent matrices and the identities that connect them."""

from .kernels import BACKEND
from .moments import (
    DiscreteMatrixMeasure,
    InsufficientMomentsError,
    Interval,
    MomentSequence,
    check_solvability,
    moments_from_measure,
    random_hausdorff_sequence,
    transform_moments,
)
from .instance import Instance, SingularMatrixError
from .polynomial import MatrixPolynomial

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DiscreteMatrixMeasure",
    "InsufficientMomentsError",
    "Interval",
    "MomentSequence",
    "check_solvability",
    "moments_from_measure",
    "random_hausdorff_sequence",
    "transform_moments",
    "Instance",
    "SingularMatrixError",
    "MatrixPolynomial",
]
