"""Model RB/RD random CSP toolkit: generation, threshold analysis, CNF
encoding, reference solvers, and experiment harness."""

from .core import (
    Assignment,
    CheckReport,
    Constraint,
    CspInstance,
    CspParams,
    DerivedSizes,
    ModelKind,
    RbcspError,
    check_assignment,
    derive_sizes,
    distance,
    similarity,
)
from .generator import GenRequest, generate
from .rng import derive_stream

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "CheckReport",
    "Constraint",
    "CspInstance",
    "CspParams",
    "DerivedSizes",
    "GenRequest",
    "ModelKind",
    "RbcspError",
    "check_assignment",
    "derive_sizes",
    "derive_stream",
    "distance",
    "generate",
    "similarity",
    "__version__",
]
