"""Regular fat linear sets over finite-field towers and their rank-metric codes.

Submodules: gf (tower arithmetic), linpoly (linearized polynomials), linset
(linear sets, weights, spectra), families (constructions), equiv (semilinear
equivalence), rmc (rank-metric code pipeline), cli (command line).
"""

from .errors import (
    ConsistencyError,
    EnumerationCapError,
    FatlinError,
    PreconditionError,
    TheoremCheckError,
)
from .gf import FieldCtx, FieldElem, make_field
from .linpoly import LinearizedPoly
from .linset import Classification, ProjPoint, SpectrumReport, Subspace

__version__ = "0.1.0"

__all__ = [
    "Classification",
    "ConsistencyError",
    "EnumerationCapError",
    "FatlinError",
    "FieldCtx",
    "FieldElem",
    "LinearizedPoly",
    "PreconditionError",
    "ProjPoint",
    "SpectrumReport",
    "Subspace",
    "TheoremCheckError",
    "make_field",
]
