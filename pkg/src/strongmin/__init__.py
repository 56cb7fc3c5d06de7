"""Strongly minimal, structure-preserving linearizations of polynomial and rational matrices."""
__version__ = "0.1.0"

from .analyze import (
    MinimalityCertificate,
    StructuralReport,
    check_strong_minimality,
    indices_at_infinity,
    partial_mults_at_zero,
    pencil_finite_eigenvalues,
    structural_report,
    transfer_eval,
)
from .errors import (
    DegenerateInputError,
    InputError,
    PreconditionError,
    ShapeError,
    SingularityError,
    SingularPencilError,
    StrongMinError,
    StructureError,
)
from .linearize import LinearSystemMatrix, deflate_Ls, deflate_Ls_structured, linearize_rational
from .numkernel import RankTolerance
from .polyrat import LaurentTail, PolyMatrix, RationalMatrix, StateSpaceTriple, Structure, StructuralIndices
