"""Exception hierarchy shared by every module."""


class StrongMinError(Exception):
    pass


class InputError(StrongMinError, ValueError):
    """Malformed or non-finite input data."""


class ShapeError(InputError):
    pass


class DegenerateInputError(InputError):
    """Zero polynomial, degree too small for a construction, and similar."""


class StructureError(StrongMinError):
    """Data does not carry the self-conjugate structure it claims.

    ``defect`` holds the offending norm when one is available.
    """

    def __init__(self, message, defect=None):
        super().__init__(message)
        self.defect = defect


class SingularityError(StrongMinError, ArithmeticError):
    """A matrix that has to be inverted is numerically singular."""

    def __init__(self, message, smallest_singular_value=None):
        super().__init__(message)
        self.smallest_singular_value = smallest_singular_value


class SingularPencilError(SingularityError):
    """Determinant of a square pencil vanishes identically."""


class PreconditionError(StrongMinError):
    pass
