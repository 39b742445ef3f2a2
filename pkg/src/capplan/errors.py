class ValidationError(ValueError):
    """Input data violates a structural or domain rule."""


class StructuralMismatchError(ValueError):
    """Two linear programs do not share variables or constraints."""


class InfeasibleSolutionError(ValueError):
    """A candidate solution violates the constraints of its program."""
