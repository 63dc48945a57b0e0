"""Exception types shared across the package."""


class HbrError(Exception):
    """Base class for all package errors."""


class InputError(HbrError):
    """Invalid user-supplied data or configuration."""


class StructuralError(HbrError):
    """Matrix or vector arguments with inconsistent shape or structure."""


class DegenerateDegreeError(InputError):
    """An isolated vertex makes a normalized Laplacian undefined."""

    def __init__(self, vertex: int):
        self.vertex = vertex
        super().__init__(
            f"vertex {vertex} has zero degree; normalized Laplacians are undefined"
        )


class ExhaustionError(HbrError):
    """Greedy center selection ran out of admissible candidates."""

    def __init__(self, found: int, requested: int):
        self.found = found
        self.requested = requested
        super().__init__(
            f"only {found} of {requested} centers satisfy the angle constraint"
        )


class NumericalError(HbrError):
    """A numerical computation produced non-finite or unusable values."""
