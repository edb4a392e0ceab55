"""Exception types shared across the package."""


class NetinductError(Exception):
    """Base class for all package errors."""


class ParseError(NetinductError):
    """Malformed network document."""


class ValidationError(NetinductError):
    """Structurally valid document violating a network invariant."""


class SpectralMismatchError(NetinductError):
    """The two eigenvalue routes disagree beyond tolerance."""


class SingularMatrixError(NetinductError):
    """A matrix required to be invertible is singular."""
