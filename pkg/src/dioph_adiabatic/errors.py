"""Exception hierarchy shared across the package."""


class AdiabaticError(Exception):
    """Base class for all package errors."""


class PolynomialSyntaxError(AdiabaticError, ValueError):
    """Raised when a polynomial string does not match the grammar.

    Attributes:
        position: zero-based character offset of the offending token.
    """

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class ConfigError(AdiabaticError, ValueError):
    """Invalid experiment or run configuration."""


class NumericalGuardError(AdiabaticError, ArithmeticError):
    """A numerical safety guard rejected the computation."""


class PrecisionGuardError(NumericalGuardError):
    """An exact integer is too large to be represented faithfully as a float."""


class NormDriftError(NumericalGuardError):
    """Time evolution lost unitarity beyond the accepted drift."""


class TailMassError(NumericalGuardError):
    """The Fock cutoff discards too much of a coherent state's weight."""


class PremiseError(AdiabaticError):
    """A premise of the identification criterion does not hold."""
