"""Exception hierarchy shared across the package."""


class StreettDetError(Exception):
    """Base class for all errors raised by this package."""


class BasisError(StreettDetError):
    """State-based and transition-based acceptance data were mixed."""


class DomainError(StreettDetError, ValueError):
    """An argument lies outside the domain of an operation."""


class CapacityError(StreettDetError):
    """A configured size cap was exceeded."""

    def __init__(self, message, cap=None):
        super().__init__(message)
        self.cap = cap


class InvariantViolation(StreettDetError):
    """A constructed object broke one of its structural invariants."""


class ParseError(StreettDetError):
    """Malformed input text. Carries a 1-based line and column."""

    def __init__(self, message, line=0, column=0):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class SemanticError(ParseError):
    """Well-formed text describing an invalid automaton."""


class UnsupportedFeatureError(ParseError):
    """Input uses a HOA feature outside the supported subset."""
