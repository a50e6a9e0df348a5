"""Exception hierarchy shared by every fano-mck module."""

from typing import Optional


class FanoMckError(Exception):
    """Base class for all fano-mck errors."""


class DimensionMismatchError(FanoMckError):
    """Matrix/vector shapes do not agree."""


class ModelError(FanoMckError):
    """Model parameters violate the model invariants."""


class ModelMismatchError(FanoMckError):
    """Operands live on different models."""


class FactorIndexError(FanoMckError):
    """A factor index is outside the product model."""


class ProjectorValidationError(FanoMckError):
    """A projector set violates one of its defining identities."""

    def __init__(self, identity: str, details: Optional[str] = None):
        self.identity = identity
        self.details = details
        message = f"projector identity violated: {identity}"
        if details:
            message = f"{message} ({details})"
        super().__init__(message)


class RelationBootstrapError(FanoMckError):
    """The model does not reproduce the expected shape of a relation."""


class ResourceLimitError(FanoMckError):
    """A configured resource guard was tripped."""


class CycleSyntaxError(FanoMckError):
    """Syntax error in a cycle expression."""

    def __init__(self, message: str, line: int, column: int, token: str):
        self.line = line
        self.column = column
        self.token = token
        super().__init__(f"{message} at line {line}, column {column} (token {token!r})")


class CycleValidationError(FanoMckError):
    """A parsed cycle expression is invalid for the ambient power."""


class MotiveError(FanoMckError):
    """A motive expression references an unknown piece or is malformed."""


class ScenarioError(FanoMckError):
    """Malformed scenario file or check specification."""
