"""Shared exception types."""


class CapExceededError(RuntimeError):
    """A configured resource cap (dense matrix size, word enumeration, Kraus count) was hit."""

    def __init__(self, message, cap=None):
        super().__init__(message)
        self.cap = cap


class ShapeMismatchError(ValueError):
    """Operands have incompatible dimensions or site counts."""


class AlphabetError(ValueError):
    """Quantum alphabet vectors are not unit-norm or not linearly independent."""


class AlignmentError(ValueError):
    """A block channel does not divide the requested site range evenly."""


class BackendError(ValueError):
    """The requested correlation backend does not apply to this source."""


class ConfigError(ValueError):
    """An experiment config is malformed; carries the offending field path."""

    def __init__(self, message, field=None):
        super().__init__(message if field is None else f"{field}: {message}")
        self.field = field
