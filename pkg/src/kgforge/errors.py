"""Exception types shared across the package."""


class KgforgeError(Exception):
    """Base class for all kgforge errors."""


class StructuralError(KgforgeError):
    """A term or triple violates the graph model (e.g. literal subject)."""


class BuildStateError(KgforgeError):
    """Operation not allowed in the store's current build phase."""


class ParseError(KgforgeError):
    """Input document failed to parse; carries a 1-based line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class MappingError(KgforgeError):
    """Invalid mapping specification."""


class NormalizationError(MappingError):
    """Value normalization failed; carries the source path."""

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class ResolutionError(MappingError):
    """Entity resolution failed (missing or empty key field)."""


class FactSchemaError(ParseError):
    """A fact JSONL line violates the fact schema."""


class EvaluationError(KgforgeError):
    """Malformed evaluation input (gold corpus, judgments)."""


class UnknownIdError(KgforgeError, LookupError):
    """An entity, type, statement, or user id is not present."""
