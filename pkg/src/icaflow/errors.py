"""Exception hierarchy shared by all icaflow modules."""

from __future__ import annotations


class IcaflowError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(IcaflowError):
    """A structural invariant of a model value is broken."""


class IntegrityError(IcaflowError):
    """A reference points at an entity that does not exist (dangling id)."""


class ProjectionError(IcaflowError):
    """A unit carries two distinct codes of one domain for one coder.

    Projections require mutual exclusiveness to have been resolved first.
    """

    def __init__(self, coder_id: str, domain_id: str, document_id: str, unit: int):
        self.coder_id = coder_id
        self.domain_id = domain_id
        self.document_id = document_id
        self.unit = unit
        super().__init__(
            f"coder {coder_id!r} applied two codes of domain {domain_id!r} "
            f"at unit {unit} of document {document_id!r}"
        )


class OrderingError(IcaflowError):
    """A masked view or submission was requested out of coding sequence."""

    def __init__(self, message: str, expected_coder: str | None = None):
        self.expected_coder = expected_coder
        super().__init__(message)


class InsufficientDataError(IcaflowError):
    """No pairable items exist for the requested coefficient."""


class VocabularyError(IcaflowError):
    """A value outside the permitted vocabulary was encountered."""


class DegenerateMatrixError(IcaflowError):
    """Expected disagreement is zero while observed disagreement is not."""


class WrongCoefficientError(IcaflowError):
    """A gate was fed a coefficient variant it does not accept."""


class TransitionError(IcaflowError):
    """An event that is illegal in the current workflow phase."""

    def __init__(self, message: str, allowed: tuple[str, ...] = ()):
        self.allowed = allowed
        if allowed:
            message = f"{message} (allowed events: {', '.join(allowed)})"
        super().__init__(message)


class ReusedDocumentsError(IcaflowError):
    """A coding round tried to reuse documents from an earlier iteration."""


class GeometryError(IcaflowError):
    """Synthetic quotations cannot fit in the configured document geometry."""


class ParseError(IcaflowError):
    """A file could not be parsed; carries line/column when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "")
            message = f"{message} ({where})"
        super().__init__(message)


class SchemaError(IcaflowError):
    """A parsed file violates the project schema; carries the field path."""

    def __init__(self, message: str, path: str = ""):
        self.path = path
        if path:
            message = f"{path}: {message}"
        super().__init__(message)
