"""Exception hierarchy shared by all modules.

Each class carries an ``exit_code`` used by the command-line driver, so the
mapping from failure kind to process status lives in one place.
"""


class BioEventError(Exception):
    exit_code = 1


class CorpusParseError(BioEventError):
    exit_code = 3

    def __init__(self, path, line, message):
        self.path = str(path)
        self.line = line
        self.message = message
        super().__init__(f"{self.path}:{line}: {message}")


class ValidationError(BioEventError):
    exit_code = 4

    def __init__(self, doc_id, violations):
        self.doc_id = doc_id
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"document {doc_id!r} failed validation: {lines}")


class InsufficientDataError(BioEventError):
    exit_code = 5

    def __init__(self, corpus, requested, available):
        self.corpus = corpus
        self.requested = requested
        self.available = available
        super().__init__(
            f"INSUFFICIENT_DATA: corpus {corpus!r} cannot supply {requested} units "
            f"(only {available} available)"
        )


class NoPersonEntityError(BioEventError):
    """Raised when a source document carries no PERSON coreference chain."""

    exit_code = 5


class UndefinedKappaError(BioEventError):
    """Chance agreement is 1, so kappa is 0/0."""


class NotNormalizedError(BioEventError):
    pass


class TokenizationMismatchError(BioEventError):
    def __init__(self, doc_id, index):
        self.doc_id = doc_id
        self.index = index
        super().__init__(f"tokenization differs in {doc_id!r} at token {index}")


class ClassifierError(BioEventError):
    pass


class RebuildRequiredError(BioEventError):
    exit_code = 7


class NetworkError(BioEventError):
    """Retryable transport failure (connection, timeout, 429/5xx)."""

    exit_code = 6


class SchemaChangeError(BioEventError):
    exit_code = 6


class NotFoundError(BioEventError):
    exit_code = 6


class ExclusionError(BioEventError):
    """A record that cannot be assigned a group; ``reason`` is a stable code."""

    def __init__(self, reason, detail=""):
        self.reason = reason
        super().__init__(f"{reason}: {detail}" if detail else reason)


class MissingFieldError(ExclusionError):
    def __init__(self, field):
        self.field = field
        super().__init__("MISSING_FIELD", field)
