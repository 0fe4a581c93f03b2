"""Exception types shared across the engine."""


class BosError(Exception):
    """Base class for all errors raised by this package."""


class InvalidConfigError(BosError):
    """A parameter value is outside its documented range."""


class ValidationError(BosError):
    """Input data violates a structural invariant."""


class ParseError(BosError):
    """A corpus file line cannot be parsed."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class FormatError(BosError):
    """A binary embeddings file has a bad header or a truncated payload."""


class DegenerateInputError(BosError):
    """The input admits no meaningful result (e.g. all rows identical)."""
