"""Exception hierarchy shared by the model, optimizer and CLI."""

from __future__ import annotations


class DomainError(ValueError):
    """An input lies outside the region where a model formula is defined."""


class SingularInputError(DomainError):
    """A formula would divide by zero or raise zero to a negative/fractional power."""


class NonFiniteError(DomainError):
    """A formula evaluated to inf/nan.

    Attributes:
        term: name of the first factor that went non-finite.
    """

    def __init__(self, message: str, term: str):
        super().__init__(message)
        self.term = term


class DesignEvaluationError(DomainError):
    """A sub-model failed while evaluating a full design vector."""

    def __init__(self, message: str, design: dict[str, float]):
        super().__init__(message)
        self.design = design


class ConfigError(ValueError):
    """Bad scenario or design file: unknown key, wrong type or violated invariant."""

    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        where = ""
        if key is not None:
            where = f"key {key!r}"
            if line is not None:
                where += f" (line {line})"
            where += ": "
        super().__init__(where + message)
        self.key = key
        self.line = line
