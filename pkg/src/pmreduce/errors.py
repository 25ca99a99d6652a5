"""Exception hierarchy shared by every stage of the pipeline."""


class PipelineError(Exception):
    """Base class for all errors raised by pmreduce."""


class DimensionMismatchError(PipelineError, ValueError):
    pass


class InvalidParameterError(PipelineError, ValueError):
    pass


class ExhaustiveLimitError(PipelineError):
    """Raised instead of silently skipping an enumeration that is too large."""

    def __init__(self, what: str, size: int, limit: int):
        super().__init__(f"{what}: size {size} exceeds exhaustive limit {limit}")
        self.size = size
        self.limit = limit


class UniquenessViolationError(PipelineError):
    """Zero, or more than one, non-positive principal minor was found."""

    def __init__(self, message: str, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class InvalidInstanceError(PipelineError):
    pass


class MissingWitnessError(PipelineError):
    pass


class DecodeError(PipelineError):
    pass


class TautologyError(PipelineError, ValueError):
    pass


class FormatError(PipelineError, ValueError):
    """Malformed serialized artifact (JSON, DIMACS)."""
