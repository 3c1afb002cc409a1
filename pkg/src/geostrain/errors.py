"""Exception types."""


class DomainError(ValueError):
    """Input lies outside the domain of the operation (e.g. det F <= 0)."""


class DimensionError(ValueError):
    """Unsupported or mismatching matrix dimension."""


class ConvergenceError(RuntimeError):
    """An iterative procedure failed; ``reports`` holds whatever was collected."""

    def __init__(self, message, reports=()):
        super().__init__(message)
        self.reports = list(reports)
