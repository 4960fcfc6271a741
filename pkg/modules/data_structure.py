class ExitCode:
    success = 0
    usage = 2
    io = 3


class RunResponse:
    @classmethod
    def success(cls, content: dict | str | None):
        return {
            "success": True,
            "content": content,
        }

    @classmethod
    def failure(cls, content: dict | str | None):
        return {
            "success": False,
            "content": content,
        }


class QLabError(Exception):
    """Base class for every error raised by the lab modules."""


class DimensionMismatchError(QLabError, ValueError):
    pass


class NonUnitaryError(QLabError, ValueError):
    pass


class StateTooLargeError(QLabError, MemoryError):
    pass


class InvalidCodeError(QLabError, ValueError):
    pass


class DecodingError(QLabError):
    pass


class NonCliffordGateError(QLabError, ValueError):
    pass


class SearchLimitError(QLabError):
    """An exhaustive routine was asked to run beyond the range it can enumerate."""


class RetryBudgetExceededError(QLabError, RuntimeError):
    pass


class UnsupportedGateError(QLabError, ValueError):
    """The gate has no transversal implementation on the given code."""


class InvalidInstanceError(QLabError, ValueError):
    """An algorithm instance violates its promise or preconditions."""
