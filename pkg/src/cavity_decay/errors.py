"""Exception hierarchy for cavity-decay."""


class CavityDecayError(Exception):
    """Base class for every error raised by this package."""


class DomainError(CavityDecayError, ValueError):
    """An argument lies outside the domain of the operation."""


class SpecialFunctionOverflow(CavityDecayError, OverflowError):
    """A special function was asked for a value it cannot represent."""


class ConvergenceError(CavityDecayError, ArithmeticError):
    """A truncated series hit its order cap before reaching the tolerance."""

    def __init__(self, message: str, *, residual: float, order: int) -> None:
        super().__init__(f"{message} (order={order}, residual={residual:.3e})")
        self.residual = residual
        self.order = order


class ModelEvaluationError(CavityDecayError):
    """Evaluating the rates at one sweep node failed."""

    def __init__(self, omega: float, cause: Exception) -> None:
        super().__init__(f"Evaluation failed at omega={omega!r}: {cause}")
        self.omega = omega
