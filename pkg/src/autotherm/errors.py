"""Exception types used across the package."""


class AutothermError(Exception):
    """Base class for all package errors."""


class LayoutError(AutothermError):
    """Subsystem labels or dimensions are inconsistent with an operation."""


class ParameterError(AutothermError):
    """A numeric parameter is outside its admissible range."""


class ContractError(AutothermError):
    """An input violates a numerical precondition (e.g. not Hermitian)."""


class ScenarioError(AutothermError):
    """A scenario is structurally or physically invalid."""


class ScenarioParseError(AutothermError):
    """A scenario file could not be parsed."""


class DomainError(AutothermError):
    """A special-function argument leaves the supported domain."""


class QuadratureError(AutothermError):
    """Adaptive quadrature failed to converge within the depth limit.

    Carries the partial result and the error estimate accumulated so far.
    """

    def __init__(self, message: str, partial: float, error_estimate: float):
        super().__init__(message)
        self.partial = partial
        self.error_estimate = error_estimate
