"""Exception hierarchy for the bccblasso package."""


class BccbLassoError(Exception):
    """Base class for all package-specific errors."""


class InvalidArgumentError(BccbLassoError, ValueError):
    """An argument violates a documented precondition."""


class DomainError(BccbLassoError, ValueError):
    """A mathematically valid-looking input lies outside the operation's domain."""


class MemoryBudgetError(BccbLassoError):
    """A dense materialization would exceed the configured memory budget."""

    def __init__(self, required_bytes: int, budget_bytes: int, what: str = "dense matrix"):
        self.required_bytes = int(required_bytes)
        self.budget_bytes = int(budget_bytes)
        super().__init__(
            f"{what} needs {self.required_bytes} bytes, "
            f"exceeding the configured budget of {self.budget_bytes} bytes"
        )


class SingularOperatorError(BccbLassoError):
    """Attempted inversion of a (numerically) singular operator."""

    def __init__(self, min_abs_eigenvalue: float, threshold: float):
        self.min_abs_eigenvalue = float(min_abs_eigenvalue)
        self.threshold = float(threshold)
        super().__init__(
            f"operator is numerically singular: min |eigenvalue| = "
            f"{self.min_abs_eigenvalue:.6e} is below the guard threshold {self.threshold:.6e}"
        )


class ConvergenceError(BccbLassoError):
    """An iterative estimator failed to converge within its iteration cap."""

    def __init__(self, message: str, last_estimate: float):
        self.last_estimate = float(last_estimate)
        super().__init__(f"{message} (last estimate: {self.last_estimate:.6e})")


class DivergenceError(BccbLassoError):
    """A solver iterate became non-finite."""

    def __init__(self, iteration: int):
        self.iteration = int(iteration)
        super().__init__(f"solver iterate became non-finite at iteration {self.iteration}")


class ZeroReferenceError(BccbLassoError, ZeroDivisionError):
    """A relative quantity was requested against a zero-norm reference."""


class ConfigError(BccbLassoError):
    """A configuration file is missing a field or holds an invalid value."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"config field '{field}': {message}")
