"""Exception types shared across the engines."""


class EmptyExclusionError(ValueError):
    """Exclusion order statistic requested over a single-element list."""


class UnsupportedSizeError(ValueError):
    """Relay count exceeds what the subset-enumeration engines can evaluate.

    The analytic and quadrature engines enumerate 2^N - 1 eavesdropper
    subsets; they are capped at N = 8. The Monte Carlo engine has no cap.
    """


class ConvergenceError(RuntimeError):
    """Adaptive quadrature could not reach the requested tolerance.

    Carries the best available estimate and its error bound.
    """

    def __init__(self, message, estimate, error_bound):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


class SlopeUndefinedError(ArithmeticError):
    """Outage probability underflowed to zero; the log-log slope is undefined."""
