"""Exception types shared across the library."""

from __future__ import annotations


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class DivergenceError(ValueError):
    """The requested quantity is infinite under the infinite-plane model.

    Raised for the interference tail integral at path loss exponents n <= 2,
    where the mean interference from an unbounded Poisson field diverges.
    Callers should switch to the noise-limited form or to Monte Carlo over
    a finite window.
    """


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to converge to the requested tolerance.

    Carries the best available estimate so callers can decide whether the
    degraded accuracy is acceptable.
    """

    def __init__(self, message: str, best_estimate: float, error_bound: float):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.error_bound = error_bound
