"""
Error types shared by every module.

Each error may carry an ``anchor``: the constraint or identity that was
violated, so CLI messages and failed reports can name it.
"""
from typing import Any, Optional


class CritNLSError(Exception):
    """Base class for all toolkit errors."""

    def __init__(self, message: str, anchor: Optional[str] = None):
        super().__init__(message)
        self.anchor = anchor

    def __str__(self) -> str:
        msg = super().__str__()
        if self.anchor:
            return f"{msg} [{self.anchor}]"
        return msg


class ParamError(CritNLSError):
    """Physical parameters violate an admissibility constraint."""


class ConfigError(CritNLSError):
    """Config file could not be parsed or validated."""


class DomainError(CritNLSError):
    """Argument outside the domain of a map or evaluator (usually the origin)."""


class GridError(CritNLSError):
    """Bad discretization bounds, sizes or mismatched lengths."""


class StepError(CritNLSError):
    """Finite-difference stencil would reach the origin."""


class NonFinite(CritNLSError):
    """Field contains NaN or Inf."""


class ZeroDenominator(CritNLSError):
    """Quotient denominator vanishes."""


class BadEndpoint(CritNLSError):
    """Mountain-pass endpoint does not have negative energy."""


class BadPermutation(CritNLSError):
    """Axis map is not a signed permutation of the lattice axes."""


class NotConverged(CritNLSError):
    """Input solution is not a converged critical point."""


class NoConvergence(CritNLSError):
    """Iterative solver stopped with its gradient norm above tolerance."""

    def __init__(self, message: str, partial: Any = None, anchor: Optional[str] = None):
        super().__init__(message, anchor=anchor)
        self.partial = partial
