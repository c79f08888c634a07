"""Exception hierarchy for exactdom.

Two families matter to callers: ``HypothesisViolation`` (a theorem hypothesis or
constructor precondition does not hold, CLI exit 2) and ``NumericFailure``
(the numerics broke down on admissible input, CLI exit 3).
"""

from __future__ import annotations

from typing import Iterable, List, Optional


class ExactDomError(Exception):
    """Root of every error raised by exactdom."""


# ---------------------------------------------------------------------------
# Hypothesis / validation failures
# ---------------------------------------------------------------------------

class HypothesisViolation(ExactDomError, ValueError):
    """One or more theorem hypotheses are violated."""

    def __init__(self, violations: Iterable[str]):
        self.violations: List[str] = [str(v) for v in violations]
        super().__init__("; ".join(self.violations) or "hypothesis violated")


class TargetValidationError(HypothesisViolation):
    """A target constructor received parameters outside its admissible range."""


class ParameterValidationError(HypothesisViolation):
    """A (alpha, beta, gamma, n) set is not admissible for its operator."""


class ConfigFileError(HypothesisViolation):
    """The file named by ``--config`` does not exist."""


# ---------------------------------------------------------------------------
# Numeric failures
# ---------------------------------------------------------------------------

class NumericFailure(ExactDomError):
    """The computation could not be completed on the given input."""


class DomainError(NumericFailure, ValueError):
    """Input outside the domain of a function (zero base, negative radicand, ...)."""


class PoleError(DomainError):
    """Evaluation at (or too close to) a pole."""


class SingularInputError(DomainError):
    """A denominator of the operator vanishes at the given (p, zp')."""


class RangeError(DomainError):
    """Argument magnitude outside the range the evaluator supports."""


class UnsupportedParametersError(NumericFailure):
    """No evaluation method applies to the requested parameters."""


class BranchCollapseError(NumericFailure):
    """A tracked power hit zero, so its branch is undefined."""

    def __init__(self, ray: Optional[int], index: int, message: str = ""):
        self.ray = ray
        self.index = index
        where = f"ray {ray}, index {index}" if ray is not None else f"index {index}"
        super().__init__(message or f"branch collapse (zero base) at {where}")


class NonConvergenceError(NumericFailure):
    """An iterative method stopped before meeting its tolerance."""

    def __init__(self, message: str, estimate: float = float("nan"), partial: object = None):
        self.estimate = estimate
        self.partial = partial
        super().__init__(f"{message} (error estimate {estimate:.3e})")


class StiffnessError(NumericFailure):
    """The radial ODE stepper rejected steps below its minimum step size."""

    def __init__(self, ray: int, radius: float):
        self.ray = ray
        self.radius = radius
        super().__init__(f"step size underflow on ray {ray} at r={radius:.6g}")


class IndeterminateMembershipError(NumericFailure):
    """A point lies too close to a boundary curve to decide membership."""

    def __init__(self, point: complex, distance: float):
        self.point = point
        self.distance = distance
        super().__init__(f"point {point:.6g} is {distance:.3e} from the curve")


class NonUnivalenceSuspectError(NumericFailure):
    """The derivative of a map vanishes on the grid."""

    def __init__(self, location: complex):
        self.location = location
        super().__init__(f"derivative vanishes near z={location:.6g}")
