"""The averaging operator Q(z) = 1/(n z^{1/n}) * int_0^z h(t) t^{1/n - 1} dt.

With t = u^n z the prefactor cancels the Jacobian and Q(z) = int_0^1 h(u^n z) du,
which has no singular factor left; the derivatives are taken under the integral sign.
Every call is batched: a whole grid is integrated in one adaptive pass.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .complex_core import DEFAULT_QUAD_TOL, _as_result, quad_unit, quad_unit_detailed
from .errors import DomainError, ParameterValidationError
from .targets import AnalyticTarget

# u = 1 - v^4 smooths power-type endpoint behaviour of h on |z| = 1
_BOUNDARY_POWER = 4


@dataclass(frozen=True)
class QEvaluator:
    """Q, Q' and Q'' of one target for a fixed n."""

    target: AnalyticTarget
    n: int = 1
    tol: float = DEFAULT_QUAD_TOL

    def __post_init__(self) -> None:
        problems = []
        if int(self.n) != self.n or self.n < 1:
            problems.append(f"n must be a positive integer (got {self.n})")
        if not self.tol > 0:
            problems.append(f"quadrature tolerance must be positive (got {self.tol})")
        if problems:
            raise ParameterValidationError(problems)

    def _average(self, fn: Callable[[np.ndarray], np.ndarray], z, weight_power: int):
        z = np.asarray(z, dtype=complex)
        if np.any(np.abs(z) >= 1.0):
            raise DomainError("Q is evaluated inside the unit disk only (|z| < 1)")
        flat = z.ravel()
        n = self.n

        def integrand(u: np.ndarray) -> np.ndarray:
            un = u**n
            return fn(flat[:, None] * un[None, :]) * un[None, :] ** weight_power

        value = np.asarray(quad_unit(integrand, self.tol)).reshape(z.shape)
        return _as_result(value)

    def q_value(self, z):
        """Q(z) = int_0^1 h(u^n z) du; Q(0) = h(0)."""
        return self._average(self.target.func, z, 0)

    def q_d1(self, z):
        """Q'(z) = int_0^1 h'(u^n z) u^n du."""
        return self._average(self.target.deriv1, z, 1)

    def q_d2(self, z):
        """Q''(z) = int_0^1 h''(u^n z) u^{2n} du."""
        return self._average(self.target.deriv2, z, 2)

    def all_orders(self, z):
        """(Q, Q', Q'') on the same points."""
        return self.q_value(z), self.q_d1(z), self.q_d2(z)


def q_value(e: QEvaluator, z):
    return e.q_value(z)


def q_d1(e: QEvaluator, z):
    return e.q_d1(z)


def q_d2(e: QEvaluator, z):
    return e.q_d2(z)


def q_boundary_value(target: AnalyticTarget, n: int, z: complex = -1.0, tol: float = 1e-13):
    """Q(z) for |z| = 1 where h has a finite limit along [0, z].

    Returns ``(value, error_estimate)``. The substitution u = 1 - v^4 keeps
    integrands like sqrt(1 - u) smooth enough for the adaptive rule.
    """
    z = complex(z)
    m = _BOUNDARY_POWER

    def integrand(v: np.ndarray) -> np.ndarray:
        u = 1.0 - v**m
        return target.func(z * u**n) * m * v ** (m - 1)

    result = quad_unit_detailed(integrand, tol)
    return complex(result.value), result.error
