"""Pydantic records: operator parameters and the reports the CLI emits."""

from __future__ import annotations

import cmath
from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .errors import ParameterValidationError


class OperatorId(str, Enum):
    """Which exact differential operator a run concerns."""

    PSI1 = "psi1"
    PSI2 = "psi2"


class CheckStatus(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    SKIPPED = "skipped"
    INCONCLUSIVE = "inconclusive"


def param_violations(alpha: float, beta: complex, gamma: complex, n: int, operator_id: OperatorId) -> List[str]:
    """Every violated admissibility condition of (alpha, beta, gamma, n)."""
    found = []
    if not (-1.0 <= alpha <= 0.0):
        found.append(f"alpha must lie in [-1, 0] (got {alpha})")
    if beta == 0:
        found.append("beta must be non-zero")
    if int(n) != n or n < 1:
        found.append(f"n must be a positive integer (got {n})")
    if operator_id == OperatorId.PSI2 and gamma == 0:
        found.append("gamma must be non-zero for psi2")
    return found


class ParamSet(BaseModel):
    """(alpha, beta, gamma, n) together with the operator they parametrise."""

    model_config = ConfigDict(frozen=True)

    alpha: float = Field(..., ge=-1.0, le=0.0, description="Exponent parameter alpha in [-1, 0]")
    beta: complex = Field(..., description="Non-zero multiplier beta")
    gamma: complex = Field(0j, description="Shift gamma (non-zero for psi2)")
    n: int = Field(1, ge=1, description="Order of the first non-trivial coefficient")
    operator_id: OperatorId = Field(OperatorId.PSI1)

    @model_validator(mode="after")
    def _check_operator(self) -> "ParamSet":
        if self.beta == 0:
            raise ValueError("beta must be non-zero")
        if self.operator_id == OperatorId.PSI2 and self.gamma == 0:
            raise ValueError("gamma must be non-zero for psi2")
        return self

    @classmethod
    def checked(
        cls,
        alpha: float,
        beta: complex,
        gamma: complex = 0j,
        n: int = 1,
        operator_id: OperatorId | str = OperatorId.PSI1,
    ) -> "ParamSet":
        """Build a ParamSet, reporting every violated condition at once."""
        op = OperatorId(operator_id)
        problems = param_violations(float(alpha), complex(beta), complex(gamma), n, op)
        if problems:
            raise ParameterValidationError(problems)
        return cls(alpha=alpha, beta=beta, gamma=gamma, n=int(n), operator_id=op)

    @property
    def exponent(self) -> float:
        """s = 1/(1 - alpha), the power that turns Q (or h) into q (or H)."""
        return 1.0 / (1.0 - self.alpha)

    @property
    def root_gb(self) -> complex:
        """k = sqrt(gamma beta) on the principal branch."""
        return cmath.sqrt(self.gamma * self.beta)

    def echo(self) -> Dict[str, Any]:
        return {
            "operator": self.operator_id.value,
            "alpha": self.alpha,
            "beta": self.beta,
            "gamma": self.gamma,
            "n": self.n,
        }


class CheckResult(BaseModel):
    """One named verification outcome."""

    name: str
    status: CheckStatus
    value: Optional[float] = None
    threshold: Optional[float] = None
    detail: str = ""

    @classmethod
    def compare(cls, name: str, value: float, threshold: float, below: bool = True, detail: str = "") -> "CheckResult":
        """Pass when ``value < threshold`` (``below``) or ``value > threshold``."""
        ok = value < threshold if below else value > threshold
        return cls(
            name=name,
            status=CheckStatus.PASS if ok else CheckStatus.FAIL,
            value=float(value),
            threshold=float(threshold),
            detail=detail,
        )

    @classmethod
    def flag(cls, name: str, ok: Optional[bool], detail: str = "") -> "CheckResult":
        """Boolean outcome; ``None`` means the check was inconclusive."""
        if ok is None:
            status = CheckStatus.INCONCLUSIVE
        else:
            status = CheckStatus.PASS if ok else CheckStatus.FAIL
        return cls(name=name, status=status, detail=detail)

    @classmethod
    def skipped(cls, name: str, detail: str) -> "CheckResult":
        return cls(name=name, status=CheckStatus.SKIPPED, detail=detail)


class _Report(BaseModel):
    checks: List[CheckResult] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.status in (CheckStatus.PASS, CheckStatus.SKIPPED) for c in self.checks)

    @property
    def failures(self) -> List[CheckResult]:
        return [c for c in self.checks if c.status not in (CheckStatus.PASS, CheckStatus.SKIPPED)]


class Convergence(BaseModel):
    """How a bound constant was obtained."""

    method: str
    terms: Optional[int] = None
    quad_error: Optional[float] = None
    tail: Optional[float] = None


class BoundReport(_Report):
    """Lower-bound constants for one case of the catalog."""

    model_config = ConfigDict(populate_by_name=True)

    case_id: str
    lambda_: float = Field(..., alias="lambda")
    zeta: Optional[float] = None
    xi: Optional[float] = None
    eta: Optional[float] = None
    params: Dict[str, Any] = Field(default_factory=dict)
    convergence: Convergence
    tags: List[str] = Field(default_factory=list)


class DominantReport(_Report):
    """Diagnostics of a built dominant q and majorant H."""

    operator: OperatorId
    target: str
    params: Dict[str, Any] = Field(default_factory=dict)
    a0: complex
    ode_residual: Optional[float] = None
    convexity_margin_q: Optional[float] = None
    convexity_margin_H: Optional[float] = None
    containment: Optional[str] = None
    center_error: Optional[float] = None
    aux_identity_residual: Optional[float] = None
    departed_rays: List[int] = Field(default_factory=list)
    closed_form_error: Optional[float] = None


class SharpnessRow(BaseModel):
    r: float
    min_re_q: float
    argmin_theta: float


class VerificationReport(_Report):
    """Outcome of a verification suite; fields that were not computed stay None."""

    suite: str
    convexity_margin_q: Optional[float] = None
    convexity_margin_H: Optional[float] = None
    chain_ok: Optional[bool] = None
    sharpness_table: List[SharpnessRow] = Field(default_factory=list)
    ode_max_residual: Optional[float] = None
    counterexamples: List[Dict[str, Any]] = Field(default_factory=list)
    details: Dict[str, Any] = Field(default_factory=dict)

    def merge(self, other: "VerificationReport") -> "VerificationReport":
        """Combine two reports of the same suite (mins of margins, all of chains)."""

        def _min(a, b):
            vals = [v for v in (a, b) if v is not None]
            return min(vals) if vals else None

        chain = None
        if self.chain_ok is not None or other.chain_ok is not None:
            chain = all(v for v in (self.chain_ok, other.chain_ok) if v is not None)
        return VerificationReport(
            suite=self.suite,
            convexity_margin_q=_min(self.convexity_margin_q, other.convexity_margin_q),
            convexity_margin_H=_min(self.convexity_margin_H, other.convexity_margin_H),
            chain_ok=chain,
            sharpness_table=self.sharpness_table + other.sharpness_table,
            ode_max_residual=_min_max(self.ode_max_residual, other.ode_max_residual),
            checks=self.checks + other.checks,
            counterexamples=self.counterexamples + other.counterexamples,
            details={**self.details, **other.details},
        )


def _min_max(a: Optional[float], b: Optional[float]) -> Optional[float]:
    vals = [v for v in (a, b) if v is not None]
    return max(vals) if vals else None


class ValidationReport(_Report):
    """Every violated hypothesis of a rejected run."""

    violations: List[str] = Field(default_factory=list)
