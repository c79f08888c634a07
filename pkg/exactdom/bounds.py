"""Hypergeometric evaluation and the sharp lower-bound constants.

lambda_i is min Re Q on the closed disk, attained at z = -1 for the catalog
targets with real parameters (z = +1 for the reversed Janowski map):

    case 1   2F1(1, 1/n; 1+1/n; B) - A/(n+1) 2F1(1, 1+1/n; 2+1/n; B)
    case 1r  2F1(1, 1/n; 1+1/n; -B) + A/(n+1) 2F1(1, 1+1/n; 2+1/n; -B)
    case 2   1F1(1/n; 1/n+1; -mu)
    case 3   2F1(-1/2, 1/n; 1+1/n; kappa)
    case 4   sum_k C(rho', k) (-c)^k 2F1(rho', 1/n+k; 1+1/n+k; -1)/(1+nk)

zeta (psi_1) and xi (psi_2) push lambda through the dominant's formula.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional

import numpy as np

from .complex_core import principal_pow, quad_unit, quad_unit_detailed
from .errors import (
    DomainError,
    NonConvergenceError,
    ParameterValidationError,
    PoleError,
    RangeError,
    UnsupportedParametersError,
)
from .integral_op import q_boundary_value
from .logger import log
from .models import BoundReport, CheckResult, Convergence, OperatorId
from .targets import AnalyticTarget, sector_constants

SERIES_RTOL = 1e-15
SERIES_CAP = 1_000_000
# Gauss series is used strictly inside this radius, the Euler integral outside
EULER_SWITCH = 1.0 - 1e-6
LAMBDA4_TERM_TOL = 1e-12
LAMBDA4_CAP = 500
LAMBDA4_REMAINDER_TAG = "series cap reached; exact remainder integral added"
HYP1F1_MAX_ARG = 700.0

# Lanczos approximation, g = 7, nine coefficients
_LANCZOS_G = 7
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

CASE_TARGETS = {
    "1": "janowski",
    "1r": "janowski-reversed",
    "2": "exp",
    "3": "sqrt",
    "4": "sector",
}


@dataclass(frozen=True)
class SpecialValue:
    """A special-function value with how it was obtained."""

    value: complex
    method: str
    terms: Optional[int] = None
    error: Optional[float] = None


@dataclass
class LambdaResult:
    value: float
    convergence: Convergence
    tags: List[str] = field(default_factory=list)
    imag: float = 0.0


# ---------------------------------------------------------------------------
# Gamma
# ---------------------------------------------------------------------------

def gamma_lanczos(x: float) -> float:
    """Gamma(x) for real x that is not a non-positive integer."""
    x = float(x)
    if x <= 0 and x == int(x):
        raise PoleError(f"Gamma has a pole at {x:g}")
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * gamma_lanczos(1.0 - x))
    return math.exp(log_gamma_lanczos(x))


def log_gamma_lanczos(x: float) -> float:
    """ln Gamma(x) for x >= 1/2."""
    if x < 0.5:
        raise DomainError(f"log-gamma is evaluated for x >= 1/2 only (got {x:g})")
    x -= 1.0
    acc = _LANCZOS_COEF[0]
    for i, coef in enumerate(_LANCZOS_COEF[1:], start=1):
        acc += coef / (x + i)
    t = x + _LANCZOS_G + 0.5
    return 0.5 * math.log(2.0 * math.pi) + (x + 0.5) * math.log(t) - t + math.log(acc)


def _beta_scale(b: float, c: float) -> float:
    """Gamma(c)/(Gamma(b) Gamma(c - b)) for c > b > 0."""
    if min(b, c - b) >= 0.5:
        return math.exp(log_gamma_lanczos(c) - log_gamma_lanczos(b) - log_gamma_lanczos(c - b))
    return gamma_lanczos(c) / (gamma_lanczos(b) * gamma_lanczos(c - b))


# ---------------------------------------------------------------------------
# Gauss hypergeometric 2F1
# ---------------------------------------------------------------------------

def _non_positive_integer(v: float) -> bool:
    return v <= 0 and float(v) == int(v)


def hyp2f1_series(a: float, b: float, c: float, x: complex) -> SpecialValue:
    """Gauss series, stopped once |term| < 1e-15 |sum| (at most 10^6 terms)."""
    total = 1.0 + 0j
    term = 1.0 + 0j
    for k in range(SERIES_CAP):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * x
        total += term
        if term == 0 or abs(term) < SERIES_RTOL * abs(total):
            return SpecialValue(total, "series", terms=k + 2, error=abs(term))
    raise NonConvergenceError(
        f"2F1({a:g}, {b:g}; {c:g}; {x}) series did not settle in {SERIES_CAP} terms",
        estimate=abs(term),
        partial=total,
    )


def _exponent_power(exponent: float) -> int:
    """Power q of the endpoint substitution so that w^{q*exponent - 1} is C^3."""
    return max(1, math.ceil(4.0 / exponent))


def hyp2f1_euler(a: float, b: float, c: float, x: float, tol: float = 1e-14) -> SpecialValue:
    """Euler integral Gamma(c)/(Gamma(b)Gamma(c-b)) int_0^1 t^{b-1}(1-t)^{c-b-1}(1-xt)^{-a} dt.

    Split at t = 1/2; t = w^p/2 on the left and 1 - t = w^q/2 on the right
    absorb the endpoint powers so the adaptive rule sees smooth integrands.
    """
    if not c > b > 0:
        if c > a > 0:
            a, b = b, a
        else:
            raise UnsupportedParametersError(f"Euler integral needs c > b > 0 (got a={a}, b={b}, c={c})")
    at_one = x == 1.0
    sigma = c - a - b if at_one else c - b
    if sigma <= 0:
        raise DomainError(f"2F1 diverges at x = 1 when c - a - b <= 0 (got {sigma:g})")
    p = _exponent_power(b)
    q = _exponent_power(sigma)

    def left(w: np.ndarray) -> np.ndarray:
        t = 0.5 * w**p
        return (p / 2.0**b) * w ** (p * b - 1.0) * (1.0 - t) ** (c - b - 1.0) * (1.0 - x * t) ** (-a)

    def right(w: np.ndarray) -> np.ndarray:
        s = 0.5 * w**q
        t = 1.0 - s
        jac = (q / 2.0**sigma) * w ** (q * sigma - 1.0)
        if at_one:
            return t ** (b - 1.0) * jac
        return t ** (b - 1.0) * jac * (1.0 - x * t) ** (-a)

    lpart = quad_unit_detailed(left, tol)
    rpart = quad_unit_detailed(right, tol)
    scale = _beta_scale(b, c)
    value = scale * (complex(lpart.value) + complex(rpart.value))
    return SpecialValue(value, "euler", terms=lpart.panels + rpart.panels, error=abs(scale) * (lpart.error + rpart.error))


def hyp2f1_detailed(a: float, b: float, c: float, x: float) -> SpecialValue:
    """2F1(a, b; c; x) for real x in [-1, 1] with the method recorded."""
    if _non_positive_integer(c):
        raise DomainError(f"2F1 is undefined for c = {c:g}")
    if abs(x) > 1.0:
        raise DomainError(f"2F1 argument {x} is outside [-1, 1]")
    if x == 0:
        return SpecialValue(1.0 + 0j, "series", terms=1, error=0.0)
    if _non_positive_integer(a) or _non_positive_integer(b):
        return hyp2f1_series(a, b, c, x)
    if x == 1.0 and c - a - b <= 0:
        raise DomainError(f"2F1 diverges at x = 1 when c - a - b <= 0 (got {c - a - b:g})")
    if x == -1.0 and c - a - b <= -1:
        raise DomainError(f"2F1 diverges at x = -1 when c - a - b <= -1 (got {c - a - b:g})")
    if abs(x) < EULER_SWITCH and _series_terms_needed(x) <= SERIES_CAP:
        return hyp2f1_series(a, b, c, x)
    try:
        return hyp2f1_euler(a, b, c, x)
    except UnsupportedParametersError:
        if abs(x) < EULER_SWITCH:
            return hyp2f1_series(a, b, c, x)
        raise


def _series_terms_needed(x: float) -> float:
    """Rough count of Gauss-series terms before |x|^k drops below the stopping ratio."""
    return math.log(SERIES_RTOL) / math.log(abs(x))


def hyp2f1(a: float, b: float, c: float, x: float) -> float:
    return float(hyp2f1_detailed(a, b, c, x).value.real)


# ---------------------------------------------------------------------------
# Confluent 1F1
# ---------------------------------------------------------------------------

def hyp1f1_detailed(a: float, b: float, x: complex) -> SpecialValue:
    """Kummer series; for real negative x the transformation e^x 1F1(b-a; b; -x) avoids cancellation."""
    if _non_positive_integer(b):
        raise DomainError(f"1F1 is undefined for b = {b:g}")
    x = complex(x)
    if abs(x) > HYP1F1_MAX_ARG:
        raise RangeError(f"1F1 argument |x| = {abs(x):g} exceeds {HYP1F1_MAX_ARG:g}")
    if x == 0:
        return SpecialValue(1.0 + 0j, "series", terms=1, error=0.0)
    if x.imag == 0 and x.real < 0 and not _non_positive_integer(a):
        inner = hyp1f1_detailed(b - a, b, -x)
        return SpecialValue(math.exp(x.real) * inner.value, "kummer", terms=inner.terms, error=inner.error)
    total = 1.0 + 0j
    term = 1.0 + 0j
    for k in range(SERIES_CAP):
        term *= (a + k) / ((b + k) * (k + 1.0)) * x
        total += term
        if term == 0 or abs(term) < SERIES_RTOL * abs(total):
            return SpecialValue(total, "series", terms=k + 2, error=abs(term))
    raise NonConvergenceError(f"1F1({a:g}; {b:g}; {x}) series did not settle", estimate=abs(term), partial=total)


def hyp1f1(a: float, b: float, x: complex):
    value = hyp1f1_detailed(a, b, x).value
    return value.real if complex(x).imag == 0 else value


# ---------------------------------------------------------------------------
# lambda_1 ... lambda_4
# ---------------------------------------------------------------------------

def binomial(rho: complex, k: int) -> complex:
    """Generalised binomial coefficient rho(rho-1)...(rho-k+1)/k!."""
    out = 1.0
    for j in range(k):
        out *= (rho - j) / (j + 1.0)
    return out


def _janowski_lambda(A: float, B: float, n: int, reversed_: bool) -> LambdaResult:
    x = -B if reversed_ else B
    f1 = hyp2f1_detailed(1.0, 1.0 / n, 1.0 + 1.0 / n, x)
    f2 = hyp2f1_detailed(1.0, 1.0 + 1.0 / n, 2.0 + 1.0 / n, x)
    sign = 1.0 if reversed_ else -1.0
    value = f1.value.real + sign * A / (n + 1.0) * f2.value.real
    terms = (f1.terms or 0) + (f2.terms or 0)
    err = (f1.error or 0.0) + (f2.error or 0.0)
    return LambdaResult(value, Convergence(method=f"{f1.method}/{f2.method}", terms=terms, quad_error=err))


def lambda4_coefficients(rho_prime: float, c: complex, count: int) -> np.ndarray:
    """C(rho', k)(-c)^k for k < count."""
    return np.array([binomial(rho_prime, k) * (-c) ** k for k in range(count)], dtype=complex)


def _lambda4_term(coef: complex, rho_prime: float, n: int, k: int) -> complex:
    if coef == 0:
        return 0j
    f = hyp2f1_detailed(rho_prime, 1.0 / n + k, 1.0 + 1.0 / n + k, -1.0)
    return coef * f.value / (1.0 + n * k)


def lambda4_partial_sums(rho1: float, rho2: float, n: int, count: int) -> np.ndarray:
    """S_0, ..., S_{count-1} of the lambda_4 series."""
    _, rp, c = sector_constants(rho1, rho2)
    coefs = lambda4_coefficients(rp, c, count)
    terms = np.array([_lambda4_term(coefs[k], rp, n, k) for k in range(count)])
    return np.cumsum(terms)


def lambda4_remainder(rho1: float, rho2: float, n: int, terms: int, tol: float = 1e-13) -> SpecialValue:
    """Exact tail after ``terms`` series terms, as one integral over u in [0, 1].

    int_0^1 (1 + u^n)^{-rho'} [(1 - c u^n)^{rho'} - sum_{k<terms} C(rho', k)(-c u^n)^k] du,
    with u = 1 - v^4 near the endpoint where (1 - c u^n) may vanish.
    """
    _, rp, c = sector_constants(rho1, rho2)
    coefs = lambda4_coefficients(rp, c, terms)

    def integrand(v: np.ndarray) -> np.ndarray:
        u = 1.0 - v**4
        t = u**n
        head = np.polynomial.polynomial.polyval(t, coefs)
        full = np.exp(rp * np.log(1.0 - c * t))
        return (1.0 + t) ** (-rp) * (full - head) * 4.0 * v**3

    result = quad_unit_detailed(integrand, tol)
    return SpecialValue(complex(result.value), "remainder", terms=result.panels, error=result.error)


def _lambda4(rho1: float, rho2: float, n: int, tail: str) -> LambdaResult:
    _, rp, c = sector_constants(rho1, rho2)
    coefs = lambda4_coefficients(rp, c, LAMBDA4_CAP + 1)
    total = 0j
    for k in range(LAMBDA4_CAP + 1):
        term = _lambda4_term(coefs[k], rp, n, k)
        total += term
        if k > 0 and abs(term) <= LAMBDA4_TERM_TOL:
            conv = Convergence(method="series", terms=k + 1, tail=abs(term))
            return LambdaResult(total.real, conv, imag=total.imag)
    if tail == "strict":
        raise NonConvergenceError(
            f"lambda_4 series did not reach |term| <= {LAMBDA4_TERM_TOL:g} in {LAMBDA4_CAP} terms",
            estimate=abs(term),
            partial=total,
        )
    remainder = lambda4_remainder(rho1, rho2, n, LAMBDA4_CAP + 1)
    log.debug("lambda_4: series capped at %d terms, remainder %s", LAMBDA4_CAP, remainder.value)
    total += remainder.value
    conv = Convergence(method="series+remainder", terms=LAMBDA4_CAP + 1, quad_error=remainder.error, tail=abs(remainder.value))
    return LambdaResult(total.real, conv, [LAMBDA4_REMAINDER_TAG], imag=total.imag)


def _require_real(name: str, value: complex) -> float:
    value = complex(value)
    if value.imag != 0:
        raise ParameterValidationError([f"{name} must be real for this bound"])
    return value.real


def lambda_i(case_id: str, case_params: Mapping[str, complex], n: int = 1, tail: str = "remainder") -> LambdaResult:
    """lambda for one catalog case; ``tail`` is "remainder" or "strict" (case 4 only)."""
    case_id = str(case_id)
    if n < 1 or int(n) != n:
        raise ParameterValidationError([f"n must be a positive integer (got {n})"])
    if tail not in ("remainder", "strict"):
        raise ParameterValidationError([f"lambda4_tail must be 'remainder' or 'strict' (got {tail})"])
    p = dict(case_params)
    if case_id in ("1", "1r"):
        A, B = _require_real("A", p["A"]), _require_real("B", p["B"])
        ok = -1.0 <= A < B <= 1.0 if case_id == "1r" else -1.0 <= B < A <= 1.0
        if not ok:
            order = "-1 <= A < B <= 1" if case_id == "1r" else "-1 <= B < A <= 1"
            raise ParameterValidationError([f"case {case_id} requires {order} (got A={A}, B={B})"])
        return _janowski_lambda(A, B, n, reversed_=case_id == "1r")
    if case_id == "2":
        mu = complex(p["mu"])
        if abs(mu) > 1.0:
            raise ParameterValidationError([f"case 2 requires |mu| <= 1 (got {abs(mu):.6g})"])
        val = hyp1f1_detailed(1.0 / n, 1.0 / n + 1.0, -mu)
        tags = []
        if not (mu.imag == 0 and 0.0 < mu.real <= 1.0):
            tags.append("min-location unverified")
        return LambdaResult(val.value.real, Convergence(method=val.method, terms=val.terms, tail=val.error), tags, imag=val.value.imag)
    if case_id == "3":
        kappa = _require_real("kappa", p["kappa"])
        if not 0.0 <= kappa <= 1.0:
            raise ParameterValidationError([f"case 3 requires 0 <= kappa <= 1 (got {kappa})"])
        val = hyp2f1_detailed(-0.5, 1.0 / n, 1.0 + 1.0 / n, kappa)
        return LambdaResult(val.value.real, Convergence(method=val.method, terms=val.terms, quad_error=val.error))
    if case_id == "4":
        rho1, rho2 = _require_real("rho1", p["rho1"]), _require_real("rho2", p["rho2"])
        if not (0.0 < rho1 <= 1.0 and 0.0 < rho2 <= 1.0):
            raise ParameterValidationError([f"case 4 requires 0 < rho1, rho2 <= 1 (got {rho1}, {rho2})"])
        result = _lambda4(rho1, rho2, n, tail)
        if abs(result.imag) >= 1e-9:
            result.tags.append("complex-valued Q(-1); min-location unverified")
        return result
    raise ParameterValidationError([f"unknown bound case '{case_id}' (expected one of {', '.join(CASE_TARGETS)})"])


def extremal_point(case_id: str) -> complex:
    """Where min Re Q sits on the closed disk for the case."""
    return 1.0 + 0j if str(case_id) == "1r" else -1.0 + 0j


def q_extremal_oracle(target: AnalyticTarget, n: int, case_id: str = "1") -> complex:
    """Direct quadrature int_0^1 h(z* u^n) du at the extremal boundary point z*."""
    value, _ = q_boundary_value(target, n, extremal_point(case_id))
    return value


# ---------------------------------------------------------------------------
# zeta, xi, eta
# ---------------------------------------------------------------------------

def _positive_beta(beta: complex) -> float:
    beta = complex(beta)
    if beta.imag != 0 or beta.real <= 0:
        raise ParameterValidationError([f"the bound formulas need real beta > 0 (got {beta})"])
    return beta.real


def zeta_bound(alpha: float, beta: complex, gamma: complex, lam: float) -> float:
    """Re(((beta(1-alpha) lambda)^{1/(1-alpha)} - gamma)/beta)."""
    b = _positive_beta(beta)
    s = 1.0 / (1.0 - alpha)
    return float((complex(principal_pow(b * (1.0 - alpha) * lam, s)) - complex(gamma)).real / b)


def xi_bound(alpha: float, beta: complex, gamma: complex, lam: float) -> float:
    """Re (sqrt(gamma/beta) tan(sqrt(gamma beta) lambda))^{1/(1-alpha)}."""
    b = _positive_beta(beta)
    gamma = complex(gamma)
    if gamma == 0:
        raise ParameterValidationError(["xi needs gamma != 0"])
    k = complex(np.sqrt(gamma * b))
    arg = k * lam
    if abs(arg) >= math.pi / 2:
        raise DomainError(f"|sqrt(gamma beta) lambda| = {abs(arg):.6g} >= pi/2")
    if abs(abs(arg) - math.pi / 2) < 1e-6:
        raise PoleError("tan argument is within 1e-6 of pi/2")
    return float(complex(principal_pow((k / b) * np.tan(arg), 1.0 / (1.0 - alpha))).real)


def beta_one(tol: float = 1e-13) -> float:
    """int_0^1 dt/(1+t), checked against ln 2."""
    value = float(complex(quad_unit(lambda t: 1.0 / (1.0 + t), tol)).real)
    if abs(value - math.log(2.0)) > 1e-12:
        raise NonConvergenceError("beta(1) quadrature disagrees with ln 2", estimate=abs(value - math.log(2.0)))
    return value


def eta_miller_mocanu(a: float) -> float:
    """sqrt(2(1 - a) beta(1) + 2a - 1), the lower bound of Re sqrt(f(z)/z)."""
    a = float(a)
    if not 0.0 <= a < 1.0:
        raise ParameterValidationError([f"eta needs 0 <= a < 1 (got {a})"])
    radicand = 2.0 * (1.0 - a) * beta_one() + 2.0 * a - 1.0
    if radicand < 0:
        raise DomainError(f"eta radicand {radicand:.6g} is negative")
    return math.sqrt(radicand)


def eta_via_reversed_janowski(a: float) -> float:
    """The same constant from the reversed Janowski bound with A = 2a - 1, B = 1, n = 1."""
    lam = lambda_i("1r", {"A": 2.0 * a - 1.0, "B": 1.0}, n=1).value
    # p^2 + 2zpp' < h is psi_1(alpha=-1, beta=1, gamma=0) < h/2, whose lambda is lam/2
    return zeta_bound(-1.0, 1.0, 0.0, lam / 2.0)


# ---------------------------------------------------------------------------
# Report
# ---------------------------------------------------------------------------

def bound_report(
    case_id: str,
    case_params: Mapping[str, complex],
    target: AnalyticTarget,
    n: int,
    operator_id: OperatorId,
    alpha: float,
    beta: complex,
    gamma: complex,
    tail: str = "remainder",
) -> BoundReport:
    """lambda with zeta (psi_1) or xi (psi_2) and the Q(z*) quadrature oracle check."""
    result = lambda_i(case_id, case_params, n, tail)
    checks = []
    oracle = q_extremal_oracle(target, n, case_id)
    checks.append(CheckResult.compare(
        "lambda_matches_quadrature", abs(result.value - oracle.real), 1e-9,
        detail=f"Q({extremal_point(case_id).real:+g}) by direct quadrature = {oracle.real:.15g}",
    ))
    if str(case_id) == "4" and result.convergence.method == "series+remainder":
        checks.append(CheckResult.compare("lambda4_tail_error", result.convergence.quad_error or 0.0, 1e-10))
    zeta = xi = None
    if operator_id == OperatorId.PSI1:
        zeta = zeta_bound(alpha, beta, gamma, result.value)
    else:
        xi = xi_bound(alpha, beta, gamma, result.value)
    params: Dict[str, object] = {
        "case": dict(case_params),
        "n": n,
        "operator": operator_id.value,
        "alpha": alpha,
        "beta": complex(beta),
        "gamma": complex(gamma),
    }
    eta = None
    if str(case_id) == "1r" and result.value >= 0:
        eta = math.sqrt(result.value)
    return BoundReport(
        case_id=str(case_id),
        lambda_=result.value,
        zeta=zeta,
        xi=xi,
        eta=eta,
        params=params,
        convergence=result.convergence,
        tags=result.tags,
        checks=checks,
    )
