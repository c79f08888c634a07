"""Best dominants q and majorants H of the two exact operators.

For psi_1 with Phi = beta (1 - alpha) B (B = Q for q, B = h for H):

    value = (Phi^s - gamma) / beta,  s = 1/(1 - alpha)

For psi_2 with k = sqrt(gamma beta) and W = (k/beta) tan(k B):

    value = W^s

Every fractional power is continued along each ray from z = 0, where it is
anchored at the principal value that defines a0. Derivatives follow from
Q', Q'' (or h', h'') by the chain rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Tuple

import numpy as np

from .complex_core import (
    DEFAULT_QUAD_TOL,
    BoundaryCurve,
    DiskGrid,
    arctan_c,
    continuous_log_rays,
    num_deriv,
    principal_arg,
    principal_pow,
    quad_unit,
)
from .errors import (
    BranchCollapseError,
    DomainError,
    ExactDomError,
    ParameterValidationError,
    PoleError,
    SingularInputError,
    UnsupportedParametersError,
)
from .integral_op import QEvaluator
from .logger import log
from .models import OperatorId, ParamSet
from .targets import AnalyticTarget

# tan arguments closer than this to pi/2 + m pi are rejected
TAN_POLE_GUARD = 1e-6

# kinds: dominant q or majorant H, per operator
KINDS = ("q1", "H1", "q2", "H2")


@dataclass(frozen=True)
class PsiValue:
    value: complex
    operator_id: OperatorId


@dataclass(frozen=True, eq=False)
class DominantField:
    """q (or H) with its first two derivatives on a DiskGrid.

    ``base_*`` hold Q (or h) and its derivatives on the same points;
    ``branch_flags[j]`` is True when ray ``j`` left the principal strip.
    """

    kind: str
    params: ParamSet
    target: AnalyticTarget
    grid: DiskGrid
    q_vals: np.ndarray
    q_d1_vals: np.ndarray
    q_d2_vals: np.ndarray
    a0: complex
    branch_flags: np.ndarray
    base_vals: np.ndarray
    base_d1: np.ndarray
    base_d2: np.ndarray
    tol: float = DEFAULT_QUAD_TOL

    @property
    def is_majorant(self) -> bool:
        return self.kind.startswith("H")

    @property
    def departed_rays(self) -> List[int]:
        return [int(j) for j in np.flatnonzero(self.branch_flags)]

    @property
    def center_error(self) -> float:
        """|mean of q over the innermost ring - a0| (mean value property)."""
        return float(abs(np.mean(self.q_vals[:, 0]) - self.a0))

    def rebuild(self, grid: DiskGrid) -> "DominantField":
        """Same construction on another grid."""
        return build(self.kind, self.params, self.target, grid, self.tol)


# ---------------------------------------------------------------------------
# a0 and branch tracking
# ---------------------------------------------------------------------------

def _check_tan_poles(arg: np.ndarray) -> None:
    arg = np.asarray(arg, dtype=complex)
    m = np.rint((arg.real - np.pi / 2) / np.pi)
    dist = np.abs(arg - (np.pi / 2 + m * np.pi))
    if np.any(dist < TAN_POLE_GUARD):
        where = complex(arg.ravel()[int(np.argmin(dist))])
        raise PoleError(f"tan argument {where:.6g} is within {TAN_POLE_GUARD:g} of a pole")


def a0_of(params: ParamSet, target: AnalyticTarget) -> complex:
    """Centre value forced on p(0) by h(0) = a and the operator parameters."""
    a = target.center
    s = params.exponent
    if params.operator_id == OperatorId.PSI1:
        base = params.beta * (1.0 - params.alpha) * a
        return (principal_pow(base, s) - params.gamma) / params.beta
    k = params.root_gb
    _check_tan_poles(k * a)
    return principal_pow((k / params.beta) * np.tan(k * a), s)


def _tracked_logs(values: np.ndarray, center: complex) -> Tuple[np.ndarray, np.ndarray]:
    """Continuous logarithm along each ray, started from Log(center) at z = 0."""
    rays = np.concatenate([np.full((values.shape[0], 1), center, dtype=complex), values], axis=1)
    try:
        logs, departed = continuous_log_rays(rays)
    except BranchCollapseError as exc:
        ring = max(exc.index - 1, 0)
        raise BranchCollapseError(exc.ray, ring, f"base of the fractional power vanishes on ray {exc.ray}, ring {ring}") from None
    return logs[:, 1:], departed


def _report_departures(kind: str, departed: np.ndarray) -> None:
    if np.any(departed):
        rays = np.flatnonzero(departed)
        log.warning(
            "%s: %d ray(s) left the principal branch (first: %s); values follow the continuation",
            kind, rays.size, ", ".join(str(j) for j in rays[:8]),
        )


def _assemble(
    kind: str,
    params: ParamSet,
    target: AnalyticTarget,
    grid: DiskGrid,
    base: np.ndarray,
    d1: np.ndarray,
    d2: np.ndarray,
    tol: float,
) -> DominantField:
    s = params.exponent
    beta, gamma = params.beta, params.gamma
    center = target.center

    if params.operator_id == OperatorId.PSI1:
        phi = beta * (1.0 - params.alpha) * base
        logs, departed = _tracked_logs(phi, beta * (1.0 - params.alpha) * center)
        pow_s1 = np.exp((s - 1.0) * logs)
        q = (np.exp(s * logs) - gamma) / beta
        q1 = pow_s1 * d1
        q2 = pow_s1 * ((s - 1.0) * d1**2 / base + d2)
    else:
        k = params.root_gb
        _check_tan_poles(k * base)
        _check_tan_poles(k * center)
        t = np.tan(k * base)
        sec2 = 1.0 + t**2
        w = (k / beta) * t
        logs, departed = _tracked_logs(w, (k / beta) * np.tan(k * center))
        w1 = gamma * sec2 * d1
        w2 = gamma * (2.0 * k * t * sec2 * d1**2 + sec2 * d2)
        q = np.exp(s * logs)
        q1 = s * np.exp((s - 1.0) * logs) * w1
        q2 = s * (s - 1.0) * np.exp((s - 2.0) * logs) * w1**2 + s * np.exp((s - 1.0) * logs) * w2

    _report_departures(kind, departed)
    return DominantField(
        kind=kind,
        params=params,
        target=target,
        grid=grid,
        q_vals=q,
        q_d1_vals=q1,
        q_d2_vals=q2,
        a0=a0_of(params, target),
        branch_flags=departed,
        base_vals=base,
        base_d1=d1,
        base_d2=d2,
        tol=tol,
    )


def _require(params: ParamSet, operator_id: OperatorId) -> None:
    if params.operator_id != operator_id:
        raise ParameterValidationError([f"expected {operator_id.value} parameters, got {params.operator_id.value}"])


def _averaged(params: ParamSet, target: AnalyticTarget, grid: DiskGrid, tol: float):
    return QEvaluator(target, params.n, tol).all_orders(grid.points)


def _target_values(target: AnalyticTarget, grid: DiskGrid):
    z = grid.points
    return target.func(z), target.deriv1(z), target.deriv2(z)


def psi2_screen(params: ParamSet, target: AnalyticTarget, grid: DiskGrid) -> float:
    """max |sqrt(gamma beta) h(z)| on the outermost ring; admissible below pi/2."""
    ring = grid.r_max * np.exp(1j * grid.thetas)
    return float(np.max(np.abs(params.root_gb * target.func(ring))))


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------

def build_q1(params: ParamSet, target: AnalyticTarget, grid: DiskGrid, tol: float = DEFAULT_QUAD_TOL) -> DominantField:
    """Best dominant of psi_1(p, zp') < h: ((beta(1-alpha)Q)^s - gamma)/beta."""
    _require(params, OperatorId.PSI1)
    return _assemble("q1", params, target, grid, *_averaged(params, target, grid, tol), tol)


def build_H1(params: ParamSet, target: AnalyticTarget, grid: DiskGrid, tol: float = DEFAULT_QUAD_TOL) -> DominantField:
    """Majorant of psi_1: ((beta(1-alpha)h)^s - gamma)/beta."""
    _require(params, OperatorId.PSI1)
    return _assemble("H1", params, target, grid, *_target_values(target, grid), tol)


def build_q2(params: ParamSet, target: AnalyticTarget, grid: DiskGrid, tol: float = DEFAULT_QUAD_TOL) -> DominantField:
    """Best dominant of psi_2(p, zp') < h: ((k/beta) tan(k Q))^s."""
    _require(params, OperatorId.PSI2)
    base = _averaged(params, target, grid, tol)
    reach = float(np.max(np.abs(params.root_gb * base[0])))
    if reach >= np.pi / 2:
        raise ParameterValidationError([f"|sqrt(gamma beta) Q| reaches {reach:.6g} >= pi/2 on the grid"])
    return _assemble("q2", params, target, grid, *base, tol)


def build_H2(params: ParamSet, target: AnalyticTarget, grid: DiskGrid, tol: float = DEFAULT_QUAD_TOL) -> DominantField:
    """Majorant of psi_2: ((k/beta) tan(k h))^s."""
    _require(params, OperatorId.PSI2)
    return _assemble("H2", params, target, grid, *_target_values(target, grid), tol)


BUILDERS: Dict[str, Callable[..., DominantField]] = {
    "q1": build_q1,
    "H1": build_H1,
    "q2": build_q2,
    "H2": build_H2,
}


def build(kind: str, params: ParamSet, target: AnalyticTarget, grid: DiskGrid, tol: float = DEFAULT_QUAD_TOL) -> DominantField:
    try:
        builder = BUILDERS[kind]
    except KeyError:
        raise ValueError(f"unknown field kind '{kind}' (expected one of {', '.join(KINDS)})") from None
    return builder(params, target, grid, tol)


def dominant_kind(params: ParamSet, majorant: bool = False) -> str:
    prefix = "H" if majorant else "q"
    return prefix + ("1" if params.operator_id == OperatorId.PSI1 else "2")


def boundary_curve(
    kind: str,
    params: ParamSet,
    target: AnalyticTarget,
    r: float = 0.999,
    n_samples: int = 2048,
    tol: float = DEFAULT_QUAD_TOL,
) -> BoundaryCurve:
    """Image of |z| = r under q or H, branch-tracked along a radial ladder."""
    ladder = DiskGrid.ladder(r, n_samples)
    field = build(kind, params, target, ladder, tol)
    return BoundaryCurve.closing(field.q_vals[:, -1])


# ---------------------------------------------------------------------------
# The operators
# ---------------------------------------------------------------------------

def psi1_values(p, zp, params: ParamSet):
    """(beta p + gamma)^{1-alpha}/(beta(1-alpha)) + zp (beta p + gamma)^{-alpha}, principal powers."""
    base = params.beta * np.asarray(p, dtype=complex) + params.gamma
    if np.any(base == 0):
        raise SingularInputError("beta p + gamma vanishes")
    alpha = params.alpha
    return (
        principal_pow(base, 1.0 - alpha) / (params.beta * (1.0 - alpha))
        + np.asarray(zp, dtype=complex) * principal_pow(base, -alpha)
    )


def psi2_values(p, zp, params: ParamSet):
    """(1/k) arctan((beta/k) p^{1-alpha}) + (1-alpha) zp / (p^alpha (beta p^{2(1-alpha)} + gamma))."""
    p = np.asarray(p, dtype=complex)
    if np.any(p == 0):
        raise SingularInputError("p vanishes")
    alpha, beta, gamma = params.alpha, params.beta, params.gamma
    k = params.root_gb
    if k == 0:
        raise SingularInputError("gamma beta vanishes")
    denom = beta * principal_pow(p, 2.0 * (1.0 - alpha)) + gamma
    if np.any(denom == 0):
        raise SingularInputError("beta p^{2(1-alpha)} + gamma vanishes")
    main = arctan_c((beta / k) * principal_pow(p, 1.0 - alpha)) / k
    return main + (1.0 - alpha) * np.asarray(zp, dtype=complex) / (principal_pow(p, alpha) * denom)


def _psi_values(p, zp, params: ParamSet):
    fn = psi1_values if params.operator_id == OperatorId.PSI1 else psi2_values
    return fn(p, zp, params)


def eval_psi1(p: complex, zp: complex, params: ParamSet) -> PsiValue:
    value = complex(psi1_values(p, zp, params))
    return PsiValue(value=value, operator_id=OperatorId.PSI1)


def eval_psi2(p: complex, zp: complex, params: ParamSet) -> PsiValue:
    value = complex(psi2_values(p, zp, params))
    return PsiValue(value=value, operator_id=OperatorId.PSI2)


# ---------------------------------------------------------------------------
# Exactness
# ---------------------------------------------------------------------------

def _exact_pair(operator_id: OperatorId, params: ParamSet):
    """(M(p), N(z, p)) with dM/dp = dN/dz; M is taken up to a function of z alone."""
    alpha, beta, gamma = params.alpha, params.beta, params.gamma
    if operator_id == OperatorId.PSI1:
        def m_of(p):
            return principal_pow(beta * p + gamma, 1.0 - alpha) / (beta * (1.0 - alpha))

        def n_of(z, p):
            return z / principal_pow(beta * p + gamma, alpha)

        def base_of(p):
            return beta * p + gamma
    else:
        k = params.root_gb

        def m_of(p):
            return arctan_c((beta / k) * principal_pow(p, 1.0 - alpha)) / k

        def n_of(z, p):
            return (1.0 - alpha) * z / (principal_pow(p, alpha) * (beta * principal_pow(p, 2.0 * (1.0 - alpha)) + gamma))

        def base_of(p):
            return p
    return m_of, n_of, base_of


def default_samples(count: int, seed: int = 0) -> List[Tuple[complex, complex]]:
    """(z, p) pairs with |z| <= 0.95 and p in a sector around the positive axis."""
    rng = np.random.default_rng(seed)
    z = np.sqrt(rng.uniform(0.0, 0.95**2, count)) * np.exp(1j * rng.uniform(0.0, 2 * np.pi, count))
    p = rng.uniform(0.3, 1.5, count) * np.exp(1j * rng.uniform(-np.pi / 3, np.pi / 3, count))
    return [(complex(a), complex(b)) for a, b in zip(z, p)]


def exactness_residual(
    operator_id: OperatorId | str,
    params: ParamSet,
    samples: Iterable[Tuple[complex, complex]],
    n_scale: float = 1.0,
) -> float:
    """max |dM/dp - dN/dz| over the samples, both partials by central differences.

    ``n_scale`` multiplies N; any value other than 1 must make the residual
    visible. Samples whose stencil crosses a branch cut or a singularity are
    skipped with a warning.
    """
    op = OperatorId(operator_id)
    m_of, n_of, base_of = _exact_pair(op, params)
    worst = 0.0
    used = 0
    skipped = 0
    for z, p in samples:
        step = 1e-5 * max(1.0, abs(p))
        stencil = base_of(np.array([p - 2 * step, p - step, p, p + step, p + 2 * step], dtype=complex))
        if np.any(np.abs(stencil) < 1e-8) or np.ptp(principal_arg(stencil)) > 1.0:
            skipped += 1
            continue
        try:
            dm = num_deriv(m_of, p, order=1)
            dn = n_scale * num_deriv(lambda zz: n_of(zz, p), z, order=1)
        except ExactDomError as exc:
            log.warning("exactness sample z=%s p=%s skipped: %s", z, p, exc)
            skipped += 1
            continue
        worst = max(worst, abs(complex(dm) - complex(dn)))
        used += 1
    if skipped:
        log.warning("exactness residual: %d sample(s) skipped (stencil left the domain)", skipped)
    if used == 0:
        raise DomainError("every exactness sample left the operator's domain")
    return float(worst)


# ---------------------------------------------------------------------------
# Field checks
# ---------------------------------------------------------------------------

def ode_residual(field: DominantField, target: AnalyticTarget) -> float:
    """max |psi(q, n z q') - h(z)| over the grid."""
    if field.is_majorant:
        raise ValueError("the defining equation holds for the dominant q, not the majorant H")
    z = field.grid.points
    psi = _psi_values(field.q_vals, field.params.n * z * field.q_d1_vals, field.params)
    return float(np.max(np.abs(psi - target.func(z))))


def _segment_integral(target: AnalyticTarget, z: np.ndarray, tol: float) -> np.ndarray:
    """int_0^z h(t) dt along the straight segment."""
    flat = z.ravel()
    value = quad_unit(lambda u: flat[:, None] * target.func(flat[:, None] * u[None, :]), tol)
    return np.asarray(value).reshape(z.shape)


def implicit_relation_residual(field: DominantField) -> float:
    """Residual of the integrated exact equation on the grid (n = 1 only).

    psi_1: z (beta q + gamma)^{1-alpha}/(beta(1-alpha)) - int_0^z h = 0
    psi_2: (z/k) arctan((beta/k) q^{1-alpha}) - int_0^z h = 0
    """
    if field.params.n != 1:
        raise UnsupportedParametersError("the integrated relation is stated for n = 1")
    if field.is_majorant:
        raise ValueError("the integrated relation concerns the dominant q")
    params = field.params
    z = field.grid.points
    m_of, _, _ = _exact_pair(params.operator_id, params)
    lhs = z * m_of(field.q_vals)
    return float(np.max(np.abs(lhs - _segment_integral(field.target, z, field.tol))))


def aux_term(field: DominantField) -> np.ndarray:
    """A(z) (psi_1) or B(z) (psi_2): 1 + zQ''/Q' = 1 + zq''/q' + aux on the grid."""
    if field.is_majorant:
        raise ValueError("auxiliary terms are defined for the dominant q")
    params = field.params
    z = field.grid.points
    base, d1 = field.base_vals, field.base_d1
    alpha = params.alpha
    if params.operator_id == OperatorId.PSI1:
        return (alpha / (alpha - 1.0)) * z * d1 / base
    k = params.root_gb
    t = np.tan(k * base)
    w = (k / params.beta) * t
    w1 = params.gamma * (1.0 + t**2) * d1
    return -(params.exponent - 1.0) * z * w1 / w - 2.0 * k * z * t * d1


def aux_identity_residual(field: DominantField) -> float:
    z = field.grid.points
    lhs = 1.0 + z * field.base_d2 / field.base_d1
    rhs = 1.0 + z * field.q_d2_vals / field.q_d1_vals + aux_term(field)
    return float(np.max(np.abs(lhs - rhs)))


def chain_rule_residual(field: DominantField, ring: Optional[int] = None, step: float = 1e-3) -> Tuple[float, float]:
    """Compare q', q'' with radial finite differences of rebuilt values.

    Values at r +- step, r +- 2 step on every ray of ring ``ring`` are rebuilt
    (branch-tracked through the inner rings) and differenced with fourth
    order stencils. Returns the worst gaps for q' and q''.
    """
    radii = field.grid.r_levels
    i = field.grid.n_r // 2 if ring is None else ring
    r = float(radii[i])
    inner = radii[:i]
    gap = r - (inner[-1] if inner.size else 0.0)
    d = min(step, gap / 4.0, (1.0 - r) / 4.0)
    stencil = np.array([r - 2 * d, r - d, r, r + d, r + 2 * d])
    levels = np.concatenate([inner, stencil])
    local = field.rebuild(DiskGrid(levels, field.grid.n_theta))
    vals = local.q_vals[:, -5:]
    rot = np.exp(1j * field.grid.thetas)
    dr1 = (vals[:, 0] - 8 * vals[:, 1] + 8 * vals[:, 3] - vals[:, 4]) / (12 * d)
    dr2 = (-vals[:, 0] + 16 * vals[:, 1] - 30 * vals[:, 2] + 16 * vals[:, 3] - vals[:, 4]) / (12 * d * d)
    err1 = np.max(np.abs(dr1 - rot * field.q_d1_vals[:, i]))
    err2 = np.max(np.abs(dr2 - rot**2 * field.q_d2_vals[:, i]))
    return float(err1), float(err2)


def closed_form_error(field: DominantField, oracle: Callable[[np.ndarray], np.ndarray], mask: Optional[np.ndarray] = None) -> float:
    """max |q - oracle(z)| over the grid (or the masked part of it)."""
    diff = np.abs(field.q_vals - oracle(field.grid.points))
    if mask is not None:
        diff = diff[mask]
    return float(np.max(diff))
