"""Grid verification of the geometric conclusions.

Convexity and univalence margins, winding-number containment (subordination
for univalent outer maps), sharpness scans of min Re q on circles, and a
radial RK4 harness that manufactures solutions p of psi(p, zp') = h(w(z)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .bounds import eta_miller_mocanu
from .complex_core import (
    DEFAULT_QUAD_TOL,
    BoundaryCurve,
    DiskGrid,
    arctan_c,
    principal_pow,
    winding_numbers,
)
from .dominants import DominantField, a0_of, boundary_curve
from .errors import (
    IndeterminateMembershipError,
    NonUnivalenceSuspectError,
    ParameterValidationError,
    SingularInputError,
    StiffnessError,
)
from .integral_op import QEvaluator
from .logger import log
from .models import CheckResult, CheckStatus, OperatorId, ParamSet, SharpnessRow, VerificationReport
from .targets import AnalyticTarget, make_janowski, target_convexity_margin

BOUNDARY_RADIUS = 0.999
INTERIOR_RADIUS = 0.95
BOUND_SLACK = 1e-3

ODE_START = 1e-4
ODE_STEP = 1e-3
ODE_MIN_STEP = 1e-7
ODE_TOL = 1e-10

SCHWARZ_MAX_C = 0.7


# ---------------------------------------------------------------------------
# Schwarz functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SchwarzMap:
    """w(z) = amplitude e^{i theta} z^order (z + c)/(1 + conj(c) z), |c| < 1."""

    theta: float
    c: complex
    order: int = 1
    amplitude: float = 1.0

    def __post_init__(self) -> None:
        problems = []
        if not abs(self.c) < 1.0:
            problems.append(f"Schwarz map needs |c| < 1 (got {abs(self.c):.6g})")
        if self.order < 1:
            problems.append("Schwarz map order must be >= 1")
        if not 0.0 <= self.amplitude <= 1.0:
            problems.append("Schwarz map amplitude must lie in [0, 1]")
        if problems:
            raise ParameterValidationError(problems)

    @classmethod
    def random(cls, rng: np.random.Generator, order: int = 1) -> "SchwarzMap":
        """theta uniform on [0, 2 pi), c uniform on |c| <= 0.7."""
        theta = float(rng.uniform(0.0, 2.0 * np.pi))
        radius = SCHWARZ_MAX_C * math.sqrt(float(rng.uniform()))
        c = radius * complex(np.exp(1j * rng.uniform(0.0, 2.0 * np.pi)))
        return cls(theta, c, order)

    @classmethod
    def squared(cls) -> "SchwarzMap":
        """w(z) = z^2."""
        return cls(0.0, 0j)

    @classmethod
    def vanishing(cls) -> "SchwarzMap":
        """w = 0."""
        return cls(0.0, 0j, amplitude=0.0)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        rot = self.amplitude * np.exp(1j * self.theta)
        return rot * z**self.order * (z + self.c) / (1.0 + np.conj(self.c) * z)

    def max_on_circle(self, r: float = BOUNDARY_RADIUS, samples: int = 2048) -> float:
        theta = 2.0 * np.pi * np.arange(samples) / samples
        return float(np.max(np.abs(self(r * np.exp(1j * theta)))))

    def describe(self) -> Dict[str, object]:
        return {"theta": self.theta, "c": self.c, "order": self.order, "amplitude": self.amplitude}


# ---------------------------------------------------------------------------
# Margins
# ---------------------------------------------------------------------------

def convexity_margin_of(points: np.ndarray, d1: np.ndarray, d2: np.ndarray) -> float:
    """min Re(1 + z f''/f'); a vanishing f' raises NonUnivalenceSuspectError."""
    d1 = np.asarray(d1, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(d1))))
    small = np.abs(d1) <= 1e-14 * scale
    if np.any(small):
        raise NonUnivalenceSuspectError(complex(np.asarray(points)[small].ravel()[0]))
    return float(np.min(np.real(1.0 + np.asarray(points) * np.asarray(d2) / d1)))


def convexity_margin(field: DominantField) -> float:
    return convexity_margin_of(field.grid.points, field.q_d1_vals, field.q_d2_vals)


def univalence_margin_of(points: np.ndarray, d1: np.ndarray, d2: np.ndarray, alpha_thresh: float) -> bool:
    """True iff min Re(1 + z f''/f') > alpha_thresh, for alpha_thresh in [-1/2, 0]."""
    if not -0.5 <= alpha_thresh <= 0.0:
        raise ParameterValidationError([f"univalence threshold must lie in [-1/2, 0] (got {alpha_thresh})"])
    return convexity_margin_of(points, d1, d2) > alpha_thresh


def univalence_margin(field: DominantField, alpha_thresh: float = 0.0) -> bool:
    return univalence_margin_of(field.grid.points, field.q_d1_vals, field.q_d2_vals, alpha_thresh)


# ---------------------------------------------------------------------------
# Containment
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ContainmentResult:
    status: CheckStatus
    checked: int = 0
    outside: int = 0
    detail: str = ""

    @property
    def ok(self) -> Optional[bool]:
        if self.status == CheckStatus.INCONCLUSIVE:
            return None
        return self.status == CheckStatus.PASS

    def as_check(self, name: str) -> CheckResult:
        return CheckResult(name=name, status=self.status, value=float(self.outside), threshold=0.0, detail=self.detail)


MapLike = Union[DominantField, "ManufacturedP", AnalyticTarget, Callable[[np.ndarray], np.ndarray]]


def _inner_values(inner: MapLike, r_inner: float, grid: Optional[DiskGrid]) -> Tuple[np.ndarray, complex]:
    if isinstance(inner, DominantField):
        mask = inner.grid.interior_mask(r_inner)
        return inner.q_vals[mask], inner.a0
    if isinstance(inner, ManufacturedP):
        mask = inner.grid.interior_mask(r_inner)
        return inner.p_vals[mask], inner.a0
    if grid is None:
        raise ValueError("a grid is needed to sample a plain map")
    pts = grid.points[grid.interior_mask(r_inner)]
    if isinstance(inner, AnalyticTarget):
        return np.asarray(inner.func(pts)), inner.center
    return np.asarray(inner(pts)), complex(np.asarray(inner(np.asarray([0j])))[0])


def _outer_curve(outer: MapLike, r_outer: float, n_samples: int, tol: float) -> Tuple[BoundaryCurve, complex, float]:
    """Boundary image, centre value and convexity margin of the outer map."""
    if isinstance(outer, DominantField):
        curve = boundary_curve(outer.kind, outer.params, outer.target, r_outer, n_samples, tol)
        return curve, outer.a0, convexity_margin(outer)
    if isinstance(outer, AnalyticTarget):
        curve = BoundaryCurve.from_map(outer.func, r_outer, n_samples)
        ring = DiskGrid.ladder(r_outer, 64, rungs=8)
        return curve, outer.center, target_convexity_margin(outer, ring)
    raise TypeError("the outer map must be a DominantField or an AnalyticTarget")


def containment(
    inner: MapLike,
    outer: Union[DominantField, AnalyticTarget],
    r_inner: float = INTERIOR_RADIUS,
    r_outer: float = BOUNDARY_RADIUS,
    grid: Optional[DiskGrid] = None,
    n_samples: int = 2048,
    tol: float = DEFAULT_QUAD_TOL,
    curve: Optional[BoundaryCurve] = None,
) -> ContainmentResult:
    """Is inner(|z| <= r_inner) inside the image of |z| < r_outer under ``outer``?

    Every sampled inner value must have winding number 1 with respect to the
    outer boundary image. A point too close to that curve makes the verdict
    inconclusive. ``curve`` reuses a precomputed outer boundary.
    """
    values, inner_center = _inner_values(inner, r_inner, grid)
    outer_curve, outer_center, margin = _outer_curve(outer, r_outer, n_samples, tol) if curve is None else (curve, _center_of(outer), None)
    if abs(inner_center - outer_center) > 1e-8:
        return ContainmentResult(CheckStatus.FAIL, detail=f"centres differ: {inner_center:.6g} vs {outer_center:.6g}")
    if margin is not None and not margin > -0.5:
        return ContainmentResult(CheckStatus.INCONCLUSIVE, detail=f"outer map not shown univalent (margin {margin:.3e})")
    try:
        winds = winding_numbers(outer_curve, values)
    except IndeterminateMembershipError as exc:
        return ContainmentResult(CheckStatus.INCONCLUSIVE, checked=values.size, detail=str(exc))
    outside = int(np.count_nonzero(winds != 1))
    status = CheckStatus.PASS if outside == 0 else CheckStatus.FAIL
    return ContainmentResult(status, checked=int(values.size), outside=outside)


def _center_of(outer: Union[DominantField, AnalyticTarget]) -> complex:
    return outer.a0 if isinstance(outer, DominantField) else outer.center


# ---------------------------------------------------------------------------
# Sharpness
# ---------------------------------------------------------------------------

def sharpness_scan(field: DominantField, radii: Sequence[float], n_theta: Optional[int] = None) -> List[SharpnessRow]:
    """min over the circle |z| = r of Re q, for each r, with the minimising angle.

    The angular count is even so theta = pi is always sampled; values on the
    requested circles are branch-tracked through a radial ladder.
    """
    radii = np.asarray(sorted(float(r) for r in radii))
    if radii.size == 0 or radii[-1] >= 1.0 or radii[0] <= 0.0:
        raise ValueError("sharpness radii must lie in (0, 1)")
    count = n_theta or max(field.grid.n_theta, 256)
    count += count % 2
    ladder = np.linspace(radii[-1] / 24.0, radii[-1], 24)
    levels = np.union1d(ladder, radii)
    scan = field.rebuild(DiskGrid(levels, count))
    thetas = scan.grid.thetas
    rows = []
    for r in radii:
        col = int(np.argmin(np.abs(levels - r)))
        re_q = np.real(scan.q_vals[:, col])
        j = int(np.argmin(re_q))
        rows.append(SharpnessRow(r=float(r), min_re_q=float(re_q[j]), argmin_theta=float(thetas[j])))
    return rows


def scan_is_monotone(rows: Sequence[SharpnessRow], slack: float = 1e-12) -> bool:
    values = [row.min_re_q for row in rows]
    return all(b <= a + slack for a, b in zip(values, values[1:]))


# ---------------------------------------------------------------------------
# Manufactured solutions
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ManufacturedP:
    """p on a grid with psi(p, zp') = h(w(z)) imposed along every ray."""

    operator_id: OperatorId
    params: ParamSet
    target: AnalyticTarget
    omega: SchwarzMap
    grid: DiskGrid
    a0: complex
    p_vals: np.ndarray
    zp_vals: np.ndarray
    f_vals: Optional[np.ndarray]
    residual: float
    error_estimate: float


def _zp_of(operator_id: OperatorId, params: ParamSet, p: np.ndarray, hw: np.ndarray) -> np.ndarray:
    """zp' solved from psi(p, zp') = hw."""
    alpha, beta, gamma = params.alpha, params.beta, params.gamma
    if operator_id == OperatorId.PSI1:
        base = beta * p + gamma
        if np.any(base == 0):
            raise SingularInputError("beta p + gamma reached 0 while integrating")
        return principal_pow(base, alpha) * (hw - principal_pow(base, 1.0 - alpha) / (beta * (1.0 - alpha)))
    if np.any(p == 0):
        raise SingularInputError("p reached 0 while integrating")
    k = params.root_gb
    denom = beta * principal_pow(p, 2.0 * (1.0 - alpha)) + gamma
    if np.any(denom == 0):
        raise SingularInputError("beta p^{2(1-alpha)} + gamma reached 0 while integrating")
    main = arctan_c((beta / k) * principal_pow(p, 1.0 - alpha)) / k
    return (hw - main) * principal_pow(p, alpha) * denom / (1.0 - alpha)


def _psi_of(operator_id: OperatorId, params: ParamSet, p: np.ndarray, zp: np.ndarray) -> np.ndarray:
    from .dominants import psi1_values, psi2_values

    fn = psi1_values if operator_id == OperatorId.PSI1 else psi2_values
    return np.asarray(fn(p, zp, params))


def _rk4(deriv: Callable, r: float, y: np.ndarray, h: float) -> np.ndarray:
    k1 = deriv(r, y)
    k2 = deriv(r + 0.5 * h, y + 0.5 * h * k1)
    k3 = deriv(r + 0.5 * h, y + 0.5 * h * k2)
    k4 = deriv(r + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _check_radii(levels: np.ndarray) -> Tuple[List[int], float]:
    """Rings that get a stencil residual check, and the stencil half-width."""
    rings = sorted({levels.size // 2, levels.size - 1})
    gaps = np.diff(np.concatenate([[ODE_START], levels]))
    d = min(1e-3, float(np.min(gaps)) / 4.0, (1.0 - levels[-1]) / 4.0)
    return rings, d


def ode_solve_p(
    operator_id: OperatorId | str,
    params: ParamSet,
    target: AnalyticTarget,
    w: SchwarzMap,
    grid: DiskGrid,
    with_primitive: bool = False,
) -> ManufacturedP:
    """Integrate z p' = F(z, p) outward along every ray of ``grid``.

    F solves psi(p, zp') = h(w(z)) for zp'. Each ray starts at r = 1e-4 with
    p = a0 and advances with classical RK4 in r (dp/dr = F/r); every step is
    checked by step doubling and halved while the estimate exceeds 1e-10 per
    unit r. With ``with_primitive`` the radial primitive f(z) = int_0^z p is
    carried along as well.
    """
    op = OperatorId(operator_id)
    if params.operator_id != op:
        raise ParameterValidationError([f"expected {op.value} parameters, got {params.operator_id.value}"])
    a0 = a0_of(params, target)
    rot = np.exp(1j * grid.thetas)
    levels = grid.r_levels
    if levels[0] <= ODE_START:
        raise ParameterValidationError([f"grid radii must exceed the start radius {ODE_START:g}"])
    rings, d = _check_radii(levels)
    stencils = {i: levels[i] + d * np.arange(-2, 3) for i in rings}
    stops = np.unique(np.concatenate([levels] + list(stencils.values())))

    def deriv(r: float, y: np.ndarray) -> np.ndarray:
        z = r * rot
        zp = _zp_of(op, params, y[0], target.func(w(z)))
        return np.stack([zp / r, rot * y[0]])

    y = np.stack([np.full(grid.n_theta, a0, dtype=complex), ODE_START * rot * a0])
    r = ODE_START
    h = ODE_STEP
    saved: Dict[float, np.ndarray] = {}
    error_total = 0.0
    for stop in stops:
        while r < stop - 1e-15:
            step = min(h, stop - r)
            full = _rk4(deriv, r, y, step)
            half = _rk4(deriv, r + 0.5 * step, _rk4(deriv, r, y, 0.5 * step), 0.5 * step)
            err = np.max(np.abs(half - full), axis=0) / 15.0
            worst = float(np.max(err))
            if worst > ODE_TOL * step:
                h = 0.5 * step
                if h < ODE_MIN_STEP:
                    raise StiffnessError(int(np.argmax(err)), r)
                continue
            y = half
            r = r + step if stop - (r + step) > 1e-15 else float(stop)
            error_total += worst
            if worst < ODE_TOL * step / 32.0:
                h = min(2.0 * h, ODE_STEP)
        saved[float(stop)] = y.copy()

    p_vals = np.stack([saved[float(r_i)][0] for r_i in levels], axis=1)
    f_vals = np.stack([saved[float(r_i)][1] for r_i in levels], axis=1) if with_primitive else None
    z = grid.points
    zp_vals = _zp_of(op, params, p_vals, target.func(w(z)))

    residual = 0.0
    for i, radii in stencils.items():
        vals = np.stack([saved[float(x)][0] for x in radii], axis=1)
        dpdr = (vals[:, 0] - 8 * vals[:, 1] + 8 * vals[:, 3] - vals[:, 4]) / (12 * d)
        zp_fd = levels[i] * dpdr
        psi = _psi_of(op, params, vals[:, 2], zp_fd)
        residual = max(residual, float(np.max(np.abs(psi - target.func(w(levels[i] * rot))))))

    if residual > 1e-6:
        log.warning("manufactured p: self-residual %.3e exceeds 1e-6 (run invalid)", residual)
    return ManufacturedP(
        operator_id=op,
        params=params,
        target=target,
        omega=w,
        grid=grid,
        a0=a0,
        p_vals=p_vals,
        zp_vals=zp_vals,
        f_vals=f_vals,
        residual=residual,
        error_estimate=error_total,
    )


# ---------------------------------------------------------------------------
# Univalence application
# ---------------------------------------------------------------------------

def _univalence_checks(sol: ManufacturedP, floor: float, eta: float) -> List[Tuple[str, float, float, complex]]:
    """(check, min value, threshold, location) for the three conclusions."""
    z = sol.grid.points
    ratio = sol.f_vals / z
    out = []
    for name, values, threshold in (
        ("re_f_prime", np.real(sol.p_vals), floor),
        ("re_f_over_z", np.real(ratio), floor),
        ("re_sqrt_f_over_z", np.real(np.sqrt(ratio)), eta - BOUND_SLACK),
    ):
        j = np.unravel_index(int(np.argmin(values)), values.shape)
        out.append((name, float(values[j]), threshold, complex(z[j])))
    return out


def verify_univalence_application(
    samples: int,
    seed: int = 0,
    grid: Optional[DiskGrid] = None,
    maps: Optional[Sequence[SchwarzMap]] = None,
) -> VerificationReport:
    """f with Re(f' + z f'') > 0 is manufactured from random Schwarz maps and checked.

    With h = (1+z)/(1-z) and psi_1(alpha=0, beta=1, gamma=0), p = f' solves
    p + zp' = h(w(z)). Each f must satisfy Re f' > 2 ln 2 - 1, Re f/z > 2 ln 2 - 1
    and Re sqrt(f/z) > eta(2 ln 2 - 1), all with slack 1e-3.
    """
    if samples < 1:
        raise ParameterValidationError(["samples must be >= 1"])
    grid = grid or DiskGrid.uniform(INTERIOR_RADIUS, 32, 128)
    params = ParamSet.checked(0.0, 1.0, 0.0, 1, OperatorId.PSI1)
    target = make_janowski(1.0, -1.0)
    bound = 2.0 * math.log(2.0) - 1.0
    floor = bound - BOUND_SLACK
    eta = eta_miller_mocanu(bound)
    rng = np.random.default_rng(seed)
    maps = list(maps) if maps is not None else [SchwarzMap.random(rng) for _ in range(samples)]

    counterexamples = []
    worst: Dict[str, float] = {}
    max_residual = 0.0
    for omega in maps:
        sol = ode_solve_p(OperatorId.PSI1, params, target, omega, grid, with_primitive=True)
        max_residual = max(max_residual, sol.residual)
        hypothesis = float(np.min(np.real(sol.p_vals + sol.zp_vals)))
        worst["re_f_prime_plus_zf2"] = min(worst.get("re_f_prime_plus_zf2", math.inf), hypothesis)
        for name, value, threshold, where in _univalence_checks(sol, floor, eta):
            worst[name] = min(worst.get(name, math.inf), value)
            if not value > threshold:
                counterexamples.append({"omega": omega.describe(), "z": where, "check": name, "value": value})
    checks = [
        CheckResult.compare("re_f_prime_plus_zf2", worst["re_f_prime_plus_zf2"], 0.0, below=False),
        CheckResult.compare("re_f_prime", worst["re_f_prime"], floor, below=False),
        CheckResult.compare("re_f_over_z", worst["re_f_over_z"], floor, below=False),
        CheckResult.compare("re_sqrt_f_over_z", worst["re_sqrt_f_over_z"], eta - BOUND_SLACK, below=False),
        CheckResult.compare("ode_self_residual", max_residual, 1e-6),
        CheckResult.skipped("convexity_margins", "not part of the univalence application"),
    ]
    log.info("univalence application: %d map(s), %d counterexample(s)", len(maps), len(counterexamples))
    return VerificationReport(
        suite="univalence",
        ode_max_residual=max_residual,
        checks=checks,
        counterexamples=counterexamples,
        details={"samples": len(maps), "eta": eta, "bound": bound},
    )


# ---------------------------------------------------------------------------
# Outer-normal (admissibility) check
# ---------------------------------------------------------------------------

def outer_normal_check(
    target: AnalyticTarget,
    n: int = 1,
    r: float = BOUNDARY_RADIUS,
    multipliers: Sequence[int] = (1, 2, 4),
    n_samples: int = 2048,
    tol: float = DEFAULT_QUAD_TOL,
) -> ContainmentResult:
    """Q(zeta) + (m/n)(h(zeta) - Q(zeta)) lies outside h(|z| < r) for |zeta| = r, m > n.

    m = n gives h(zeta) itself, a point of the curve, so only m > n are tested.
    """
    ms = [m for m in multipliers if m > n]
    if not ms:
        return ContainmentResult(CheckStatus.SKIPPED, detail="no multiplier exceeds n")
    theta = 2.0 * np.pi * np.arange(n_samples) / n_samples
    zeta = r * np.exp(1j * theta)
    h_vals = target.func(zeta)
    q_vals = np.asarray(QEvaluator(target, n, tol).q_value(zeta))
    curve = BoundaryCurve.closing(h_vals)
    points = np.concatenate([q_vals + (m / n) * (h_vals - q_vals) for m in ms])
    try:
        winds = winding_numbers(curve, points)
    except IndeterminateMembershipError as exc:
        return ContainmentResult(CheckStatus.INCONCLUSIVE, checked=points.size, detail=str(exc))
    inside = int(np.count_nonzero(winds != 0))
    status = CheckStatus.PASS if inside == 0 else CheckStatus.FAIL
    return ContainmentResult(status, checked=int(points.size), outside=inside, detail=f"multipliers {ms}")
