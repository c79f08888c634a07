"""Catalog of convex, non-vanishing targets h with analytic derivatives.

Every target is an immutable ``AnalyticTarget``. The five catalog
constructors validate their parameters; user-supplied maps go through
``custom_target``, which refuses a map that fails the self-test.

Users pick a catalog entry by label (``resolve_target("janowski", {...})``),
mirroring how presets are looked up by shortcut name.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from typing import Callable, Dict, Mapping, Optional, Tuple

import numpy as np

from .complex_core import DiskGrid, num_deriv
from .errors import TargetValidationError
from .logger import log

MapFn = Callable[[np.ndarray], np.ndarray]


def _vectorised(fn: MapFn) -> Callable:
    def call(z):
        out = fn(np.asarray(z, dtype=complex))
        return complex(out) if np.ndim(out) == 0 else out
    return call


@dataclass(frozen=True, eq=False)
class AnalyticTarget:
    """A convex target h with h(0) = center and its first two derivatives."""

    label: str
    func: MapFn
    deriv1: MapFn
    deriv2: MapFn
    center: complex
    constraint_note: str = ""
    params: Mapping[str, complex] = field(default_factory=dict)

    def eval(self, z):
        return _vectorised(self.func)(z)

    def d1(self, z):
        return _vectorised(self.deriv1)(z)

    def d2(self, z):
        return _vectorised(self.deriv2)(z)

    def __call__(self, z):
        return self.eval(z)

    def describe(self) -> str:
        args = ", ".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.label}({args})"


# ---------------------------------------------------------------------------
# Catalog constructors
# ---------------------------------------------------------------------------

def make_janowski(A: float, B: float) -> AnalyticTarget:
    """h(z) = (1 + Az)/(1 + Bz) with -1 <= B < A <= 1."""
    A, B = float(A), float(B)
    if not (-1.0 <= B < A <= 1.0):
        raise TargetValidationError([f"janowski requires -1 <= B < A <= 1 (got A={A}, B={B})"])
    diff = A - B
    return AnalyticTarget(
        label="janowski",
        func=lambda z: (1.0 + A * z) / (1.0 + B * z),
        deriv1=lambda z: diff / (1.0 + B * z) ** 2,
        deriv2=lambda z: -2.0 * B * diff / (1.0 + B * z) ** 3,
        center=1.0 + 0j,
        constraint_note="-1 <= B < A <= 1",
        params={"A": A, "B": B},
    )


def make_janowski_reversed(A: float, B: float) -> AnalyticTarget:
    """Janowski map with the parameter order exchanged, -1 <= A < B <= 1.

    Its averaged map Q attains min Re Q at z = +1 instead of z = -1.
    """
    A, B = float(A), float(B)
    if not (-1.0 <= A < B <= 1.0):
        raise TargetValidationError([f"janowski-reversed requires -1 <= A < B <= 1 (got A={A}, B={B})"])
    diff = A - B
    return AnalyticTarget(
        label="janowski-reversed",
        func=lambda z: (1.0 + A * z) / (1.0 + B * z),
        deriv1=lambda z: diff / (1.0 + B * z) ** 2,
        deriv2=lambda z: -2.0 * B * diff / (1.0 + B * z) ** 3,
        center=1.0 + 0j,
        constraint_note="-1 <= A < B <= 1",
        params={"A": A, "B": B},
    )


def make_exp(mu: complex) -> AnalyticTarget:
    """h(z) = exp(mu z), |mu| <= 1."""
    mu = complex(mu)
    if abs(mu) > 1.0:
        raise TargetValidationError([f"exp requires |mu| <= 1 (got |mu|={abs(mu):.6g})"])
    return AnalyticTarget(
        label="exp",
        func=lambda z: np.exp(mu * z),
        deriv1=lambda z: mu * np.exp(mu * z),
        deriv2=lambda z: mu * mu * np.exp(mu * z),
        center=1.0 + 0j,
        constraint_note="|mu| <= 1",
        params={"mu": mu},
    )


def make_sqrt(kappa: float) -> AnalyticTarget:
    """h(z) = sqrt(1 + kappa z) on the principal branch, 0 <= kappa <= 1."""
    kappa = float(kappa)
    if not (0.0 <= kappa <= 1.0):
        raise TargetValidationError([f"sqrt requires 0 <= kappa <= 1 (got kappa={kappa})"])
    return AnalyticTarget(
        label="sqrt",
        func=lambda z: np.sqrt(1.0 + kappa * z),
        deriv1=lambda z: 0.5 * kappa / np.sqrt(1.0 + kappa * z),
        deriv2=lambda z: -0.25 * kappa**2 / (1.0 + kappa * z) ** 1.5,
        center=1.0 + 0j,
        constraint_note="0 <= kappa <= 1",
        params={"kappa": kappa},
    )


def sector_constants(rho1: float, rho2: float) -> Tuple[float, float, complex]:
    """(rho, rho', c) of the sector target: rho = (r1-r2)/(r1+r2), rho' = (r1+r2)/2, c = e^{i rho pi}."""
    rho = (rho1 - rho2) / (rho1 + rho2)
    rho_prime = 0.5 * (rho1 + rho2)
    return rho, rho_prime, cmath.exp(1j * np.pi * rho)


def make_sector(rho1: float, rho2: float) -> AnalyticTarget:
    """h(z) = ((1 + cz)/(1 - z))^{rho'} mapping onto -rho2 pi/2 < arg w < rho1 pi/2.

    The power is the branch with h(0) = 1 continued from the centre:
    rho' (Log(1 + cz) - Log(1 - z)) is analytic in the disk because both
    logarithms have arguments in (-pi/2, pi/2) there.
    """
    rho1, rho2 = float(rho1), float(rho2)
    if not (0.0 < rho1 <= 1.0 and 0.0 < rho2 <= 1.0):
        raise TargetValidationError([f"sector requires 0 < rho1, rho2 <= 1 (got {rho1}, {rho2})"])
    _, rp, c = sector_constants(rho1, rho2)

    def log_base(z):
        return np.log(1.0 + c * z) - np.log(1.0 - z)

    def func(z):
        return np.exp(rp * log_base(z))

    def deriv1(z):
        return func(z) * rp * (c / (1.0 + c * z) + 1.0 / (1.0 - z))

    def deriv2(z):
        g = rp * (c / (1.0 + c * z) + 1.0 / (1.0 - z))
        dg = rp * (-(c**2) / (1.0 + c * z) ** 2 + 1.0 / (1.0 - z) ** 2)
        return func(z) * (g * g + dg)

    return AnalyticTarget(
        label="sector",
        func=func,
        deriv1=deriv1,
        deriv2=deriv2,
        center=1.0 + 0j,
        constraint_note="0 < rho1, rho2 <= 1",
        params={"rho1": rho1, "rho2": rho2},
    )


def make_shifted_halfplane(x0: float, r0: Optional[float] = None) -> AnalyticTarget:
    """h(z) = (x0 + z)/(x0 - z), x0 > 1 (x0 = 2 is the (2+z)/(2-z) example).

    ``r0`` is accepted for forward compatibility and ignored.
    """
    x0 = float(x0)
    if x0 <= 1.0:
        raise TargetValidationError([f"shifted-halfplane requires x0 > 1 (got x0={x0})"])
    if r0 is not None:
        log.warning("shifted-halfplane: r0=%s is reserved and ignored", r0)
    return AnalyticTarget(
        label="shifted-halfplane",
        func=lambda z: (x0 + z) / (x0 - z),
        deriv1=lambda z: 2.0 * x0 / (x0 - z) ** 2,
        deriv2=lambda z: 4.0 * x0 / (x0 - z) ** 3,
        center=1.0 + 0j,
        constraint_note="x0 > 1",
        params={"x0": x0},
    )


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TargetPreset:
    """Catalog entry: constructor plus default parameters."""

    name: str
    factory: Callable[..., AnalyticTarget]
    defaults: Dict[str, complex]
    description: str


CATALOG: Dict[str, TargetPreset] = {
    "janowski": TargetPreset(
        name="janowski",
        factory=make_janowski,
        defaults={"A": 1.0, "B": -1.0},
        description="(1+Az)/(1+Bz), -1 <= B < A <= 1",
    ),
    "exp": TargetPreset(
        name="exp",
        factory=make_exp,
        defaults={"mu": 1.0},
        description="exp(mu z), |mu| <= 1",
    ),
    "sqrt": TargetPreset(
        name="sqrt",
        factory=make_sqrt,
        defaults={"kappa": 1.0},
        description="sqrt(1 + kappa z), 0 <= kappa <= 1",
    ),
    "sector": TargetPreset(
        name="sector",
        factory=make_sector,
        defaults={"rho1": 1.0, "rho2": 0.5},
        description="((1+cz)/(1-z))^rho', sector -rho2 pi/2 < arg < rho1 pi/2",
    ),
    "shifted-halfplane": TargetPreset(
        name="shifted-halfplane",
        factory=make_shifted_halfplane,
        defaults={"x0": 2.0},
        description="(x0+z)/(x0-z), x0 > 1",
    ),
    "janowski-reversed": TargetPreset(
        name="janowski-reversed",
        factory=make_janowski_reversed,
        defaults={"A": 0.0, "B": 1.0},
        description="(1+Az)/(1+Bz) with -1 <= A < B <= 1 (minimum at z = +1)",
    ),
}


def resolve_target(label: str, params: Optional[Mapping[str, complex]] = None) -> AnalyticTarget:
    """Build a catalog target from its label and (partial) parameters.

    Missing parameters take the preset defaults; unknown labels or parameter
    names raise ``TargetValidationError`` naming what is available.
    """
    key = (label or "").strip().lower()
    preset = CATALOG.get(key)
    if preset is None:
        available = ", ".join(sorted(CATALOG))
        raise TargetValidationError([f"unknown target '{label}'. Available targets: {available}"])
    merged = dict(preset.defaults)
    for name, value in (params or {}).items():
        if name not in preset.defaults:
            allowed = ", ".join(preset.defaults)
            raise TargetValidationError([f"target '{key}' has no parameter '{name}' (expects {allowed})"])
        merged[name] = value
    if key != "exp":
        for name, value in merged.items():
            if complex(value).imag != 0:
                raise TargetValidationError([f"target '{key}' parameter {name} must be real"])
            merged[name] = complex(value).real
    return preset.factory(**merged)


# ---------------------------------------------------------------------------
# Numeric screens
# ---------------------------------------------------------------------------

def min_modulus(target: AnalyticTarget, grid: DiskGrid) -> float:
    return float(np.min(np.abs(target.func(grid.points))))


def target_convexity_margin(target: AnalyticTarget, grid: DiskGrid) -> float:
    """min over the grid of Re(1 + z h''/h')."""
    z = grid.points
    d1 = target.deriv1(z)
    if np.any(np.abs(d1) == 0):
        return float("-inf")
    return float(np.min(np.real(1.0 + z * target.deriv2(z) / d1)))


def derivative_mismatch(target: AnalyticTarget, grid: DiskGrid, samples: int = 100, seed: int = 0) -> Tuple[float, float]:
    """Largest relative gap between the analytic derivatives and ``num_deriv``."""
    rng = np.random.default_rng(seed)
    pts = grid.points.ravel()
    z = pts[rng.choice(pts.size, size=min(samples, pts.size), replace=False)]
    d1_num = num_deriv(target.func, z, order=1)
    d2_num = num_deriv(target.func, z, order=2)
    d1 = target.deriv1(z)
    d2 = target.deriv2(z)
    err1 = np.max(np.abs(d1 - d1_num) / np.maximum(1.0, np.abs(d1)))
    err2 = np.max(np.abs(d2 - d2_num) / np.maximum(1.0, np.abs(d2)))
    return float(err1), float(err2)


@dataclass(frozen=True)
class SelfTestReport:
    min_modulus: float
    convexity_margin: float
    d1_mismatch: float
    d2_mismatch: float
    center_error: float

    def violations(self, d1_tol: float = 1e-7, d2_tol: float = 1e-6) -> list:
        found = []
        if self.min_modulus <= 0.0:
            found.append("target vanishes on the grid")
        if not self.convexity_margin > 0.0:
            found.append(f"convexity margin {self.convexity_margin:.3e} is not positive")
        if self.d1_mismatch > d1_tol:
            found.append(f"first derivative disagrees with finite differences ({self.d1_mismatch:.3e})")
        if self.d2_mismatch > d2_tol:
            found.append(f"second derivative disagrees with finite differences ({self.d2_mismatch:.3e})")
        if self.center_error != 0.0:
            found.append(f"center differs from h(0) by {self.center_error:.3e}")
        return found


def self_test(target: AnalyticTarget, grid: DiskGrid) -> SelfTestReport:
    """Numeric screen of the convex-target hypotheses on ``grid``."""
    err1, err2 = derivative_mismatch(target, grid)
    return SelfTestReport(
        min_modulus=min_modulus(target, grid),
        convexity_margin=target_convexity_margin(target, grid),
        d1_mismatch=err1,
        d2_mismatch=err2,
        center_error=float(abs(complex(target.eval(0.0)) - target.center)),
    )


def custom_target(label: str, func: MapFn, deriv1: MapFn, deriv2: MapFn, grid: DiskGrid) -> AnalyticTarget:
    """Admit a user-supplied map after it passes the self-test on ``grid``."""
    center = complex(np.asarray(func(np.asarray(0j))))
    target = AnalyticTarget(
        label=label,
        func=func,
        deriv1=deriv1,
        deriv2=deriv2,
        center=center,
        constraint_note="custom target (self-tested)",
    )
    problems = self_test(target, grid).violations()
    if problems:
        raise TargetValidationError([f"{label}: {p}" for p in problems])
    log.info("Custom target '%s' passed its self-test (center=%s)", label, center)
    return target
