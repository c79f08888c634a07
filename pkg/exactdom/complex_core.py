"""Branch-aware complex kernel shared by every other module.

Holds the disk discretisation (``DiskGrid``), sampled boundary images
(``BoundaryCurve``), principal and ray-continued powers, the complex arctan,
finite-difference derivatives, adaptive Gauss-Legendre quadrature on [0, 1]
and argument-sum winding numbers.

Branch convention: ``Log`` is the principal logarithm with
``Im Log w`` in (-pi, pi]. The only place a non-principal branch is produced
is ``continuous_pow_along_ray`` / ``continuous_log_rays``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple, Union

import numpy as np

from .errors import (
    BranchCollapseError,
    DomainError,
    IndeterminateMembershipError,
    NonConvergenceError,
    PoleError,
)

ComplexValue = complex
ArrayLike = Union[complex, float, np.ndarray]

# Gauss-Legendre panel used by quad_unit
GL_ORDER = 15
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(GL_ORDER)

DEFAULT_QUAD_TOL = 1e-12
MAX_QUAD_DEPTH = 40
# Panel disagreement below this multiple of the integral of |f| is round-off, not truncation
QUAD_ROUNDOFF = 1e-14
# A panel whose gap stops shrinking under bisection is noise-limited; accepted below this multiple
QUAD_NOISE_FLOOR = 1e-10
# Bisection that shrinks the gap by less than this factor counts as stalled
QUAD_STALL_RATIO = 8.0

# Finite-difference steps (scaled by max(1, |z|))
FIRST_DERIVATIVE_STEP = 1e-5
SECOND_DERIVATIVE_STEP = 1e-3

MIN_BOUNDARY_SAMPLES = 256
WINDING_PROXIMITY = 1e-6

# Points x samples evaluated per winding-number chunk
_WINDING_CHUNK = 2_000_000


# ---------------------------------------------------------------------------
# Grids and curves
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DiskGrid:
    """Radial x angular lattice on |z| <= r_max.

    ``points[j, i] = r_levels[i] * exp(1j * thetas[j])``: row ``j`` is ray ``j``
    ordered outward from the centre.
    """

    r_levels: np.ndarray
    n_theta: int
    r_max: float = field(init=False)

    def __post_init__(self) -> None:
        radii = np.asarray(self.r_levels, dtype=float)
        if radii.ndim != 1 or radii.size == 0:
            raise ValueError("r_levels must be a non-empty 1-D sequence")
        if np.any(radii <= 0.0):
            raise ValueError("r_levels must be positive")
        if np.any(np.diff(radii) <= 0.0):
            raise ValueError("r_levels must be strictly ascending")
        if radii[-1] >= 1.0:
            raise ValueError(f"r_max must be < 1 (got {radii[-1]})")
        if self.n_theta < 1:
            raise ValueError("n_theta must be positive")
        radii.setflags(write=False)
        object.__setattr__(self, "r_levels", radii)
        object.__setattr__(self, "r_max", float(radii[-1]))

    @classmethod
    def uniform(cls, r_max: float, rings: int, thetas: int) -> "DiskGrid":
        """Evenly spaced rings r_max/rings, 2 r_max/rings, ..., r_max."""
        if rings < 1:
            raise ValueError("rings must be positive")
        return cls(np.linspace(r_max / rings, r_max, rings), thetas)

    @classmethod
    def ladder(cls, r_outer: float, thetas: int, rungs: int = 24) -> "DiskGrid":
        """Coarse radial ladder ending at ``r_outer``, used to branch-track boundary rings."""
        return cls(np.linspace(r_outer / rungs, r_outer, rungs), thetas)

    @property
    def n_r(self) -> int:
        return int(self.r_levels.size)

    @property
    def thetas(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.n_theta) / self.n_theta

    @property
    def points(self) -> np.ndarray:
        rays = np.exp(1j * self.thetas)
        return rays[:, None] * self.r_levels[None, :]

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.n_theta, self.n_r)

    def interior_mask(self, r_inner: float) -> np.ndarray:
        """Boolean mask of grid points with |z| <= r_inner."""
        return np.broadcast_to(self.r_levels[None, :] <= r_inner + 1e-12, self.shape)


@dataclass(frozen=True, eq=False)
class BoundaryCurve:
    """Closed ordered samples of the image of a circle under a map."""

    samples: np.ndarray

    def __post_init__(self) -> None:
        pts = np.asarray(self.samples, dtype=complex)
        if pts.ndim != 1 or pts.size < MIN_BOUNDARY_SAMPLES:
            raise ValueError(f"a boundary curve needs at least {MIN_BOUNDARY_SAMPLES} samples")
        if not np.all(np.isfinite(pts)):
            raise DomainError("boundary curve has non-finite samples")
        scale = max(1.0, float(np.max(np.abs(pts))))
        if abs(pts[0] - pts[-1]) > 1e-9 * scale:
            raise ValueError("boundary curve is not closed (first and last samples differ)")
        pts.setflags(write=False)
        object.__setattr__(self, "samples", pts)

    @classmethod
    def closing(cls, values: np.ndarray) -> "BoundaryCurve":
        """Build a curve from samples at theta_k = 2 pi k / N, k < N, repeating the first."""
        values = np.asarray(values, dtype=complex)
        return cls(np.append(values, values[0]))

    @classmethod
    def from_map(cls, func: Callable[[np.ndarray], np.ndarray], r: float, n_samples: int) -> "BoundaryCurve":
        """Image of |z| = r under a vectorised map, sampled at ``n_samples`` angles."""
        theta = 2.0 * np.pi * np.arange(n_samples) / n_samples
        return cls.closing(func(r * np.exp(1j * theta)))

    @property
    def diameter(self) -> float:
        """Bounding-box diagonal (an upper bound on the true diameter)."""
        re, im = self.samples.real, self.samples.imag
        return float(np.hypot(re.max() - re.min(), im.max() - im.min()))


# ---------------------------------------------------------------------------
# Logarithms and powers
# ---------------------------------------------------------------------------

def principal_arg(w: ArrayLike) -> np.ndarray:
    """Argument in (-pi, pi]; a negative real axis point maps to +pi regardless of the sign of zero."""
    arg = np.angle(np.asarray(w, dtype=complex))
    return np.where(arg <= -np.pi, np.pi, arg)


def principal_log(w: ArrayLike) -> np.ndarray:
    w = np.asarray(w, dtype=complex)
    return np.log(np.abs(w)) + 1j * principal_arg(w)


def _as_result(value: np.ndarray) -> Union[complex, np.ndarray]:
    return complex(value) if np.ndim(value) == 0 else value


def principal_pow(w: ArrayLike, s: ArrayLike) -> Union[complex, np.ndarray]:
    """exp(s * Log w) with the principal logarithm.

    ``w = 0`` returns 0 when ``s > 0`` and raises ``DomainError`` otherwise.
    """
    w = np.asarray(w, dtype=complex)
    s_arr = np.asarray(s)
    zero = w == 0
    if np.any(zero):
        shape = np.broadcast(w, s_arr).shape
        exponents = np.broadcast_to(np.real(s_arr), shape)[np.broadcast_to(zero, shape)]
        if np.any(exponents <= 0):
            raise DomainError("0 raised to a non-positive power")
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.exp(s_arr * principal_log(np.where(zero, 1.0, w)))
    out = np.where(zero, 0.0, out)
    return _as_result(out)


def _wrap_angle(delta: np.ndarray) -> np.ndarray:
    """Map angle increments into (-pi, pi]."""
    wrapped = np.mod(delta + np.pi, 2.0 * np.pi) - np.pi
    return np.where(wrapped == -np.pi, np.pi, wrapped)


def continuous_log_rays(values: np.ndarray, ray_offset: int = 0) -> Tuple[np.ndarray, np.ndarray]:
    """Logarithm continued along the last axis, starting from the principal value.

    Returns ``(log_values, departed)`` where ``departed[j]`` is True when ray
    ``j`` left the principal strip Im Log in (-pi, pi].
    """
    values = np.atleast_2d(np.asarray(values, dtype=complex))
    zeros = np.argwhere(values == 0)
    if zeros.size:
        ray, index = (int(v) for v in zeros[0])
        raise BranchCollapseError(ray + ray_offset, index)
    if not np.all(np.isfinite(values)):
        ray, index = (int(v) for v in np.argwhere(~np.isfinite(values))[0])
        raise DomainError(f"non-finite value on ray {ray + ray_offset}, index {index}")

    arg = np.angle(values)
    start = principal_arg(values[:, :1])
    increments = _wrap_angle(np.diff(arg, axis=1))
    unwrapped = np.concatenate([start, start + np.cumsum(increments, axis=1)], axis=1)
    departed = np.any((unwrapped <= -np.pi) | (unwrapped > np.pi + 1e-12), axis=1)
    return np.log(np.abs(values)) + 1j * unwrapped, departed


def continuous_pow_along_ray(
    values: np.ndarray,
    s: float,
    anchor: complex,
    ray: Optional[int] = None,
) -> np.ndarray:
    """Powers ``w_i ** s`` continued along an ordered sequence.

    Consecutive argument differences are forced into (-pi, pi), so the result
    follows the analytic continuation of the principal power at the first
    sample. ``anchor`` must equal that principal power.
    """
    seq = np.asarray(values, dtype=complex).ravel()
    if seq.size == 0:
        return seq
    try:
        logs, _ = continuous_log_rays(seq[None, :])
    except BranchCollapseError as exc:
        raise BranchCollapseError(ray, exc.index) from None
    out = np.exp(s * logs[0])
    if abs(out[0] - anchor) > 1e-9 * max(1.0, abs(anchor)):
        raise ValueError(
            f"anchor {anchor!r} is not the principal power of the first value ({out[0]!r})"
        )
    out[0] = anchor
    return out


# ---------------------------------------------------------------------------
# Elementary functions
# ---------------------------------------------------------------------------

def arctan_c(w: ArrayLike) -> Union[complex, np.ndarray]:
    """(1/(2i)) Log((1 + iw)/(1 - iw)) on the principal branch."""
    w = np.asarray(w, dtype=complex)
    if np.any(np.abs(w - 1j) < 1e-14) or np.any(np.abs(w + 1j) < 1e-14):
        raise PoleError("arctan has poles at w = +-i")
    return _as_result(principal_log((1.0 + 1j * w) / (1.0 - 1j * w)) / 2j)


# ---------------------------------------------------------------------------
# Numeric differentiation
# ---------------------------------------------------------------------------

def num_deriv(f: Callable, z: ArrayLike, order: int = 1) -> Union[complex, np.ndarray]:
    """Central-difference derivative with one Richardson extrapolation level.

    Order 1 uses h = 1e-5 max(1, |z|); order 2 uses h = 1e-3 max(1, |z|)
    since second differences at 1e-5 lose about six digits to round-off.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    z = np.asarray(z, dtype=complex)
    base = FIRST_DERIVATIVE_STEP if order == 1 else SECOND_DERIVATIVE_STEP
    h = base * np.maximum(1.0, np.abs(z))

    def stencil(step: np.ndarray) -> np.ndarray:
        if order == 1:
            return (np.asarray(f(z + step)) - np.asarray(f(z - step))) / (2.0 * step)
        return (np.asarray(f(z + step)) - 2.0 * np.asarray(f(z)) + np.asarray(f(z - step))) / step**2

    coarse = stencil(h)
    fine = stencil(h / 2.0)
    return _as_result((4.0 * fine - coarse) / 3.0)


# ---------------------------------------------------------------------------
# Quadrature on [0, 1]
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadResult:
    value: Union[complex, np.ndarray]
    error: float
    panels: int
    noise_limited: int = 0


def _sample(f: Callable, u: np.ndarray) -> np.ndarray:
    """Evaluate ``f`` on the node vector; the node axis is moved last."""
    out = np.asarray(f(u))
    if out.shape[-1:] == u.shape:
        return out
    per_node = np.asarray([np.asarray(f(float(x))) for x in u])
    return np.moveaxis(per_node, 0, -1)


def _gl_panel(f: Callable, a: float, b: float) -> Tuple[np.ndarray, np.ndarray]:
    """Panel estimate of the integral of f and of |f|."""
    half = 0.5 * (b - a)
    nodes = 0.5 * (a + b) + half * _GL_NODES
    values = _sample(f, nodes)
    return half * (values @ _GL_WEIGHTS), half * (np.abs(values) @ _GL_WEIGHTS)


def quad_unit_detailed(f: Callable, tol: float = DEFAULT_QUAD_TOL, max_depth: int = MAX_QUAD_DEPTH) -> QuadResult:
    """Adaptive composite 15-point Gauss-Legendre integral of ``f`` over [0, 1].

    ``f`` receives the node vector of a panel and returns values whose last
    axis runs over the nodes, so one call can integrate a whole batch of
    integrands (the error check then uses the worst member). A panel is
    accepted when whole-panel and bisected estimates agree to ``tol`` times its
    width, or to round-off of the integral of ``|f|`` over it; otherwise it is
    bisected, down to ``max_depth`` levels.

    Near a pole just outside [0, 1] the samples themselves carry relative
    noise well above machine epsilon, so the gap stops shrinking long before
    ``tol * width`` is reachable. Such a panel (gap shrank by less than
    ``QUAD_STALL_RATIO`` on the last bisection and sits below
    ``QUAD_NOISE_FLOOR`` times the integral of ``|f|``) is accepted and counted
    in ``noise_limited``. A genuine endpoint singularity keeps a gap of order
    the panel value and still hits the depth limit.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    total = None
    error = 0.0
    panels = 0
    noisy = 0
    root, _ = _gl_panel(f, 0.0, 1.0)
    stack = [(0.0, 1.0, root, float("inf"), 0)]
    while stack:
        a, b, whole, parent_gap, depth = stack.pop()
        mid = 0.5 * (a + b)
        left, left_abs = _gl_panel(f, a, mid)
        right, right_abs = _gl_panel(f, mid, b)
        refined = left + right
        scale = left_abs + right_abs
        gap = np.abs(whole - refined)
        local = float(np.max(gap))
        if not np.isfinite(local):
            raise NonConvergenceError(f"integrand not finite on [{a:.6g}, {b:.6g}]", estimate=float("inf"))
        converged = gap <= np.maximum(tol * (b - a), QUAD_ROUNDOFF * scale)
        stalled = local * QUAD_STALL_RATIO > parent_gap and np.all(converged | (gap <= QUAD_NOISE_FLOOR * scale))
        if stalled or np.all(converged):
            total = refined if total is None else total + refined
            error += local
            panels += 1
            if not np.all(converged):
                noisy += 1
        elif depth + 1 >= max_depth:
            raise NonConvergenceError(
                f"quadrature subdivision limit ({max_depth}) reached near u={mid:.6g}",
                estimate=error + local,
                partial=total,
            )
        else:
            stack.append((mid, b, right, local, depth + 1))
            stack.append((a, mid, left, local, depth + 1))
    return QuadResult(value=_as_result(total), error=error, panels=panels, noise_limited=noisy)


def quad_unit(f: Callable, tol: float = DEFAULT_QUAD_TOL) -> Union[complex, np.ndarray]:
    """Integral of ``f`` over [0, 1] with absolute error estimate <= tol."""
    return quad_unit_detailed(f, tol).value


# ---------------------------------------------------------------------------
# Winding numbers
# ---------------------------------------------------------------------------

def winding_numbers(curve: BoundaryCurve, points: ArrayLike) -> np.ndarray:
    """Winding number of ``curve`` around each point (same shape as ``points``).

    Sums argument increments of consecutive samples, each in (-pi, pi].
    """
    pts = np.asarray(points, dtype=complex)
    flat = pts.ravel()
    samples = curve.samples
    proximity = WINDING_PROXIMITY * max(curve.diameter, np.finfo(float).tiny)
    result = np.empty(flat.size, dtype=int)
    chunk = max(1, _WINDING_CHUNK // samples.size)
    for start in range(0, flat.size, chunk):
        w = flat[start:start + chunk, None]
        rel = samples[None, :] - w
        dist = np.abs(rel)
        nearest = dist.min(axis=1)
        if np.any(nearest < proximity):
            k = int(np.argmin(nearest))
            raise IndeterminateMembershipError(complex(w[k, 0]), float(nearest[k]))
        turns = np.angle(rel[:, 1:] / rel[:, :-1]).sum(axis=1) / (2.0 * np.pi)
        result[start:start + chunk] = np.rint(turns).astype(int)
    return result.reshape(pts.shape)


def winding_number(curve: BoundaryCurve, w: complex) -> int:
    """Winding number of ``curve`` around a single point."""
    return int(winding_numbers(curve, np.asarray([w]))[0])
