"""Run configuration: command-line flags merged with an optional exactdom.yml.

Priority: flags > config file > preset > defaults.
"""

from __future__ import annotations

import argparse
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from .bounds import CASE_TARGETS
from .complex_core import DEFAULT_QUAD_TOL, MIN_BOUNDARY_SAMPLES, DiskGrid
from .errors import ConfigFileError, HypothesisViolation, ParameterValidationError
from .logger import log
from .models import OperatorId, ParamSet, param_violations
from .targets import AnalyticTarget, resolve_target

LAMBDA4_TAILS = ("remainder", "strict")
DEFAULT_OUT = "exactdom-out"


def _parse_target_params(raw: Optional[List[str]]) -> Dict[str, complex]:
    """Parse repeated ``name=value`` flags; values may be complex ("0.5+0.2j")."""
    params: Dict[str, complex] = {}
    for item in raw or []:
        name, sep, value = item.partition("=")
        if not sep or not name.strip():
            raise ParameterValidationError([f"--target-param expects name=value (got '{item}')"])
        try:
            params[name.strip()] = complex(value.strip().replace(" ", ""))
        except ValueError:
            raise ParameterValidationError([f"--target-param {name.strip()}: '{value}' is not a number"]) from None
    return params


def _pick(*values):
    """First value that is not None."""
    for v in values:
        if v is not None:
            return v
    return None


def _complex_flag(re_flag: Optional[float], im_flag: Optional[float], fallback: complex) -> complex:
    if re_flag is None and im_flag is None:
        return fallback
    re = fallback.real if re_flag is None else re_flag
    im = fallback.imag if im_flag is None else im_flag
    return complex(re, im)


@dataclass(frozen=True)
class RunConfig:
    """Immutable settings for one CLI command."""

    command: str
    operator: str = OperatorId.PSI1.value
    target: str = "janowski"
    target_params: Dict[str, complex] = field(default_factory=dict)
    alpha: float = 0.0
    beta: complex = 1.0 + 0j
    gamma: complex = 0j
    n: int = 1

    # grid
    rmax: float = 0.95
    rings: int = 64
    thetas: int = 256
    boundary_samples: int = 2048

    quad_tol: float = DEFAULT_QUAD_TOL
    seed: int = 0
    samples: int = 100
    suite: str = "examples"
    case: Optional[str] = None
    lambda4_tail: str = "remainder"
    out: str = DEFAULT_OUT
    preset: Optional[str] = None
    config_source: Optional[str] = None
    verbose: bool = False

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        """Merge parsed flags with the config file and the selected preset."""
        from .config_file import load_file_config
        from .suites import resolve_preset

        try:
            file_cfg = load_file_config(getattr(args, "config", None))
        except FileNotFoundError as exc:
            raise ConfigFileError([str(exc)]) from None
        if file_cfg.source and not file_cfg.has_overrides:
            log.warning("%s sets no recognised keys; using flags, preset and defaults only", file_cfg.source)

        preset_name = _pick(getattr(args, "preset", None), file_cfg.preset)
        base = cls(command=args.command)
        if preset_name:
            try:
                preset = resolve_preset(preset_name)
            except ValueError as exc:
                raise ParameterValidationError([str(exc)]) from None
            base = cls(
                command=args.command,
                operator=preset.operator_id.value,
                target=preset.target,
                target_params=dict(preset.target_params),
                alpha=preset.alpha,
                beta=complex(preset.beta),
                gamma=complex(preset.gamma),
                n=preset.n,
                preset=preset.name,
            )

        target = _pick(getattr(args, "target", None), file_cfg.target, base.target)
        # parameters of another target do not carry over
        target_params = dict(base.target_params) if target == base.target else {}
        target_params.update(file_cfg.target_params)
        target_params.update(_parse_target_params(getattr(args, "target_param", None)))

        beta = _pick(file_cfg.beta, base.beta)
        gamma = _pick(file_cfg.gamma, base.gamma)

        return cls(
            command=args.command,
            operator=_pick(getattr(args, "operator", None), file_cfg.operator, base.operator),
            target=target,
            target_params=target_params,
            alpha=_pick(getattr(args, "alpha", None), file_cfg.alpha, base.alpha),
            beta=_complex_flag(getattr(args, "beta_re", None), getattr(args, "beta_im", None), complex(beta)),
            gamma=_complex_flag(getattr(args, "gamma_re", None), getattr(args, "gamma_im", None), complex(gamma)),
            n=_pick(getattr(args, "n", None), file_cfg.n, base.n),
            rmax=_pick(getattr(args, "rmax", None), file_cfg.rmax, base.rmax),
            rings=_pick(getattr(args, "rings", None), file_cfg.rings, base.rings),
            thetas=_pick(getattr(args, "thetas", None), file_cfg.thetas, base.thetas),
            boundary_samples=_pick(getattr(args, "boundary_samples", None), file_cfg.boundary_samples, base.boundary_samples),
            quad_tol=_pick(getattr(args, "quad_tol", None), file_cfg.quad_tol, base.quad_tol),
            seed=_pick(getattr(args, "seed", None), file_cfg.seed, base.seed),
            samples=_pick(getattr(args, "samples", None), file_cfg.samples, base.samples),
            suite=_pick(getattr(args, "suite", None), file_cfg.suite, base.suite),
            case=_pick(getattr(args, "case", None), file_cfg.case, base.case),
            lambda4_tail=_pick(getattr(args, "lambda4_tail", None), file_cfg.lambda4_tail, base.lambda4_tail),
            out=_pick(getattr(args, "out", None), file_cfg.out, base.out),
            preset=base.preset,
            config_source=file_cfg.source,
            verbose=bool(getattr(args, "verbose", False)),
        )

    # -- derived objects ----------------------------------------------------

    @property
    def operator_id(self) -> OperatorId:
        return OperatorId(self.operator)

    def param_set(self) -> ParamSet:
        return ParamSet.checked(self.alpha, self.beta, self.gamma, self.n, self.operator)

    def build_target(self) -> AnalyticTarget:
        return resolve_target(self.target, self.target_params)

    def grid(self) -> DiskGrid:
        return DiskGrid.uniform(self.rmax, self.rings, self.thetas)

    def bound_case(self) -> str:
        """Explicit --case, or the case matching the target label."""
        if self.case:
            return str(self.case)
        for case_id, label in CASE_TARGETS.items():
            if label == self.target:
                return case_id
        raise ParameterValidationError([
            f"target '{self.target}' has no bound case; use --case ({', '.join(CASE_TARGETS)})"
        ])

    # -- validation ---------------------------------------------------------

    def violations(self) -> List[str]:
        """Every violated hypothesis or setting, collected in one pass."""
        from .dominants import psi2_screen
        from .suites import SUITES

        found: List[str] = []
        op: Optional[OperatorId] = None
        try:
            op = self.operator_id
        except ValueError:
            found.append(f"operator must be one of {', '.join(o.value for o in OperatorId)} (got '{self.operator}')")

        if op is not None:
            found += param_violations(self.alpha, self.beta, self.gamma, self.n, op)

        target = None
        try:
            target = self.build_target()
        except HypothesisViolation as exc:
            found += exc.violations

        if not 0.0 < self.rmax < 1.0:
            found.append(f"rmax must lie in (0, 1) (got {self.rmax})")
        if self.rings < 1:
            found.append(f"rings must be >= 1 (got {self.rings})")
        if self.thetas < 8:
            found.append(f"thetas must be >= 8 (got {self.thetas})")
        if self.boundary_samples < MIN_BOUNDARY_SAMPLES:
            found.append(f"boundary_samples must be >= {MIN_BOUNDARY_SAMPLES} (got {self.boundary_samples})")
        if not (self.quad_tol > 0 and math.isfinite(self.quad_tol)):
            found.append(f"quad_tol must be positive (got {self.quad_tol})")
        if self.samples < 1:
            found.append(f"samples must be >= 1 (got {self.samples})")
        if self.lambda4_tail not in LAMBDA4_TAILS:
            found.append(f"lambda4_tail must be one of {', '.join(LAMBDA4_TAILS)} (got '{self.lambda4_tail}')")
        if self.command == "verify" and self.suite not in SUITES:
            found.append(f"unknown suite '{self.suite}'. Available suites: {', '.join(SUITES)}")
        if self.command == "bound":
            try:
                case_id = self.bound_case()
                if case_id not in CASE_TARGETS:
                    found.append(f"unknown bound case '{case_id}' (expected one of {', '.join(CASE_TARGETS)})")
                elif CASE_TARGETS[case_id] != self.target:
                    found.append(f"case {case_id} needs target '{CASE_TARGETS[case_id]}' (got '{self.target}')")
            except HypothesisViolation as exc:
                found += exc.violations

        if not found and op == OperatorId.PSI2 and self.command == "dominant":
            reach = psi2_screen(self.param_set(), target, self.grid())
            if reach >= math.pi / 2:
                found.append(f"|sqrt(gamma beta) h| reaches {reach:.6g} >= pi/2 on |z| = {self.rmax}")
        return found

    def echo(self) -> Dict[str, object]:
        return {
            "command": self.command,
            "operator": self.operator,
            "target": self.target,
            "target_params": dict(self.target_params),
            "alpha": self.alpha,
            "beta": self.beta,
            "gamma": self.gamma,
            "n": self.n,
            "grid": {"rmax": self.rmax, "rings": self.rings, "thetas": self.thetas},
            "seed": self.seed,
            "preset": self.preset,
        }
