"""Entry point for exactdom: build dominants, compute bounds, run verification suites.

Subcommands:
- **dominant**: q and H on a grid, grid CSVs and a diagnostics JSON.
- **bound**: lambda with zeta / xi for one catalog case.
- **verify**: one of the verification suites.

Exit codes: 0 all checks pass, 1 a check failed (or an unexpected error),
2 the configuration violates a hypothesis, 3 the numerics broke down.
"""

from __future__ import annotations

import argparse
import sys
from typing import TYPE_CHECKING, Callable, Dict, List, Optional

if TYPE_CHECKING:
    from .config import RunConfig
    from .suites import Preset

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML config file (default: ./exactdom.yml if present)")
    common.add_argument("--preset", help="named configuration, e.g. halfplane-identity")
    common.add_argument("--operator", choices=["psi1", "psi2"])
    common.add_argument("--target", help="catalog target label")
    common.add_argument("--target-param", action="append", metavar="NAME=VALUE", help="target parameter (repeatable)")
    common.add_argument("--alpha", type=float)
    common.add_argument("--beta-re", type=float)
    common.add_argument("--beta-im", type=float)
    common.add_argument("--gamma-re", type=float)
    common.add_argument("--gamma-im", type=float)
    common.add_argument("--n", type=int)
    common.add_argument("--rmax", type=float)
    common.add_argument("--rings", type=int)
    common.add_argument("--thetas", type=int)
    common.add_argument("--boundary-samples", type=int)
    common.add_argument("--quad-tol", type=float)
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output directory")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="exactdom", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("dominant", parents=[common], help="build q and H and check them")
    bound = sub.add_parser("bound", parents=[common], help="lower-bound constants for a catalog case")
    bound.add_argument("--case", help="bound case (1, 1r, 2, 3, 4); default follows --target")
    bound.add_argument("--lambda4-tail", choices=["remainder", "strict"])
    verify = sub.add_parser("verify", parents=[common], help="run a verification suite")
    verify.add_argument("--suite", help="examples, univalence, exactness, properties or sharpness")
    verify.add_argument("--samples", type=int)
    return parser


def _preset_oracle(cfg: RunConfig, preset: Optional[Preset]):
    """The preset's closed form, if the run still matches the preset exactly."""
    if preset is None or preset.oracle is None:
        return None
    same = (
        cfg.operator == preset.operator_id.value
        and cfg.target == preset.target
        and dict(cfg.target_params) == {k: complex(v) for k, v in preset.target_params.items()}
        and cfg.alpha == preset.alpha
        and cfg.beta == complex(preset.beta)
        and cfg.gamma == complex(preset.gamma)
        and cfg.n == preset.n
    )
    return preset.oracle if same else None


def cmd_dominant(cfg: RunConfig) -> int:
    from .logger import log, log_group
    from .reports import DOMINANT_CSV, DOMINANT_JSON, MAJORANT_CSV, grid_frame, summary_lines, write_csv, write_json
    from .suites import dominant_diagnostics, resolve_preset

    params = cfg.param_set()
    target = cfg.build_target()
    preset = resolve_preset(cfg.preset) if cfg.preset else None
    oracle = _preset_oracle(cfg, preset)

    with log_group(f"dominant {params.operator_id.value} for {target.describe()}"):
        q, big_h, report = dominant_diagnostics(
            params, target, cfg.grid(), cfg.quad_tol, cfg.boundary_samples, oracle
        )
        for line in summary_lines(report):
            log.info(line)

    write_csv(grid_frame(q), cfg.out, DOMINANT_CSV)
    write_csv(grid_frame(big_h), cfg.out, MAJORANT_CSV)
    write_json(report, cfg.out, DOMINANT_JSON)
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_bound(cfg: RunConfig) -> int:
    from .bounds import bound_report
    from .logger import log
    from .reports import BOUND_JSON, summary_lines, write_json

    target = cfg.build_target()
    case_id = cfg.bound_case()
    report = bound_report(
        case_id,
        target.params,
        target,
        cfg.n,
        cfg.operator_id,
        cfg.alpha,
        cfg.beta,
        cfg.gamma,
        tail=cfg.lambda4_tail,
    )
    log.info("case %s: lambda = %.15g | zeta = %s | xi = %s", case_id, report.lambda_, report.zeta, report.xi)
    for tag in report.tags:
        log.warning("case %s: %s", case_id, tag)
    for line in summary_lines(report):
        log.info(line)
    write_json(report, cfg.out, BOUND_JSON)
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def _suite_kwargs(cfg: RunConfig) -> Dict[str, Dict[str, object]]:
    return {
        "examples": {"grid": cfg.grid(), "tol": cfg.quad_tol, "boundary_samples": cfg.boundary_samples},
        "univalence": {"samples": cfg.samples, "seed": cfg.seed},
        "exactness": {"samples": cfg.samples, "seed": cfg.seed},
        "properties": {
            "samples": cfg.samples,
            "seed": cfg.seed,
            "n": cfg.n,
            "tol": cfg.quad_tol,
            "boundary_samples": cfg.boundary_samples,
        },
        "sharpness": {"tol": cfg.quad_tol},
    }


def cmd_verify(cfg: RunConfig) -> int:
    from .logger import log, log_group
    from .reports import SHARPNESS_CSV, VERIFY_JSON, sharpness_frame, summary_lines, write_csv, write_json
    from .suites import SUITES

    runner: Callable = SUITES[cfg.suite]
    with log_group(f"verify --suite {cfg.suite}"):
        report = runner(**_suite_kwargs(cfg)[cfg.suite])
        for line in summary_lines(report):
            log.info(line)
    for item in report.counterexamples[:10]:
        log.warning("counterexample: %s", item)

    write_json(report, cfg.out, VERIFY_JSON)
    if report.sharpness_table:
        write_csv(sharpness_frame(report.sharpness_table), cfg.out, SHARPNESS_CSV)
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


COMMANDS: Dict[str, Callable[["RunConfig"], int]] = {
    "dominant": cmd_dominant,
    "bound": cmd_bound,
    "verify": cmd_verify,
}

_REPORT_FILES = {"dominant": "dominant.json", "bound": "bound.json", "verify": "verify.json"}


def _reject(violations: List[str], out_dir: str) -> int:
    from .logger import log
    from .models import ValidationReport
    from .reports import VALIDATION_JSON, write_json

    for v in violations:
        log.error("hypothesis violated: %s", v)
    write_json(ValidationReport(violations=violations), out_dir, VALIDATION_JSON)
    return EXIT_VALIDATION


def run(argv: Optional[List[str]] = None) -> int:
    """Parse flags, validate the configuration and run one command."""
    from .config import DEFAULT_OUT, RunConfig
    from .errors import HypothesisViolation, NumericFailure
    from .logger import get_logger, log
    from .reports import write_json

    args = build_parser().parse_args(argv)
    get_logger(verbose=args.verbose)

    try:
        cfg = RunConfig.from_args(args)
    except HypothesisViolation as exc:
        return _reject(exc.violations, args.out or DEFAULT_OUT)

    log.info(
        "exactdom %s | operator=%s | target=%s | alpha=%g beta=%s gamma=%s n=%d%s",
        cfg.command, cfg.operator, cfg.target, cfg.alpha, cfg.beta, cfg.gamma, cfg.n,
        f" | preset={cfg.preset}" if cfg.preset else "",
    )
    if cfg.config_source:
        log.info("Settings from %s (flags take precedence)", cfg.config_source)

    problems = cfg.violations()
    if problems:
        return _reject(problems, cfg.out)

    try:
        return COMMANDS[cfg.command](cfg)
    except HypothesisViolation as exc:
        return _reject(exc.violations, cfg.out)
    except NumericFailure as exc:
        log.error("numeric failure (%s): %s", type(exc).__name__, exc)
        write_json(
            {"error": type(exc).__name__, "message": str(exc), "config": cfg.echo()},
            cfg.out,
            _REPORT_FILES[cfg.command],
        )
        return EXIT_NUMERIC


def main() -> None:
    """CLI entry point with basic error handling."""
    try:
        code = run()
    except KeyboardInterrupt:
        print("\nAborted.", file=sys.stderr)
        sys.exit(130)
    except Exception as exc:
        from .logger import log

        log.error("exactdom failed with an unexpected error: %s", exc)
        sys.exit(1)
    sys.exit(code)


if __name__ == "__main__":
    main()
