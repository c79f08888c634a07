"""Write reports: JSON for diagnostics, CSV for grid dumps and sharpness tables."""

from __future__ import annotations

import json
import math
import os
from enum import Enum
from typing import Any, Iterable, List

import numpy as np
import pandas as pd
from pydantic import BaseModel

from .dominants import DominantField
from .logger import log
from .models import CheckStatus, SharpnessRow, _Report

GRID_COLUMNS = ["r", "theta", "re_q", "im_q", "re_dq", "im_dq", "re_ddq", "im_ddq"]
SHARPNESS_COLUMNS = ["r", "min_re_q", "argmin_theta"]
FLOAT_FORMAT = "%.17g"

# Output file names under --out
DOMINANT_CSV = "dominant.csv"
MAJORANT_CSV = "majorant.csv"
DOMINANT_JSON = "dominant.json"
BOUND_JSON = "bound.json"
VERIFY_JSON = "verify.json"
SHARPNESS_CSV = "sharpness.csv"
VALIDATION_JSON = "validation.json"

_STATUS_MARK = {
    CheckStatus.PASS: "ok",
    CheckStatus.FAIL: "FAIL",
    CheckStatus.SKIPPED: "skip",
    CheckStatus.INCONCLUSIVE: "??",
}


def to_jsonable(value: Any) -> Any:
    """Plain JSON types; complex numbers become {"re": x, "im": y}."""
    if isinstance(value, BaseModel):
        return to_jsonable(value.model_dump(by_alias=True))
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": _finite(float(value.real)), "im": _finite(float(value.imag))}
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return _finite(float(value))
    return value


def _finite(x: float):
    # JSON has no inf/nan
    return x if math.isfinite(x) else str(x)


def dumps(report: Any) -> str:
    return json.dumps(to_jsonable(report), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def write_json(report: Any, out_dir: str, filename: str) -> str:
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, filename)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(report))
    log.info("Wrote %s", path)
    return path


def grid_frame(fld: DominantField) -> pd.DataFrame:
    """One row per grid point, ray-major (all radii of ray 0 first)."""
    n_theta, n_r = fld.grid.shape
    r = np.tile(fld.grid.r_levels, n_theta)
    theta = np.repeat(fld.grid.thetas, n_r)
    q, dq, ddq = (np.asarray(a).ravel() for a in (fld.q_vals, fld.q_d1_vals, fld.q_d2_vals))
    return pd.DataFrame(
        {
            "r": r,
            "theta": theta,
            "re_q": q.real,
            "im_q": q.imag,
            "re_dq": dq.real,
            "im_dq": dq.imag,
            "re_ddq": ddq.real,
            "im_ddq": ddq.imag,
        },
        columns=GRID_COLUMNS,
    )


def sharpness_frame(rows: Iterable[SharpnessRow]) -> pd.DataFrame:
    return pd.DataFrame([row.model_dump() for row in rows], columns=SHARPNESS_COLUMNS)


def write_csv(frame: pd.DataFrame, out_dir: str, filename: str) -> str:
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, filename)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    log.info("Wrote %s (%d rows)", path, len(frame))
    return path


def summary_lines(report: _Report) -> List[str]:
    """Human-readable check table for the log."""
    lines = []
    for check in report.checks:
        mark = _STATUS_MARK[check.status]
        if check.value is not None and check.threshold is not None:
            lines.append(f"[{mark}] {check.name}: {check.value:.3e} (threshold {check.threshold:.3e})")
        else:
            lines.append(f"[{mark}] {check.name}" + (f": {check.detail}" if check.detail else ""))
    failed = len(report.failures)
    lines.append(f"{len(report.checks) - failed}/{len(report.checks)} checks pass")
    return lines
