"""
CSV tables and the cross-validation report written by the experiment runner.
"""

import csv
import logging
import math
import os
from dataclasses import dataclass, field
from typing import Any, Iterable, List, Optional, Sequence, Tuple

from .config import ValidationThresholds
from .exceptions import InvalidParameterError
from .montecarlo import EstimateResult
from .utils import ensure_directory

logger = logging.getLogger(__name__)


@dataclass
class Table:
    columns: Tuple[str, ...]
    rows: List[Tuple[Any, ...]] = field(default_factory=list)

    def add(self, *values: Any):
        if len(values) != len(self.columns):
            raise InvalidParameterError("row", f"expected {len(self.columns)} values, got {len(values)}")
        self.rows.append(tuple(values))


@dataclass(frozen=True)
class CurveCheck:
    """Outcome of one validation: ``deviation`` is the max relative deviation (or
    the absolute slope error for slope checks); NaN when no point qualified.

    An ``insufficient`` check compared nothing and never passes.
    """

    curve_id: str
    deviation: float
    passed: bool
    detail: str = ""
    compared: Optional[int] = None
    insufficient: bool = False

    @property
    def status(self) -> str:
        if self.insufficient:
            return "INSUFFICIENT"
        return "PASS" if self.passed else "FAIL"


def format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return f"{value:.10g}"
    return str(value)


def write_csv(path: str, table: Table) -> str:
    ensure_directory(os.path.dirname(path))
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(table.columns)
        for row in table.rows:
            writer.writerow([format_value(value) for value in row])
    logger.info(f"Wrote {len(table.rows)} rows to {path}")
    return path


def compare_curve(
    curve_id: str,
    points: Sequence[Tuple[EstimateResult, float]],
    thresholds: ValidationThresholds,
) -> CurveCheck:
    """
    Monte Carlo against analytic values: relative deviation within ``rel_tol`` where
    the analytic probability reaches ``probability_floor``, otherwise agreement within
    ``half_widths`` confidence half-widths. Points without a half-width are skipped
    below the floor; a curve with no compared point is insufficient.
    """
    worst = float("nan")
    failures = []
    compared = 0
    for estimate, analytic in points:
        if analytic >= thresholds.probability_floor:
            compared += 1
            deviation = abs(estimate.estimate - analytic) / analytic
            worst = deviation if math.isnan(worst) else max(worst, deviation)
            if deviation > thresholds.rel_tol:
                failures.append(f"{analytic:.4g} vs {estimate.estimate:.4g}")
        elif estimate.half_width is not None:
            compared += 1
            if abs(estimate.estimate - analytic) > thresholds.half_widths * estimate.half_width:
                failures.append(f"{analytic:.4g} vs {estimate.estimate:.4g} (+-{estimate.half_width:.2g})")
    if compared == 0:
        check = CurveCheck(curve_id, worst, False, f"none of {len(points)} points resolvable", compared, insufficient=True)
        logger.warning(f"Validation of {curve_id} compared no points: raise the trial count or lower the sweep")
        return check
    check = CurveCheck(curve_id, worst, not failures, "; ".join(failures), compared)
    if not check.passed:
        logger.warning(f"Validation failed for {curve_id}: {check.detail}")
    return check


def compare_value(curve_id: str, value: float, expected: float, tolerance: float) -> CurveCheck:
    deviation = abs(value - expected)
    check = CurveCheck(curve_id, deviation, deviation <= tolerance, f"{value:.4g} vs {expected:.4g} +- {tolerance:.2g}")
    if not check.passed:
        logger.warning(f"Validation failed for {curve_id}: {check.detail}")
    return check


def compare_bound(curve_id: str, holds: Iterable[bool], detail: str = "") -> CurveCheck:
    passed = all(holds)
    check = CurveCheck(curve_id, float("nan"), passed, "" if passed else detail)
    if not passed:
        logger.warning(f"Validation failed for {curve_id}: {detail}")
    return check


def write_report(path: str, sections: Sequence[Tuple[str, Sequence[CurveCheck]]], outputs: Optional[Sequence[str]] = None) -> str:
    ensure_directory(os.path.dirname(path))
    lines = []
    for experiment, checks in sections:
        lines.append(f"[{experiment}]")
        if not checks:
            lines.append("  no validations")
        for check in checks:
            line = f"  {check.curve_id}: max deviation {format_value(check.deviation)} {check.status}"
            if check.compared is not None:
                line += f" [{check.compared} points]"
            if check.detail and not check.passed:
                line += f" ({check.detail})"
            lines.append(line)
    if outputs:
        lines.append("[outputs]")
        lines.extend(f"  {output}" for output in outputs)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")
    logger.info(f"Wrote validation report to {path}")
    return path
