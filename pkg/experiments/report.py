"""Acceptance summary built from the CSV tables of a completed run."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd
from loguru import logger
from tabulate import tabulate

from analysis.commutators import ERROR_TERMS
from analysis.constants import Verdict
from analysis.rate_fit import extrapolate_limit

from .manifest import RunManifest

SUMMARY_NAME = "summary.txt"
SUMMARY_COLUMNS = ["criterion", "subject", "measured", "expected", "tolerance", "verdict"]


@dataclass(frozen=True)
class Summary:
    """Criteria table of a run and the rendered text."""

    criteria: pd.DataFrame
    text: str

    @property
    def failures(self) -> int:
        return int((self.criteria["verdict"] == Verdict.FAIL.value).sum())

    @property
    def passed(self) -> bool:
        return self.failures == 0


def _read(out_dir: Path, table: str) -> pd.DataFrame | None:
    path = out_dir / f"{table}.csv"
    if not path.is_file():
        return None
    frame = pd.read_csv(path)
    return None if frame.empty else frame


def _row(criterion: str, subject: str, measured, expected, tolerance, verdict: str) -> dict:
    return {
        "criterion": criterion,
        "subject": subject,
        "measured": measured,
        "expected": expected,
        "tolerance": tolerance,
        "verdict": verdict,
    }


def _besov_rows(frame: pd.DataFrame) -> list[dict]:
    return [
        _row(
            "besov-exponent",
            f"{r.fixture_id}/{r.quantity} p={r.p:g}",
            r.alpha_hat,
            r.expected_alpha,
            r.tolerance,
            r.verdict,
        )
        for r in frame.itertuples(index=False)
    ]


def _mollify_rows(frame: pd.DataFrame) -> list[dict]:
    return [
        _row(
            "mollify-rate",
            f"{r.fixture_id}/{r.quantity} p={r.p:g}",
            r.difference_slope,
            r.expected_difference,
            r.tolerance,
            r.verdict,
        )
        for r in frame.itertuples(index=False)
    ]


def _decomposition_rows(frame: pd.DataFrame, tolerance: float) -> list[dict]:
    rows = []
    for fixture_id, group in frame.groupby("fixture_id", sort=False):
        worst = float(group["decomposition_residual"].abs().max())
        if worst == 0:
            verdict = Verdict.EXACT
        else:
            verdict = Verdict.PASS if worst < tolerance else Verdict.FAIL
        rows.append(_row("decomposition", str(fixture_id), worst, 0.0, tolerance, verdict.value))
    return rows


def _rate_rows(frame: pd.DataFrame) -> list[dict]:
    rows = []
    for r in frame.itertuples(index=False):
        criterion = "shock-sharpness" if r.term == "sharpness" else "commutator-rate"
        rows.append(
            _row(criterion, f"{r.fixture_id}/{r.phi}/{r.term}", r.slope, r.predicted, r.tolerance, r.verdict)
        )
    return rows


def _epsilon_growth(
    cells: pd.DataFrame, limits: pd.DataFrame, term: str
) -> tuple[float, float | None]:
    """Largest rise of ``|E(eps, h) - E(0, h)|`` toward the next finer radius, and its ``h``.

    Only the last term vanishes as ``eps -> 0`` at fixed ``h``; the others
    approach an ``h``-dependent value, so the distance to that value must shrink.
    """
    targets = dict(zip(limits["h"], limits[term]))
    worst, worst_h = -math.inf, None
    for h, row in cells.groupby("h", sort=True):
        series = row.sort_values("epsilon")[term].to_numpy()
        if len(series) < 2:
            continue
        distance = np.abs(series - targets.get(h, 0.0))
        rise = float(np.max(distance[:-1] - distance[1:]))
        if rise > worst:
            worst, worst_h = rise, float(h)
    if worst_h is None:
        return 0.0, None
    return worst, worst_h


def _bv_rows(frame: pd.DataFrame, floor_factor: float) -> list[dict]:
    """Per error term: convergence along ``eps`` at every ``h``, then the double limit.

    Both rows of a term are judged against ``floor_factor`` times the largest
    quadrature floor of its fixture and test function.
    """
    rows = []
    for (fixture_id, phi), group in frame.groupby(["fixture_id", "phi"], sort=False):
        extrapolated = group["extrapolated"].astype(bool)
        cells = group[~extrapolated]
        limits = group[extrapolated].sort_values("h")
        tolerance = floor_factor * float(group["quadrature_floor"].max())
        for term in ERROR_TERMS:
            subject = f"{fixture_id}/{phi}/{term}"
            if not group[term].abs().any():
                exact = Verdict.EXACT.value
                rows.append(_row("bv-epsilon-convergence", subject, 0.0, 0.0, tolerance, exact))
                rows.append(_row("bv-double-limit", subject, 0.0, 0.0, tolerance, exact))
                continue

            rise, h = _epsilon_growth(cells, limits, term)
            verdict = Verdict.PASS if rise <= tolerance else Verdict.FAIL
            if verdict is Verdict.FAIL:
                logger.warning(
                    f"{subject} moves away from its eps -> 0 value by {rise:.3e} at h={h:.5g}"
                )
            rows.append(_row("bv-epsilon-convergence", subject, rise, 0.0, tolerance, verdict.value))

            limit = abs(extrapolate_limit(limits["h"].tolist(), limits[term].tolist()))
            verdict = Verdict.PASS if limit <= tolerance else Verdict.FAIL
            if verdict is Verdict.FAIL:
                logger.warning(f"{subject} double limit {limit:.3e} exceeds {tolerance:.3e}")
            rows.append(_row("bv-double-limit", subject, limit, 0.0, tolerance, verdict.value))
    return rows


def _defect_rows(frame: pd.DataFrame) -> list[dict]:
    return [
        _row(
            "energy-defect",
            f"{r.fixture_id}/{r.phi}",
            r.weak_residual,
            r.oracle,
            r.tolerance,
            r.verdict,
        )
        for r in frame.itertuples(index=False)
    ]


def _energy_rows(frame: pd.DataFrame) -> list[dict]:
    return [
        _row(
            "energy-constancy",
            str(r.fixture_id),
            r.max_relative_deviation,
            0.0,
            r.tolerance,
            r.verdict,
        )
        for r in frame.itertuples(index=False)
    ]


def build_criteria(
    out_dir: str | Path, decomposition_tolerance: float, bv_floor_factor: float
) -> pd.DataFrame:
    """Collect one row per acceptance criterion from the tables in ``out_dir``."""
    out = Path(out_dir)
    rows: list[dict] = []
    if (frame := _read(out, "besov_fits")) is not None:
        rows += _besov_rows(frame)
    if (frame := _read(out, "mollify_rates")) is not None:
        rows += _mollify_rows(frame)
    if (frame := _read(out, "commutators")) is not None:
        rows += _decomposition_rows(frame, decomposition_tolerance)
    if (frame := _read(out, "commutator_rates")) is not None:
        rows += _rate_rows(frame)
    if (frame := _read(out, "bv_terms")) is not None:
        rows += _bv_rows(frame, bv_floor_factor)
    if (frame := _read(out, "defects")) is not None:
        rows += _defect_rows(frame)
    if (frame := _read(out, "energy_checks")) is not None:
        rows += _energy_rows(frame)
    return pd.DataFrame(rows, columns=SUMMARY_COLUMNS)


def _format(value) -> str:
    if isinstance(value, float):
        return "" if math.isnan(value) else f"{value:.6g}"
    return str(value)


def render_summary(criteria: pd.DataFrame) -> str:
    """Tabulate the criteria and append the overall outcome line."""
    table = tabulate(
        [[_format(v) for v in row] for row in criteria.itertuples(index=False)],
        headers=SUMMARY_COLUMNS,
        tablefmt="github",
    )
    failures = int((criteria["verdict"] == Verdict.FAIL.value).sum())
    outcome = "all criteria pass" if failures == 0 else f"{failures} criteria fail"
    return f"{table}\n\n{outcome}\n"


def report(
    out_dir: str | Path,
    decomposition_tolerance: float,
    bv_floor_factor: float,
) -> Summary:
    """Summarize a completed run and write ``summary.txt``.

    Args:
        out_dir: Output directory of the run.
        decomposition_tolerance: Bound on the commutator decomposition residual.
        bv_floor_factor: Multiple of the quadrature floor allowed for the
            growth of an error term along ``eps`` and for its double limit.

    Returns:
        The criteria and the rendered summary.

    Raises:
        ManifestError: If the directory holds no complete run.
    """
    out = Path(out_dir)
    RunManifest(out).require_complete()
    criteria = build_criteria(out, decomposition_tolerance, bv_floor_factor)
    text = render_summary(criteria)
    (out / SUMMARY_NAME).write_text(text, encoding="utf-8")
    logger.info(f"Summary written to {out / SUMMARY_NAME}")
    return Summary(criteria, text)
