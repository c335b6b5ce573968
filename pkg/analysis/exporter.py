"""CSV export of lab results.

Every report table has a fixed column order (documented in
``docs/report-columns.md``). Rows are plain dicts so they survive a JSON
round trip through the run manifest unchanged; ``ReportExporter`` turns them
into a pandas DataFrame and writes the CSV.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
from loguru import logger

from .besov import BesovEstimate, RegularityFit
from .commutators import ERROR_TERMS, CommutatorSweep, IteratedLimit
from .defect import DefectReport
from .grid import Field
from .rate_fit import RateFit

Row = dict[str, Any]

TABLE_COLUMNS: dict[str, list[str]] = {
    "fields": ["fixture_id", "quantity", "path", "components", "n_x", "n_t"],
    "besov_fits": [
        "fixture_id", "quantity", "p", "alpha_hat", "r_squared", "n_scales",
        "degenerate", "expected_alpha", "tolerance", "verdict",
    ],
    "besov_norms": [
        "fixture_id", "quantity", "p", "alpha", "lp_norm", "seminorm",
        "argmax_shift", "divergent",
    ],
    "mollify_rates": [
        "fixture_id", "quantity", "p", "difference_slope", "gradient_slope",
        "expected_difference", "expected_gradient", "tolerance", "verdict",
    ],
    "commutators": [
        "fixture_id", "system", "phi", "epsilon", "R1", "R2", "R3", "S_int",
        "pointwise_sup", "decomposition_residual",
    ],
    "commutator_rates": [
        "fixture_id", "phi", "term", "slope", "r_squared", "predicted",
        "tolerance", "verdict",
    ],
    "bv_terms": [
        "fixture_id", "phi", "h", "epsilon", "extrapolated", *ERROR_TERMS, "quadrature_floor",
    ],
    "defects": [
        "fixture_id", "system", "phi", "weak_residual", "quadrature_floor",
        "extrapolated_defect", "rate_slope", "oracle", "relative_error",
        "tolerance", "verdict",
    ],
    "defect_series": ["fixture_id", "phi", "epsilon", "residual"],
    "energy_series": ["fixture_id", "t", "energy"],
    "energy_checks": [
        "fixture_id", "stationary", "max_relative_deviation", "tolerance", "verdict",
    ],
}

# missing values are written as empty cells
_MISSING = float("nan")


def _value(x: float | None) -> float:
    return _MISSING if x is None else float(x)


def field_row(fixture_id: str, quantity: str, path: str, field: Field) -> Row:
    return {
        "fixture_id": fixture_id,
        "quantity": quantity,
        "path": path,
        "components": field.components,
        "n_x": field.grid.n_x,
        "n_t": field.grid.n_t,
    }


def regularity_row(
    fixture_id: str,
    quantity: str,
    p: float,
    fit: RegularityFit,
    expected_alpha: float | None,
    tolerance: float,
    verdict: str,
) -> Row:
    return {
        "fixture_id": fixture_id,
        "quantity": quantity,
        "p": float(p),
        "alpha_hat": fit.alpha_hat,
        "r_squared": fit.r_squared,
        "n_scales": len(fit.shift_scales),
        "degenerate": fit.degenerate,
        "expected_alpha": _value(expected_alpha),
        "tolerance": float(tolerance),
        "verdict": verdict,
    }


def besov_norm_row(fixture_id: str, quantity: str, estimate: BesovEstimate) -> Row:
    shift = "" if estimate.argmax_shift is None else " ".join(map(str, estimate.argmax_shift))
    return {
        "fixture_id": fixture_id,
        "quantity": quantity,
        "p": estimate.p,
        "alpha": estimate.alpha,
        "lp_norm": estimate.lp_norm,
        "seminorm": estimate.seminorm,
        "argmax_shift": shift,
        "divergent": estimate.divergent,
    }


def _slope(fit: RateFit | None) -> float:
    return _MISSING if fit is None or fit.exact else fit.slope


def mollify_row(
    fixture_id: str,
    quantity: str,
    p: float,
    fits: tuple[RateFit, RateFit],
    expected: float | None,
    tolerance: float,
    verdict: str,
) -> Row:
    difference, gradient = fits
    return {
        "fixture_id": fixture_id,
        "quantity": quantity,
        "p": float(p),
        "difference_slope": _slope(difference),
        "gradient_slope": _slope(gradient),
        "expected_difference": _value(expected),
        "expected_gradient": _MISSING if expected is None else expected - 1.0,
        "tolerance": float(tolerance),
        "verdict": verdict,
    }


def commutator_rows(
    fixture_id: str,
    system: str,
    phi_label: str,
    sweep: CommutatorSweep,
    decomposition: Mapping[float, float] | None = None,
) -> list[Row]:
    """One row per ``epsilon`` of a commutator sweep."""
    decomposition = decomposition or {}
    return [
        {
            "fixture_id": fixture_id,
            "system": system,
            "phi": phi_label,
            "epsilon": r.epsilon,
            "R1": r.R1,
            "R2": r.R2,
            "R3": _value(r.R3),
            "S_int": _value(r.S_int),
            "pointwise_sup": r.pointwise_sup,
            "decomposition_residual": _value(decomposition.get(r.epsilon)),
        }
        for r in sweep.reports
    ]


def rate_row(
    fixture_id: str,
    phi_label: str,
    term: str,
    fit: RateFit | None,
    predicted: float | None,
    tolerance: float,
    verdict: str,
) -> Row:
    return {
        "fixture_id": fixture_id,
        "phi": phi_label,
        "term": term,
        "slope": _slope(fit),
        "r_squared": _MISSING if fit is None else fit.r_squared,
        "predicted": _value(predicted),
        "tolerance": float(tolerance),
        "verdict": verdict,
    }


def bv_rows(fixture_id: str, phi_label: str, limit: IteratedLimit) -> list[Row]:
    """Every ``(h, eps)`` cell followed by the extrapolated row per ``h``."""
    rows: list[Row] = []
    for cell in limit.terms:
        rows.append(
            {
                "fixture_id": fixture_id,
                "phi": phi_label,
                "h": cell.h,
                "epsilon": cell.epsilon,
                "extrapolated": False,
                **dict(zip(ERROR_TERMS, cell.as_tuple())),
                "quadrature_floor": cell.quadrature_floor,
            }
        )
    for h in limit.h_values:
        rows.append(
            {
                "fixture_id": fixture_id,
                "phi": phi_label,
                "h": h,
                "epsilon": 0.0,
                "extrapolated": True,
                **dict(zip(ERROR_TERMS, limit.extrapolated[h])),
                "quadrature_floor": limit.floor_at(h),
            }
        )
    return rows


def defect_row(
    report: DefectReport, oracle: float | None, tolerance: float, verdict: str
) -> Row:
    relative = _MISSING
    if oracle is not None and oracle != 0:
        relative = abs(report.weak_residual - oracle) / abs(oracle)
    return {
        "fixture_id": report.fixture_id,
        "system": report.system.value,
        "phi": report.phi_label,
        "weak_residual": report.weak_residual,
        "quadrature_floor": report.quadrature_floor,
        "extrapolated_defect": report.extrapolated_defect,
        "rate_slope": _slope(report.rate),
        "oracle": _value(oracle),
        "relative_error": relative,
        "tolerance": float(tolerance),
        "verdict": verdict,
    }


def defect_series_rows(report: DefectReport) -> list[Row]:
    return [
        {
            "fixture_id": report.fixture_id,
            "phi": report.phi_label,
            "epsilon": eps,
            "residual": value,
        }
        for eps, value in zip(report.eps_list, report.residuals)
    ]


def energy_series_rows(fixture_id: str, times: np.ndarray, energy: np.ndarray) -> list[Row]:
    return [
        {"fixture_id": fixture_id, "t": float(t), "energy": float(e)}
        for t, e in zip(times, energy)
    ]


class ReportExporter:
    """Write report rows to CSV with the documented column order."""

    def __init__(self, output_dir: str | Path):
        """Initialize the exporter.

        Args:
            output_dir: Directory receiving the CSV files; created on demand.
        """
        self.output_dir = Path(output_dir)

    def to_frame(self, table: str, rows: Iterable[Row]) -> pd.DataFrame:
        """Build the DataFrame for ``table``.

        Raises:
            KeyError: If ``table`` is not a known report table.
        """
        columns = TABLE_COLUMNS[table]
        return pd.DataFrame(list(rows), columns=columns)

    def export(self, table: str, rows: Iterable[Row]) -> Path:
        """Write ``rows`` to ``<output_dir>/<table>.csv`` and return the path."""
        self.output_dir.mkdir(parents=True, exist_ok=True)
        path = self.output_dir / f"{table}.csv"
        frame = self.to_frame(table, rows)
        frame.to_csv(path, index=False)
        logger.info(f"Wrote {len(frame)} rows to {path}")
        return path
