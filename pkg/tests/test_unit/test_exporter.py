"""Tests for report row builders and the CSV exporter."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from analysis.commutators import CommutatorReport, CommutatorSweep, ErrorTerms, IteratedLimit
from analysis.constants import System
from analysis.defect import DefectReport
from analysis.exporter import (
    TABLE_COLUMNS,
    ReportExporter,
    bv_rows,
    commutator_rows,
    defect_row,
    defect_series_rows,
    energy_series_rows,
    field_row,
    rate_row,
)
from analysis.grid import Field
from analysis.rate_fit import fit_power_law


@pytest.fixture
def defect() -> DefectReport:
    """Hand-built report with an oracle-friendly weak residual."""
    return DefectReport(
        fixture_id="shock",
        system=System.COMPRESSIBLE,
        phi_label="bump",
        eps_list=(0.1, 0.2),
        residuals=(-0.5, -0.45),
        extrapolated_defect=-0.55,
        weak_residual=-0.98,
        quadrature_floor=1e-6,
        rate=None,
    )


@pytest.mark.unit
class TestRowBuilders:
    """Test suite for report row construction."""

    def test_field_row_when_built_then_reports_grid_sizes(self, sine_field: Field) -> None:
        """Tests the fields table entry."""
        # Act
        row = field_row("sine", "rho", "fields/sine_rho.bin", sine_field)

        # Assert
        assert list(row) == TABLE_COLUMNS["fields"]
        assert (row["components"], row["n_x"], row["n_t"]) == (1, 64, 32)

    def test_commutator_rows_when_incompressible_then_pressure_terms_missing(self) -> None:
        """Tests NaN for absent terms and the decomposition lookup."""
        # Arrange
        sweep = CommutatorSweep(
            reports=(CommutatorReport(0.1, 1e-3, 2e-3, None, None, 0.5),),
        )

        # Act
        rows = commutator_rows("shear", "inhom-incompressible", "phi", sweep, {0.1: 1e-15})

        # Assert
        assert list(rows[0]) == TABLE_COLUMNS["commutators"]
        assert math.isnan(rows[0]["R3"])
        assert math.isnan(rows[0]["S_int"])
        assert rows[0]["decomposition_residual"] == 1e-15

    def test_rate_row_when_fit_exact_then_slope_missing(self) -> None:
        """Tests that exact fits have no slope."""
        # Arrange
        fit = fit_power_law([0.1, 0.2, 0.3, 0.4], [0.0] * 4)

        # Act
        row = rate_row("still", "phi", "R1", fit, None, 0.1, "exact")

        # Assert
        assert math.isnan(row["slope"])
        assert math.isnan(row["predicted"])
        assert row["verdict"] == "exact"

    def test_bv_rows_when_built_then_cells_precede_extrapolated_rows(self) -> None:
        """Tests row order and the epsilon = 0 marker."""
        # Arrange
        cells = tuple(
            ErrorTerms(eps, 0.125, 1.0, 2.0, 3.0, 4.0, 5.0, quadrature_floor=eps * 1e-9)
            for eps in (0.05, 0.1)
        )
        limit = IteratedLimit(cells, {0.125: (0.1, 0.2, 0.3, 0.4, 0.5)})

        # Act
        rows = bv_rows("bv", "phi", limit)

        # Assert
        assert [r["extrapolated"] for r in rows] == [False, False, True]
        assert rows[-1]["epsilon"] == 0.0
        assert rows[-1]["E5"] == 0.5
        assert rows[0]["quadrature_floor"] == pytest.approx(5e-11)
        assert rows[-1]["quadrature_floor"] == pytest.approx(1e-10)

    def test_defect_row_when_oracle_given_then_relative_error(self, defect: DefectReport) -> None:
        """Tests |weak - oracle| / |oracle|."""
        # Act
        row = defect_row(defect, -1.0, 0.02, "pass")

        # Assert
        assert row["relative_error"] == pytest.approx(0.02)
        assert row["system"] == "compressible"
        assert math.isnan(row["rate_slope"])

    def test_defect_row_when_no_oracle_then_relative_error_missing(
        self, defect: DefectReport
    ) -> None:
        """Tests NaN for fixtures without a closed-form defect."""
        # Act
        row = defect_row(defect, None, 0.02, "exact")

        # Assert
        assert math.isnan(row["oracle"])
        assert math.isnan(row["relative_error"])

    def test_series_rows_when_built_then_one_row_per_sample(self, defect: DefectReport) -> None:
        """Tests defect and energy series expansion."""
        # Act
        defect_rows = defect_series_rows(defect)
        energy_rows = energy_series_rows("still", np.array([0.0, 0.5]), np.array([1.0, 1.0]))

        # Assert
        assert [r["epsilon"] for r in defect_rows] == [0.1, 0.2]
        assert energy_rows[1] == {"fixture_id": "still", "t": 0.5, "energy": 1.0}


@pytest.mark.unit
class TestReportExporter:
    """Test suite for ReportExporter."""

    def test_export_when_rows_given_then_writes_columns_in_order(
        self, temp_output_dir: Path
    ) -> None:
        """Tests the CSV header and round trip of values."""
        # Arrange
        exporter = ReportExporter(temp_output_dir / "out")
        rows = energy_series_rows("still", np.array([0.0, 0.5]), np.array([1.0, 2.0]))

        # Act
        path = exporter.export("energy_series", rows)
        frame = pd.read_csv(path)

        # Assert
        assert path == temp_output_dir / "out" / "energy_series.csv"
        assert list(frame.columns) == TABLE_COLUMNS["energy_series"]
        assert frame["energy"].tolist() == [1.0, 2.0]

    def test_export_when_no_rows_then_header_only(self, temp_output_dir: Path) -> None:
        """Tests that empty tables still carry their header."""
        # Arrange
        exporter = ReportExporter(temp_output_dir)

        # Act
        path = exporter.export("defects", [])

        # Assert
        assert path.read_text().strip() == ",".join(TABLE_COLUMNS["defects"])

    @pytest.mark.edge_case
    def test_to_frame_when_unknown_table_then_raises_key_error(self, temp_output_dir: Path) -> None:
        """Tests that only documented tables can be written."""
        # Act & Assert
        with pytest.raises(KeyError):
            ReportExporter(temp_output_dir).to_frame("trades", [])

    def test_to_frame_when_missing_value_then_written_as_empty_cell(
        self, temp_output_dir: Path
    ) -> None:
        """Tests that NaN becomes an empty CSV cell."""
        # Arrange
        exporter = ReportExporter(temp_output_dir)
        row = rate_row("shock", "phi", "R3", None, None, 0.1, "fail")

        # Act
        path = exporter.export("commutator_rates", [row])

        # Assert
        assert path.read_text().splitlines()[1] == "shock,phi,R3,,,,0.1,fail"
