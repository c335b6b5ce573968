"""Tests for log-log power-law fits and Richardson extrapolation."""

from __future__ import annotations

import math

import numpy as np
import pytest

from analysis.errors import RateFitError
from analysis.rate_fit import extrapolate_limit, fit_power_law, richardson_extrapolate

SCALES = [0.01, 0.02, 0.04, 0.08]


@pytest.mark.unit
class TestFitPowerLaw:
    """Test suite for fit_power_law."""

    @pytest.mark.parametrize("slope", [0.25, 1.0, 2.5])
    def test_fit_power_law_when_exact_power_then_recovers_slope(self, slope: float) -> None:
        """Tests exact recovery of C * s^slope."""
        # Arrange
        values = [3.0 * s**slope for s in SCALES]

        # Act
        fit = fit_power_law(SCALES, values)

        # Assert
        assert fit.slope == pytest.approx(slope, abs=1e-12)
        assert fit.intercept == pytest.approx(math.log(3.0), abs=1e-10)
        assert fit.r_squared == pytest.approx(1.0)
        assert fit.residual < 1e-12

    def test_fit_power_law_when_all_zero_then_exact(self) -> None:
        """Tests that identically vanishing series skip the fit."""
        # Act
        fit = fit_power_law(SCALES, [0.0] * 4)

        # Assert
        assert fit.exact
        assert math.isnan(fit.slope)

    def test_fit_power_law_when_noisy_then_r_squared_below_one(self) -> None:
        """Tests that scatter lowers the coefficient of determination."""
        # Arrange
        values = [s * f for s, f in zip(SCALES, [1.0, 1.6, 0.7, 1.3])]

        # Act
        fit = fit_power_law(SCALES, values)

        # Assert
        assert 0.0 <= fit.r_squared < 1.0
        assert fit.residual > 0

    @pytest.mark.edge_case
    @pytest.mark.parametrize(
        ("scales", "values", "match"),
        [
            (SCALES[:3], [1.0, 2.0, 3.0], "at least"),
            (SCALES, [1.0, 2.0, 3.0], "values"),
            (SCALES, [0.0, 1.0, 2.0, 3.0], "mix"),
            ([0.0, 0.1, 0.2, 0.3], [1.0, 2.0, 3.0, 4.0], "positive"),
            (SCALES, [1.0, np.nan, 2.0, 3.0], "finite"),
        ],
    )
    def test_fit_power_law_when_input_invalid_then_raises_rate_fit_error(
        self, scales: list[float], values: list[float], match: str
    ) -> None:
        """Tests every rejected input shape."""
        # Act & Assert
        with pytest.raises(RateFitError, match=match):
            fit_power_law(scales, values)


@pytest.mark.unit
class TestRichardson:
    """Test suite for richardson_extrapolate."""

    def test_richardson_extrapolate_when_leading_error_known_then_removes_it(self) -> None:
        """Tests that L + C s^q extrapolates to L."""
        # Arrange
        limit, c, q = -0.75, 2.0, 1.5
        values = (limit + c * 0.01**q, limit + c * 0.02**q)

        # Act
        estimate = richardson_extrapolate((0.01, 0.02), values, q)

        # Assert
        assert estimate == pytest.approx(limit, abs=1e-12)

    @pytest.mark.edge_case
    def test_richardson_extrapolate_when_order_not_positive_then_raises(self) -> None:
        """Tests that a non-decaying error cannot be eliminated."""
        # Act & Assert
        with pytest.raises(RateFitError):
            richardson_extrapolate((0.01, 0.02), (1.0, 2.0), 0.0)

    @pytest.mark.edge_case
    def test_richardson_extrapolate_when_scales_equal_then_raises(self) -> None:
        """Tests that two identical scales carry no information."""
        # Act & Assert
        with pytest.raises(RateFitError, match="distinct"):
            richardson_extrapolate((0.01, 0.01), (1.0, 1.0), 1.0)


@pytest.mark.unit
class TestExtrapolateLimit:
    """Test suite for extrapolate_limit."""

    @pytest.mark.parametrize(("limit", "order"), [(0.7, 2.0), (-0.05, 1.0), (0.0, 1.5)])
    def test_extrapolate_limit_when_offset_power_then_recovers_offset(
        self, limit: float, order: float
    ) -> None:
        """Tests that a nonzero limit is found where a fit of |values| would not apply."""
        # Arrange
        scales = [0.015625, 0.0234375, 0.03125, 0.046875]
        values = [limit - 3.0 * s**order for s in scales]

        # Act
        estimate = extrapolate_limit(scales, values)

        # Assert
        assert estimate == pytest.approx(limit, abs=1e-6)

    @pytest.mark.edge_case
    def test_extrapolate_limit_when_two_samples_then_returns_finest(self) -> None:
        """Tests the fallback for too short a series."""
        # Act & Assert
        assert extrapolate_limit([0.2, 0.1], [5.0, 3.0]) == 3.0

    @pytest.mark.edge_case
    def test_extrapolate_limit_when_constant_then_returns_constant(self) -> None:
        """Tests that a flat series is its own limit."""
        # Act & Assert
        assert extrapolate_limit([0.1, 0.2, 0.3, 0.4], [0.25] * 4) == 0.25

    @pytest.mark.edge_case
    def test_extrapolate_limit_when_lengths_differ_then_raises_rate_fit_error(self) -> None:
        """Tests input validation."""
        # Act & Assert
        with pytest.raises(RateFitError):
            extrapolate_limit([0.1, 0.2, 0.3], [1.0, 2.0])
