"""Tests for commutator fields, integrals and the bounded-variation error terms."""

from __future__ import annotations

import numpy as np
import pytest

from analysis.bumps import TestFunction
from analysis.commutators import (
    ERROR_TERMS,
    IteratedLimit,
    bv_error_terms,
    commutator_integrals,
    commutator_norm,
    commutator_sweep,
    decomposition_residual,
    extrapolate_to_zero,
    iterated_limit_sweep,
    mollified_state,
    product_commutator,
    taylor_pressure_bound_check,
)
from analysis.constants import Axes, SpatialShape, System
from analysis.errors import LabError, SupportError
from analysis.fieldsgen import constant_state, travelling_field, triangle_knots
from analysis.grid import Field, Grid, make_grid, sample
from analysis.models import PressureLaw

EPSILONS = [0.125, 0.15625, 0.1875, 0.21875]
TRIANGLE_EPSILONS = [0.015625, 0.0234375, 0.03125, 0.046875]
TRIANGLE_H = [0.0078125, 0.015625, 0.03125, 0.0625]


@pytest.fixture
def phi() -> TestFunction:
    """Spatial bump centred in the box with a time support of (0.25, 0.75)."""
    return TestFunction(t_center=0.5, t_radius=0.25, shape=SpatialShape.BUMP, x_radius=0.25)


@pytest.fixture
def wavy_density(grid_1d: Grid) -> Field:
    """Positive density 1 + 0.5 sin(2 pi x) cos(t)."""
    return sample(lambda t, x: 1.0 + 0.5 * np.sin(2 * np.pi * x) * np.cos(t), grid_1d)


@pytest.mark.unit
class TestProductCommutator:
    """Test suite for pointwise product commutators."""

    def test_product_commutator_when_first_factor_constant_then_vanishes(
        self, constant_field: Field, sine_field: Field
    ) -> None:
        """Tests c^e g^e - (c g)^e = 0."""
        # Act
        commutator = product_commutator(constant_field, sine_field, 0.125)

        # Assert
        assert np.max(np.abs(commutator.values)) < 1e-14

    def test_product_commutator_when_rough_factors_then_nonzero(
        self, sine_field: Field
    ) -> None:
        """Tests that f^e f^e differs from (f^2)^e for a non-constant f."""
        # Act
        commutator = product_commutator(sine_field, sine_field, 0.125)

        # Assert
        assert np.max(np.abs(commutator.values)) > 1e-3

    @pytest.mark.edge_case
    def test_product_commutator_when_first_factor_vector_then_raises_lab_error(
        self, grid_2d: Grid
    ) -> None:
        """Tests that only the second factor may be a vector."""
        # Arrange
        rho, u = constant_state(grid_2d, 1.0, (1.0, 2.0))

        # Act & Assert
        with pytest.raises(LabError):
            product_commutator(u, rho, 0.125)

    @pytest.mark.parametrize("axes", [Axes.SPACE, Axes.SPACETIME])
    def test_decomposition_residual_when_smooth_fields_then_rounding_small(
        self, grid_1d: Grid, sine_field: Field, axes: Axes
    ) -> None:
        """Tests the increment decomposition of the product commutator."""
        # Arrange
        g = sample(lambda t, x: np.cos(6 * np.pi * x) + t, grid_1d)

        # Act
        residual = decomposition_residual(sine_field, g, 0.125, axes)

        # Assert
        assert residual < 1e-12

    def test_commutator_norm_when_constant_then_zero(
        self, constant_field: Field, sine_field: Field
    ) -> None:
        """Tests the L^p norm helper."""
        # Assert
        assert commutator_norm(constant_field, sine_field, 0.125, 2.0) < 1e-14


@pytest.mark.unit
class TestCommutatorIntegrals:
    """Test suite for R1, R2, R3 and S_int."""

    def test_commutator_integrals_when_constant_compressible_state_then_exactly_zero(
        self, grid_1d: Grid, law: PressureLaw, phi: TestFunction
    ) -> None:
        """Tests that constants commute with every mollification."""
        # Arrange
        rho, u = constant_state(grid_1d, 1.3, 0.7)

        # Act
        report = commutator_integrals(System.COMPRESSIBLE, rho, u, law, phi, 0.125)

        # Assert
        assert (report.R1, report.R2, report.R3, report.S_int) == (0.0, 0.0, 0.0, 0.0)
        assert report.pointwise_sup == 0.0
        assert report.total == 0.0

    def test_commutator_integrals_when_incompressible_then_no_pressure_terms(
        self, grid_1d: Grid, phi: TestFunction, wavy_density: Field
    ) -> None:
        """Tests that R3 and S_int are absent without a pressure law."""
        # Arrange
        _, u = constant_state(grid_1d, 1.0, 0.5)
        p = Field(grid_1d, np.ones((grid_1d.n_t, grid_1d.n_x)))

        # Act
        report = commutator_integrals(
            System.INHOMOGENEOUS_INCOMPRESSIBLE, wavy_density, u, p, phi, 0.125
        )

        # Assert
        assert report.R3 is None
        assert report.S_int is None
        assert report.term("R1") == report.R1

    def test_commutator_integrals_when_density_varies_then_mass_commutator_vanishes_for_constant_u(
        self, grid_1d: Grid, law: PressureLaw, phi: TestFunction, wavy_density: Field
    ) -> None:
        """Tests rho^e u - (rho u)^e = 0 for constant velocity."""
        # Arrange
        _, u = constant_state(grid_1d, 1.0, 0.5)

        # Act
        report = commutator_integrals(System.COMPRESSIBLE, wavy_density, u, law, phi, 0.125)

        # Assert
        assert abs(report.R1) < 1e-14
        assert report.pointwise_sup < 1e-14
        assert report.R3 is not None

    @pytest.mark.edge_case
    def test_commutator_integrals_when_support_inside_margin_then_raises_support_error(
        self, grid_1d: Grid, law: PressureLaw
    ) -> None:
        """Tests the (eps, T - eps) support rule."""
        # Arrange
        rho, u = constant_state(grid_1d, 1.0, 0.0)

        # Act & Assert
        with pytest.raises(SupportError):
            commutator_integrals(
                System.COMPRESSIBLE, rho, u, law, TestFunction(0.5, 0.45), 0.125
            )

    @pytest.mark.edge_case
    def test_mollified_state_when_pressure_argument_mismatched_then_raises_lab_error(
        self, grid_1d: Grid
    ) -> None:
        """Tests that the compressible system needs a law."""
        # Arrange
        rho, u = constant_state(grid_1d, 1.0, 0.0)

        # Act & Assert
        with pytest.raises(LabError):
            mollified_state(System.COMPRESSIBLE, rho, u, rho, 0.125)

    def test_commutator_sweep_when_constant_then_every_fit_exact(
        self, grid_1d: Grid, law: PressureLaw, phi: TestFunction
    ) -> None:
        """Tests sweep ordering and exact fits on vanishing series."""
        # Arrange
        rho, u = constant_state(grid_1d, 2.0, -0.3)

        # Act
        sweep = commutator_sweep(System.COMPRESSIBLE, rho, u, law, phi, EPSILONS[::-1])

        # Assert
        assert [r.epsilon for r in sweep.reports] == EPSILONS
        assert set(sweep.fits) == {"R1", "R2", "R3", "S_int"}
        assert all(fit is not None and fit.exact for fit in sweep.fits.values())


@pytest.mark.unit
class TestTaylorBound:
    """Test suite for the empirical Taylor constant of the pressure."""

    def test_taylor_pressure_bound_check_when_quadratic_law_then_equals_kappa(
        self, wavy_density: Field
    ) -> None:
        """Tests that p = kappa rho^2 has remainder exactly kappa (s - s0)^2."""
        # Arrange
        law = PressureLaw(kappa=1.7, gamma=2.0)

        # Act
        constant = taylor_pressure_bound_check(law, wavy_density, 0.125)

        # Assert
        assert constant == pytest.approx(1.7, rel=1e-6)

    def test_taylor_pressure_bound_check_when_constant_density_then_zero(
        self, constant_field: Field, law: PressureLaw
    ) -> None:
        """Tests that no usable pair gives 0."""
        # Assert
        assert taylor_pressure_bound_check(law, constant_field, 0.125) == 0.0


@pytest.mark.unit
class TestBoundedVariationTerms:
    """Test suite for E1..E5 and their iterated limit."""

    def test_bv_error_terms_when_constant_state_then_all_vanish(
        self, grid_1d: Grid, law: PressureLaw
    ) -> None:
        """Tests that constant states produce no error terms."""
        # Arrange
        rho, u = constant_state(grid_1d, 1.5, 0.4)
        phi = TestFunction(t_center=0.5, t_radius=0.25)

        # Act
        terms = bv_error_terms(rho, u, law, phi, 0.0625, 0.125)

        # Assert
        assert all(abs(v) < 1e-14 for v in terms.as_tuple())
        assert terms.h == pytest.approx(0.125)

    @pytest.mark.edge_case
    def test_bv_error_terms_when_support_too_wide_then_raises_support_error(
        self, grid_1d: Grid, law: PressureLaw
    ) -> None:
        """Tests the (h + eps, T - h - eps) support rule."""
        # Arrange
        rho, u = constant_state(grid_1d, 1.0, 0.0)

        # Act & Assert
        with pytest.raises(SupportError):
            bv_error_terms(rho, u, law, TestFunction(0.5, 0.35), 0.0625, 0.125)

    def test_iterated_limit_sweep_when_constant_then_extrapolates_to_zero(
        self, grid_1d: Grid, law: PressureLaw
    ) -> None:
        """Tests one h row over four epsilons."""
        # Arrange
        rho, u = constant_state(grid_1d, 1.0, 1.0)
        phi = TestFunction(t_center=0.5, t_radius=0.2)

        # Act
        limit = iterated_limit_sweep(
            rho, u, law, phi, [0.0625, 0.078125, 0.09375, 0.109375], [0.125]
        )

        # Assert
        assert limit.h_values == (0.125,)
        assert len(limit.terms) == 4
        assert all(abs(v) < 1e-14 for v in limit.extrapolated[0.125])

    def test_extrapolate_to_zero_when_pure_power_then_returns_zero(self) -> None:
        """Tests removal of a leading C s^q error with fitted q."""
        # Arrange
        scales = [0.01, 0.02, 0.04, 0.08]
        values = [-3.0 * s**1.5 for s in scales]

        # Act
        estimate = extrapolate_to_zero(scales, values)

        # Assert
        assert estimate == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.edge_case
    def test_extrapolate_to_zero_when_single_scale_then_returns_value(self) -> None:
        """Tests the fallback to the finest value."""
        # Assert
        assert extrapolate_to_zero([0.1], [0.42]) == 0.42


@pytest.fixture(scope="module")
def triangle_limit() -> IteratedLimit:
    """Iterated limit of Lipschitz triangle waves moving at speed 1/2 on a 256 x 256 lattice."""
    grid = make_grid(1, 256, 256, 0.5)
    xs, ys = zip(*triangle_knots(0.5))

    def wave(offset: float):
        return lambda x: offset + np.interp(x, xs, ys)

    rho = travelling_field(grid, wave(1.0), 0.5)
    u = travelling_field(grid, wave(-0.25), 0.5)
    phi = TestFunction(
        t_center=0.25, t_radius=0.12, shape=SpatialShape.COSINE, wavevector=(1,), amplitude=0.5
    )
    return iterated_limit_sweep(
        rho, u, PressureLaw(kappa=1.0, gamma=2.0), phi, TRIANGLE_EPSILONS, TRIANGLE_H
    )


def _cells(limit: IteratedLimit, h: float) -> list:
    return sorted((c for c in limit.terms if c.h == h), key=lambda c: c.epsilon)


@pytest.mark.unit
@pytest.mark.slow
class TestIteratedLimitOnTriangleWaves:
    """Test suite for the eps -> 0 then h -> 0 limit on continuous BV states."""

    def test_iterated_limit_sweep_when_triangle_waves_then_every_term_converges_in_epsilon(
        self, triangle_limit: IteratedLimit
    ) -> None:
        """Tests that each term approaches its eps -> 0 value at every fixed h."""
        # Arrange
        scale = max(abs(v) for cell in triangle_limit.terms for v in cell.as_tuple())

        # Assert
        assert scale > 1e-8
        assert triangle_limit.quadrature_floor > 0
        for h in triangle_limit.h_values:
            finest, *_, coarsest = _cells(triangle_limit, h)
            for i, term in enumerate(ERROR_TERMS):
                target = triangle_limit.extrapolated[h][i]
                near = abs(finest.as_tuple()[i] - target)
                far = abs(coarsest.as_tuple()[i] - target)
                assert near <= far + 1e-12, f"{term} at h={h}"

    def test_iterated_limit_sweep_when_triangle_waves_then_mass_commutator_term_vanishes_at_fixed_h(
        self, triangle_limit: IteratedLimit
    ) -> None:
        """Tests that E5 shrinks with eps without waiting for h -> 0."""
        # Assert
        for h in triangle_limit.h_values:
            finest, *_, coarsest = _cells(triangle_limit, h)
            assert abs(finest.E5) < abs(coarsest.E5), f"h={h}"

    def test_iterated_limit_sweep_when_triangle_waves_then_limits_shrink_as_h_decreases(
        self, triangle_limit: IteratedLimit
    ) -> None:
        """Tests the second limit: eps -> 0 values fall with h and extrapolate to near zero."""
        # Arrange
        scale = max(abs(v) for cell in triangle_limit.terms for v in cell.as_tuple())
        h_min, h_max = triangle_limit.h_values[0], triangle_limit.h_values[-1]

        # Act
        double = triangle_limit.double_limit

        # Assert
        for i, term in enumerate(ERROR_TERMS):
            fine = abs(triangle_limit.extrapolated[h_min][i])
            coarse = abs(triangle_limit.extrapolated[h_max][i])
            assert fine <= coarse + 1e-3 * scale, term
            assert abs(double[i]) <= 0.1 * scale, term
