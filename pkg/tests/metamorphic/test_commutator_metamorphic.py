"""Metamorphic relations for commutators and weak energy residuals."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from analysis.bumps import TestFunction
from analysis.commutators import product_commutator
from analysis.constants import Axes, System
from analysis.defect import energy_pair_residual, weak_energy_residual
from analysis.grid import Field, shift_field
from analysis.models import PressureLaw, energy_fields

from .conftest import GRID, bump_test_functions, lattice_shifts, radii, trig_fields

pytestmark = pytest.mark.metamorphic

LAW = PressureLaw(kappa=1.0, gamma=2.0)
coefficients = st.floats(min_value=-3.0, max_value=3.0)


@given(
    f=trig_fields(offset=1.0),
    g1=trig_fields(),
    g2=trig_fields(),
    a=coefficients,
    b=coefficients,
    epsilon=radii(),
)
def test_product_commutator_is_linear_in_second_factor(
    f: Field, g1: Field, g2: Field, a: float, b: float, epsilon: float
) -> None:
    """Given a scalar factor and two second factors,
    when the commutator of a linear combination is taken,
    then it equals the same combination of the two commutators.
    """
    combined = product_commutator(f, g1.scale(a) + g2.scale(b), epsilon, Axes.SPACETIME)
    separate = (
        product_commutator(f, g1, epsilon, Axes.SPACETIME).scale(a)
        + product_commutator(f, g2, epsilon, Axes.SPACETIME).scale(b)
    )

    np.testing.assert_allclose(combined.values, separate.values, rtol=0, atol=1e-12)


@given(f=trig_fields(offset=1.0), g=trig_fields(), c=coefficients, epsilon=radii())
def test_product_commutator_is_homogeneous_in_first_factor(
    f: Field, g: Field, c: float, epsilon: float
) -> None:
    """Given a commutator and one with the first factor scaled by ``c``,
    then the second is ``c`` times the first.
    """
    scaled = product_commutator(f.scale(c), g, epsilon)
    base = product_commutator(f, g, epsilon)

    np.testing.assert_allclose(scaled.values, c * base.values, rtol=0, atol=1e-12)


@given(
    rho=trig_fields(offset=1.0),
    u=trig_fields(),
    phi1=bump_test_functions(),
    phi2=bump_test_functions(),
    weight=coefficients,
)
def test_weak_residual_is_linear_in_test_function(
    rho: Field, u: Field, phi1: TestFunction, phi2: TestFunction, weight: float
) -> None:
    """Given one energy pair and two test functions,
    when the residual is paired with ``phi1 + w phi2``,
    then it equals the sum of the separate pairings.
    """
    pair = energy_fields(System.COMPRESSIBLE, rho, u, LAW)

    combined = energy_pair_residual(pair, phi1 + weight * phi2)
    separate = energy_pair_residual(pair, phi1) + weight * energy_pair_residual(pair, phi2)

    assert combined == pytest.approx(separate, rel=1e-10, abs=1e-12)


@given(rho=trig_fields(offset=1.0), u=trig_fields(), phi=bump_test_functions(), k=lattice_shifts())
def test_weak_residual_is_translation_invariant(
    rho: Field, u: Field, phi: TestFunction, k: int
) -> None:
    """Given a state translated by ``k`` cells and a test function moved back,
    when the weak energy residuals are compared,
    then they agree.
    """
    moved_phi = TestFunction(
        t_center=phi.t_center,
        t_radius=phi.t_radius,
        shape=phi.shape,
        x_center=((phi.x_center[0] - k * GRID.dx) % 1.0,),
        x_radius=phi.x_radius,
    )

    original = weak_energy_residual(System.COMPRESSIBLE, rho, u, LAW, phi)
    translated = weak_energy_residual(
        System.COMPRESSIBLE, shift_field(rho, (0, k)), shift_field(u, (0, k)), LAW, moved_phi
    )

    assert translated == pytest.approx(original, rel=1e-9, abs=1e-10)
