"""Weak-form energy balance residuals, total energy series and rate verdicts.

The weak residual of a pair ``(E, F)`` against a test function is::

    residual = -int int [E d_t phi + F . grad phi] dx dt = <d_t E + div F, phi>

so a dissipating shock gives a negative value for ``phi >= 0`` and a
conservative state gives zero up to quadrature error.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from loguru import logger

from .bumps import SupportsTestFunction, check_time_support
from .commutators import (
    MollifiedState,
    commutator_terms,
    extrapolate_to_zero,
    fit_term,
    mollified_state,
    rectangle_floor,
)
from .constants import System, Verdict
from .errors import LabError
from .fieldsgen import SHOCK_POSITION, ShockStates
from .grid import Field, Grid, align, integrate
from .models import EnergyPair, PressureLaw, energy_fields
from .rate_fit import RateFit, fit_power_law

DEFAULT_SLOPE_TOLERANCE: float = 0.1


def _window_support(phi: SupportsTestFunction, field: Field) -> None:
    grid = field.grid
    check_time_support(phi, grid, field.t_start * grid.dt, grid.T - field.t_stop * grid.dt)


def _pairing_density(pair: EnergyPair, phi: SupportsTestFunction) -> tuple[Grid, np.ndarray]:
    """Integrand ``E d_t phi + F . grad phi`` on the common window."""
    density, flux = align(pair.density_field, pair.flux_field)
    samples = phi.evaluate(density.grid, density.t_start, density.t_stop)
    integrand = density.values[..., 0] * samples.dphi_dt + np.sum(
        flux.values * samples.grad_phi, axis=-1
    )
    return density.grid, integrand


def energy_pair_residual(pair: EnergyPair, phi: SupportsTestFunction) -> float:
    """``-int int [E d_t phi + F . grad phi]`` by the rectangle rule."""
    _window_support(phi, pair.density_field)
    grid, integrand = _pairing_density(pair, phi)
    return -float(np.sum(integrand) * grid.cell_volume * grid.dt)


def weak_energy_residual(
    system: System | str,
    rho: Field,
    u: Field,
    law_or_p: Field | PressureLaw,
    phi: SupportsTestFunction,
) -> float:
    """Signed weak residual of the local energy balance.

    Args:
        system: Euler system.
        rho: Density.
        u: Velocity.
        law_or_p: Pressure law (compressible) or sampled pressure.
        phi: Test function supported inside the fields' time window.

    Returns:
        ``<d_t E + div F, phi>``; negative for dissipation against ``phi >= 0``.

    Raises:
        SupportError: If ``phi`` reaches outside the valid window.
    """
    pair = energy_fields(system, rho, u, law_or_p)
    residual = energy_pair_residual(pair, phi)
    logger.debug(f"Weak energy residual ({System(system).value}) = {residual:.6e}")
    return residual


def quadrature_floor(
    density: Field, flux: Field, phi: SupportsTestFunction
) -> float:
    """Rectangle-rule floor for the weak residual of ``(density, flux)``.

    The sum of the difference between the full-grid rule and the rule on
    every other sample in each axis, and a rounding term proportional to
    ``int |E d_t phi| + |F . grad phi|``.
    """
    grid, integrand = _pairing_density(EnergyPair(density, flux), phi)
    return rectangle_floor(grid, integrand)


def _mollified_pair_integral(state: MollifiedState, phi: SupportsTestFunction) -> float:
    """``int [E^e d_t phi + F^e . grad phi]`` built from mollified fields.

    ``E^e = 1/2 rho^e |u^e|^2 (+ P(rho^e))`` and
    ``F^e = 1/2 |u^e|^2 m^e + (p + P) u^e`` where ``p`` is ``p(rho^e)``
    (compressible) or ``p^e`` (incompressible).
    """
    grid = state.grid
    samples = phi.evaluate(grid, state.t_start, state.t_stop)
    speed_sq = np.sum(state.u**2, axis=-1)
    density = 0.5 * state.rho * speed_sq
    enthalpy = state.pressure
    if state.law is not None:
        potential = state.law.potential(state.rho)
        density = density + potential
        enthalpy = enthalpy + potential
    flux = 0.5 * speed_sq[..., np.newaxis] * state.m + enthalpy[..., np.newaxis] * state.u
    integrand = density * samples.dphi_dt + np.sum(flux * samples.grad_phi, axis=-1)
    return float(np.sum(integrand) * grid.cell_volume * grid.dt)


def mollified_energy_identity_residual(
    system: System | str,
    rho: Field,
    u: Field,
    law_or_p: Field | PressureLaw,
    phi: SupportsTestFunction,
    epsilon: float,
) -> float:
    """Discretization residual of the mollified energy identity.

    In the continuum ``int [E^e d_t phi + F^e . grad phi] + R1 + R2 (+ R3 + S) = 0``
    for every weak solution; the returned value is the left-hand side.
    """
    check_time_support(phi, rho.grid, epsilon, epsilon)
    state = mollified_state(system, rho, u, law_or_p, epsilon)
    report = commutator_terms(state, phi)
    residual = _mollified_pair_integral(state, phi) + report.total
    logger.debug(f"Mollified identity residual eps={epsilon:.5g}: {residual:.3e}")
    return residual


def mollified_weak_residual(
    system: System | str,
    rho: Field,
    u: Field,
    law_or_p: Field | PressureLaw,
    phi: SupportsTestFunction,
    epsilon: float,
) -> float:
    """Weak residual of the mollified energy pair ``(E^e, F^e)``."""
    check_time_support(phi, rho.grid, epsilon, epsilon)
    state = mollified_state(system, rho, u, law_or_p, epsilon)
    return -_mollified_pair_integral(state, phi)


def total_energy_series(
    system: System | str,
    rho: Field,
    u: Field,
    law_or_none: PressureLaw | None = None,
) -> np.ndarray:
    """Spatial integral of the energy density per valid time row.

    The kinetic density is ``1/2 |rho u|^2 / rho`` where ``rho > 0`` and 0 on
    vacuum cells; the compressible system adds ``P(rho)``.
    """
    system = System(system)
    rho, u = align(rho, u)
    r = rho.values[..., 0]
    momentum_sq = np.sum((r[..., np.newaxis] * u.values) ** 2, axis=-1)
    kinetic = 0.5 * np.divide(momentum_sq, r, out=np.zeros_like(r), where=r > 0)
    if system is System.COMPRESSIBLE:
        if law_or_none is None:
            raise LabError("The compressible energy needs a PressureLaw.")
        kinetic = kinetic + law_or_none.potential(r)
    return np.asarray(integrate(rho.with_values(kinetic), "space"))


@dataclass(frozen=True)
class RateVerdict:
    """A rate fit judged against a predicted slope.

    ``verdict`` is ``exact`` when every value vanished, ``pass`` when the
    fitted slope is at least ``predicted_slope - tolerance`` (or within
    ``tolerance`` for two-sided checks) and ``fail`` otherwise.
    """

    fit: RateFit
    predicted_slope: float
    tolerance: float
    verdict: Verdict

    @property
    def deviation(self) -> float:
        return self.fit.slope - self.predicted_slope


def rate_fit(
    eps_values: Sequence[float],
    values: Sequence[float],
    predicted_slope: float,
    tolerance: float = DEFAULT_SLOPE_TOLERANCE,
    two_sided: bool = False,
) -> RateVerdict:
    """Fit ``|values| ~ eps^slope`` and compare with ``predicted_slope``.

    Raises:
        RateFitError: On fewer than four points or a zero/positive mixture.
    """
    fit = fit_power_law(eps_values, [abs(v) for v in values])
    if fit.exact:
        verdict = Verdict.EXACT
    else:
        gap = fit.slope - predicted_slope
        ok = abs(gap) <= tolerance if two_sided else gap >= -tolerance
        verdict = Verdict.PASS if ok else Verdict.FAIL
    return RateVerdict(fit, float(predicted_slope), float(tolerance), verdict)


@dataclass(frozen=True)
class DefectReport:
    """Energy-defect measurement for one fixture and test function.

    Attributes:
        fixture_id: Fixture identifier.
        system: Euler system.
        phi_label: Test-function identifier.
        eps_list: Radii, ascending.
        residuals: Weak residual of the mollified pair per radius.
        extrapolated_defect: ``eps -> 0`` estimate of the defect.
        weak_residual: Weak residual of the unmollified pair.
        quadrature_floor: Floor of ``weak_residual``.
        rate: Fit of ``|residuals|`` on the four finest radii, if any.
    """

    fixture_id: str
    system: System
    phi_label: str
    eps_list: tuple[float, ...]
    residuals: tuple[float, ...]
    extrapolated_defect: float
    weak_residual: float
    quadrature_floor: float
    rate: RateFit | None


def defect_report(
    fixture_id: str,
    system: System | str,
    rho: Field,
    u: Field,
    law_or_p: Field | PressureLaw,
    phi: SupportsTestFunction,
    eps_list: Sequence[float],
    phi_label: str = "phi",
) -> DefectReport:
    """Measure the energy defect of a fixture against ``phi`` over ``eps_list``."""
    system = System(system)
    eps_sorted = tuple(sorted(float(e) for e in eps_list))
    residuals = tuple(
        mollified_weak_residual(system, rho, u, law_or_p, phi, eps) for eps in eps_sorted
    )
    pair = energy_fields(system, rho, u, law_or_p)
    weak = energy_pair_residual(pair, phi)
    floor = quadrature_floor(pair.density_field, pair.flux_field, phi)
    rate = fit_term(eps_sorted, residuals, f"{fixture_id} defect") if len(eps_sorted) >= 4 else None
    extrapolated = extrapolate_to_zero(eps_sorted, residuals)
    logger.info(
        f"Defect {fixture_id}/{phi_label}: weak={weak:.6e} (floor {floor:.1e}), "
        f"extrapolated={extrapolated:.6e}"
    )
    return DefectReport(
        fixture_id=fixture_id,
        system=system,
        phi_label=phi_label,
        eps_list=eps_sorted,
        residuals=residuals,
        extrapolated_defect=extrapolated,
        weak_residual=weak,
        quadrature_floor=floor,
        rate=rate,
    )


def shock_pairing(states: ShockStates, phi: SupportsTestFunction, grid: Grid) -> float:
    """``D * int phi(t, 1/2) dt`` by the rectangle rule on the grid's time rows."""
    values = phi.values_at(grid.times, (SHOCK_POSITION,) * grid.d)
    return states.dissipation_rate * float(np.sum(values) * grid.dt)


def dissipation_matches(
    residual: float, expected: float, tolerance: float
) -> Verdict:
    """``pass`` when ``residual`` is within ``tolerance`` (relative) of ``expected``."""
    if expected == 0:
        return Verdict.EXACT if residual == 0 else Verdict.FAIL
    return Verdict.PASS if abs(residual - expected) <= tolerance * abs(expected) else Verdict.FAIL
