"""Isentropic pressure law, pressure potential and energy density/flux pairs.

Pressure follows ``p(rho) = kappa * rho**gamma``. The potential is normalized
at ``rho = 1``::

    P(rho) = rho * int_1^rho p(r) / r**2 dr = kappa (rho**gamma - rho) / (gamma - 1)

so ``P`` is negative on ``(0, 1)``; only energy differences are ever compared.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from loguru import logger
from scipy import integrate

from .constants import System
from .errors import DensityError, GridError, LabError
from .grid import Field, align

# Mollified and time-averaged densities of a non-negative field can land a
# few ulps below zero next to a vacuum region.
DENSITY_ROUNDING: float = 1e-12


@dataclass(frozen=True)
class PressureLaw:
    """``p(rho) = kappa * rho**gamma`` with an optional density floor.

    Attributes:
        kappa: Positive coefficient.
        gamma: Adiabatic exponent; ``gamma >= 2`` admits vacuum, smaller
            exponents need ``floor > 0``.
        floor: Smallest admissible density, or ``None``.
    """

    kappa: float = 1.0
    gamma: float = 2.0
    floor: float | None = None

    def __post_init__(self) -> None:
        if not self.kappa > 0:
            raise LabError(f"kappa must be positive, got {self.kappa}.")
        if not self.gamma > 1:
            raise LabError(f"gamma must exceed 1, got {self.gamma}.")
        if self.floor is not None and not self.floor > 0:
            raise LabError(f"Density floor must be positive, got {self.floor}.")
        if self.gamma < 2 and self.floor is None:
            raise LabError(
                f"gamma={self.gamma} < 2 is not C^2 at vacuum; declare a positive density floor."
            )

    def admissible(self, rho: np.ndarray | float) -> np.ndarray:
        """Validate densities and clip rounding-level negatives to 0.

        Raises:
            DensityError: On negative densities or values below the floor.
        """
        values = np.asarray(rho, dtype=np.float64)
        if values.size == 0:
            return values
        scale = max(1.0, float(np.max(np.abs(values))))
        lowest = float(values.min())
        if lowest < -DENSITY_ROUNDING * scale:
            raise DensityError(f"Negative density {lowest:.6g} is not admissible.")
        if self.floor is not None and lowest < self.floor * (1 - DENSITY_ROUNDING):
            raise DensityError(
                f"Density {lowest:.6g} is below the declared floor {self.floor:.6g}."
            )
        return np.maximum(values, 0.0)

    def p(self, rho: np.ndarray | float) -> np.ndarray:
        r = self.admissible(rho)
        return self.kappa * r**self.gamma

    def dp(self, rho: np.ndarray | float) -> np.ndarray:
        r = self.admissible(rho)
        return self.kappa * self.gamma * r ** (self.gamma - 1)

    def d2p(self, rho: np.ndarray | float) -> np.ndarray:
        r = self.admissible(rho)
        return self.kappa * self.gamma * (self.gamma - 1) * r ** (self.gamma - 2)

    def potential(self, rho: np.ndarray | float) -> np.ndarray:
        r = self.admissible(rho)
        return self.kappa * (r**self.gamma - r) / (self.gamma - 1)

    def dpotential(self, rho: np.ndarray | float) -> np.ndarray:
        r = self.admissible(rho)
        return self.kappa * (self.gamma * r ** (self.gamma - 1) - 1) / (self.gamma - 1)

    def d2potential(self, rho: np.ndarray | float) -> np.ndarray:
        r = self.admissible(rho)
        return self.kappa * self.gamma * r ** (self.gamma - 2)


@dataclass(frozen=True)
class EnergyPair:
    """Energy density ``E`` (scalar) and energy flux ``F`` (d components)."""

    density_field: Field
    flux_field: Field


def _apply(rho: Field, fn) -> Field:
    return rho.with_values(fn(rho.values))


def pressure(law: PressureLaw, rho_field: Field) -> Field:
    """Pointwise ``kappa * rho**gamma``."""
    return _apply(rho_field, law.p)


def pressure_derivs(law: PressureLaw, rho: Field) -> tuple[Field, Field]:
    """``(p'(rho), p''(rho))`` as fields."""
    return _apply(rho, law.dp), _apply(rho, law.d2p)


def pressure_potential(law: PressureLaw, rho_field: Field) -> Field:
    """Closed-form ``P(rho)``; ``P'`` is ``law.dpotential``."""
    return _apply(rho_field, law.potential)


def sound_speed(law: PressureLaw, rho: np.ndarray | float) -> np.ndarray:
    """``c = sqrt(p'(rho))``."""
    return np.sqrt(law.dp(rho))


def potential_by_quadrature(law: PressureLaw, rho: float) -> float:
    """Evaluate ``rho * int_1^rho p(r)/r^2 dr`` with adaptive quadrature."""
    r = float(law.admissible(rho))
    if r == 0.0:
        return 0.0
    value, _ = integrate.quad(
        lambda s: law.kappa * s ** (law.gamma - 2), 1.0, r, epsabs=0.0, epsrel=1e-13
    )
    return r * value


def check_potential_identity(law: PressureLaw, rho_field: Field | np.ndarray) -> float:
    """Max of ``|rho P'(rho) - P(rho) - p(rho)|`` over the samples."""
    values = rho_field.values if isinstance(rho_field, Field) else np.asarray(rho_field)
    r = law.admissible(values)
    residual = np.abs(r * law.dpotential(r) - law.potential(r) - law.p(r))
    return float(residual.max()) if residual.size else 0.0


def kinetic_density(rho: Field, u: Field) -> Field:
    """``1/2 rho |u|^2``."""
    rho, u = align(rho, u)
    return rho.with_values(0.5 * rho.values[..., 0] * np.sum(u.values**2, axis=-1))


def energy_fields(
    system: System | str,
    rho: Field,
    u: Field,
    pressure_or_law: Field | PressureLaw,
) -> EnergyPair:
    """Energy density and flux for either Euler system.

    Args:
        system: ``inhom-incompressible`` takes a sampled pressure field;
            ``compressible`` takes a ``PressureLaw``.
        rho: Scalar density.
        u: Velocity with ``d`` components.
        pressure_or_law: Pressure field or pressure law.

    Returns:
        ``E = 1/2 rho |u|^2 (+ P)`` and ``F = (1/2 rho |u|^2 + p (+ P)) u``.

    Raises:
        GridError: On component-count or grid mismatches.
        LabError: If the pressure argument does not match the system.
    """
    system = System(system)
    if rho.components != 1:
        raise GridError(f"Density must be scalar, got {rho.components} components.")
    if u.components != rho.grid.d:
        raise GridError(
            f"Velocity must have {rho.grid.d} components, got {u.components}."
        )
    if system is System.COMPRESSIBLE:
        if not isinstance(pressure_or_law, PressureLaw):
            raise LabError("The compressible system needs a PressureLaw.")
        rho, u = align(rho, u)
        r = rho.values[..., 0]
        kinetic = 0.5 * r * np.sum(u.values**2, axis=-1)
        potential = pressure_or_law.potential(r)
        density = kinetic + potential
        enthalpy = density + pressure_or_law.p(r)
    else:
        if not isinstance(pressure_or_law, Field):
            raise LabError("The incompressible system needs a sampled pressure field.")
        rho, u, p = align(rho, u, pressure_or_law)
        r = rho.values[..., 0]
        density = 0.5 * r * np.sum(u.values**2, axis=-1)
        enthalpy = density + p.values[..., 0]
    flux = enthalpy[..., np.newaxis] * u.values
    logger.debug(f"Energy fields for {system.value} on window {rho.window}")
    return EnergyPair(rho.with_values(density), rho.with_values(flux))


def predicted_exponents(system: System | str, alpha: float, beta: float) -> dict[str, float]:
    """Decay exponents in ``eps`` of the commutator terms for ``u in B^alpha``
    and ``rho, rho u in B^beta``."""
    quadratic = 2 * alpha + beta - 1
    exponents = {"R1": quadratic, "R2": quadratic}
    if System(system) is System.COMPRESSIBLE:
        mixed = alpha + 2 * beta - 1
        exponents.update(R3=mixed, S=mixed)
    return exponents


def conservation_threshold_met(system: System | str, alpha: float, beta: float) -> bool:
    """Whether ``(alpha, beta)`` lies in the energy-conserving regime."""
    if System(system) is System.COMPRESSIBLE:
        return beta > max(1 - 2 * alpha, (1 - alpha) / 2)
    return 2 * alpha + beta > 1

