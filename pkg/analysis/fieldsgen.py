"""Exact solutions and synthetic fields with known regularity.

Exact solutions (constant states, stationary shears, stationary shocks) are
the ground truth for energy balances; the synthetic profiles (Weierstrass
series, steps, sawtooth, piecewise-linear knots, travelling waves) carry a
prescribed Besov exponent for the regularity and commutator fits.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from loguru import logger

from .constants import Axes
from .errors import DensityError, GridError, LabError, ShockAdmissibilityError
from .grid import Field, Grid, sample
from .models import PressureLaw, sound_speed

Profile = Callable[[np.ndarray], np.ndarray]

SHOCK_POSITION: float = 0.5


def _velocity_tuple(u0: float | Sequence[float], d: int) -> tuple[float, ...]:
    values = (float(u0),) if np.isscalar(u0) else tuple(float(v) for v in u0)  # type: ignore[arg-type]
    if len(values) == 1 and d > 1:
        values = values + (0.0,) * (d - 1)
    if len(values) != d:
        raise GridError(f"Expected {d} velocity components, got {len(values)}.")
    return values


def constant_state(
    grid: Grid, rho0: float, u0: float | Sequence[float] = 0.0
) -> tuple[Field, Field]:
    """Constant density and velocity; an exact solution of both systems.

    Raises:
        DensityError: If ``rho0 < 0``.
    """
    if rho0 < 0:
        raise DensityError(f"Density must be non-negative, got {rho0}.")
    shape = (grid.n_t, *grid.spatial_shape)
    velocity = _velocity_tuple(u0, grid.d)
    rho = Field(grid, np.full(shape, float(rho0)))
    u = Field(grid, np.stack([np.full(shape, v) for v in velocity], axis=-1))
    return rho, u


def stationary_shear(
    grid: Grid,
    rho_profile: Profile,
    v_profile: Profile,
    pressure: float = 0.0,
) -> tuple[Field, Field, Field]:
    """Shear flow ``u = (v(x2), 0)``, ``rho = rho(x2)``, constant pressure.

    Divergence-free and annihilating every nonlinear term, this is an exact
    weak solution of the inhomogeneous incompressible system for any bounded
    profiles.

    Args:
        grid: Two-dimensional grid.
        rho_profile: Density as a function of ``x2``.
        v_profile: Horizontal velocity as a function of ``x2``.
        pressure: Constant pressure value.

    Returns:
        ``(rho, u, p)``.

    Raises:
        GridError: If ``grid.d != 2``.
    """
    if grid.d != 2:
        raise GridError(f"Shear flows need d=2, got d={grid.d}.")
    rho = sample(lambda t, x1, x2: rho_profile(x2), grid)
    if float(rho.values.min()) < 0:
        raise DensityError("Shear density profile takes negative values.")
    u = sample(
        lambda t, x1, x2: (v_profile(x2), 0.0),
        grid,
        components=2,
    )
    p = Field(grid, np.full((grid.n_t, *grid.spatial_shape), float(pressure)))
    return rho, u, p


@dataclass(frozen=True)
class ShockStates:
    """Stationary shock data on either side of ``x = 1/2``.

    Attributes:
        rho_left: Upstream density.
        rho_right: Downstream density.
        u_left: Upstream velocity.
        u_right: Downstream velocity.
        mass_flux: ``m = rho_left u_left = rho_right u_right``.
        dissipation_rate: ``[(1/2 rho u^2 + P + p) u]`` from left to right.
    """

    rho_left: float
    rho_right: float
    u_left: float
    u_right: float
    mass_flux: float
    dissipation_rate: float


class ShockSolution(NamedTuple):
    states: ShockStates
    rho: Field
    u: Field


def _energy_flux(law: PressureLaw, rho: float, u: float) -> float:
    r = np.asarray(rho)
    return float((0.5 * rho * u**2 + law.potential(r) + law.p(r)) * u)


def solve_shock_states(
    law: PressureLaw, rho_left: float, rho_right: float, allow_reversed: bool = False
) -> ShockStates:
    """Solve the jump conditions of a stationary shock with ``m > 0``.

    Mass and momentum conservation give
    ``m^2 = rho_L rho_R (p_R - p_L) / (rho_R - rho_L)``.

    Args:
        law: Pressure law.
        rho_left: Upstream density.
        rho_right: Downstream density.
        allow_reversed: Accept ``rho_left > rho_right`` (an energy-producing
            discontinuity) for sign checks.

    Raises:
        ShockAdmissibilityError: For equal densities, non-positive densities,
            or a non-admissible ordering.
    """
    if not (rho_left > 0 and rho_right > 0):
        raise ShockAdmissibilityError("Shock densities must be positive.")
    if rho_left == rho_right:
        raise ShockAdmissibilityError("Equal densities carry no shock.")
    if rho_left > rho_right and not allow_reversed:
        raise ShockAdmissibilityError(
            f"rho_left={rho_left} > rho_right={rho_right} is not admissible; "
            f"pass allow_reversed=True for an energy-producing jump."
        )
    p_left = float(law.p(rho_left))
    p_right = float(law.p(rho_right))
    m = math.sqrt(rho_left * rho_right * (p_right - p_left) / (rho_right - rho_left))
    u_left, u_right = m / rho_left, m / rho_right
    if not allow_reversed:
        c_left = float(sound_speed(law, rho_left))
        c_right = float(sound_speed(law, rho_right))
        if not (u_left > c_left and u_right < c_right):
            raise ShockAdmissibilityError(
                f"Shock is not supersonic-to-subsonic: u_L={u_left:.6g}, c_L={c_left:.6g}, "
                f"u_R={u_right:.6g}, c_R={c_right:.6g}."
            )
    dissipation = _energy_flux(law, rho_right, u_right) - _energy_flux(law, rho_left, u_left)
    logger.debug(f"Shock rho_L={rho_left}, rho_R={rho_right}: m={m:.6g}, D={dissipation:.6g}")
    return ShockStates(rho_left, rho_right, u_left, u_right, m, dissipation)


def stationary_shock(
    law: PressureLaw,
    rho_left: float,
    rho_right: float,
    grid: Grid,
    allow_reversed: bool = False,
) -> ShockSolution:
    """Shock states sampled as a single jump at ``x = 1/2`` on a 1D grid.

    The periodic seam at ``x = 0`` also jumps; test functions must stay away
    from it.
    """
    if grid.d != 1:
        raise GridError(f"Stationary shocks are sampled on 1D grids, got d={grid.d}.")
    states = solve_shock_states(law, rho_left, rho_right, allow_reversed)
    left = grid.positions < SHOCK_POSITION
    shape = (grid.n_t, grid.n_x)
    rho_row = np.where(left, states.rho_left, states.rho_right)
    u_row = np.where(left, states.u_left, states.u_right)
    rho = Field(grid, np.broadcast_to(rho_row, shape))
    u = Field(grid, np.broadcast_to(u_row, shape))
    return ShockSolution(states, rho, u)


def rankine_hugoniot_residuals(states: ShockStates, law: PressureLaw) -> tuple[float, float]:
    """``([rho u], [rho u^2 + p])`` across the shock."""
    mass = states.rho_right * states.u_right - states.rho_left * states.u_left
    momentum = (
        states.rho_right * states.u_right**2
        + float(law.p(states.rho_right))
        - states.rho_left * states.u_left**2
        - float(law.p(states.rho_left))
    )
    return mass, momentum


def _weierstrass_series(
    coordinate: np.ndarray, alpha: float, phases: np.ndarray
) -> np.ndarray:
    total = np.zeros_like(coordinate, dtype=np.float64)
    for k, phase in enumerate(phases):
        total = total + 2.0 ** (-k * alpha) * np.cos(2 * np.pi * 2.0**k * coordinate + phase)
    return total


def weierstrass_profile(alpha: float, n_terms: int, seed: int = 0) -> Profile:
    """One-dimensional periodic lacunary series with phases from ``default_rng(seed)``."""
    if not 0 < alpha < 1:
        raise LabError(f"Weierstrass exponent must lie in (0, 1), got {alpha}.")
    if n_terms < 0:
        raise LabError(f"n_terms must be non-negative, got {n_terms}.")
    phases = np.random.default_rng(seed).uniform(0.0, 2 * np.pi, size=n_terms + 1)
    return lambda x: _weierstrass_series(np.asarray(x, dtype=np.float64), alpha, phases)


def weierstrass_field(
    grid: Grid,
    alpha: float,
    n_terms: int,
    phase_seed: int = 0,
    axes: Axes | str = Axes.SPACE,
) -> Field:
    """Lacunary series ``sum_k 2^(-k alpha) cos(2 pi 2^k x + phi_k)``, k = 0..n_terms.

    Spatial axes each get an independent series and are summed; the
    ``spacetime`` variant adds a series in ``t/T``. Phases are drawn from
    ``numpy.random.default_rng(phase_seed)``.

    Raises:
        LabError: If ``alpha`` is outside ``(0, 1)``.
        GridError: If ``2^n_terms`` exceeds a quarter of the samples on any
            axis the series varies along.
    """
    if not 0 < alpha < 1:
        raise LabError(f"Weierstrass exponent must lie in (0, 1), got {alpha}.")
    if n_terms < 0:
        raise LabError(f"n_terms must be non-negative, got {n_terms}.")
    spacetime = Axes(axes) is Axes.SPACETIME
    top = 2**n_terms
    limit = min(grid.n_x, grid.n_t) if spacetime else grid.n_x
    if top > limit // 4:
        raise GridError(
            f"Top frequency 2^{n_terms}={top} is under-resolved; need at most {limit // 4}."
        )
    rng = np.random.default_rng(phase_seed)
    phases = rng.uniform(0.0, 2 * np.pi, size=(grid.d + int(spacetime), n_terms + 1))

    def series(t: np.ndarray, *xs: np.ndarray) -> np.ndarray:
        total = 0 * t
        for axis, x in enumerate(xs):
            total = total + _weierstrass_series(x, alpha, phases[axis])
        if spacetime:
            total = total + _weierstrass_series(t / grid.T, alpha, phases[grid.d])
        return total

    logger.debug(
        f"Weierstrass field alpha={alpha}, n_terms={n_terms}, seed={phase_seed}, axes={Axes(axes).value}"
    )
    return sample(series, grid)


def _profile_field(grid: Grid, profile: Profile) -> Field:
    """Time-independent field varying along ``x1`` only."""
    return sample(lambda t, *xs: profile(xs[0]), grid)


def _validate_knots(knots: Sequence[tuple[float, float]]) -> tuple[np.ndarray, np.ndarray]:
    xs = np.array([k[0] for k in knots], dtype=np.float64)
    ys = np.array([k[1] for k in knots], dtype=np.float64)
    if xs.size < 2:
        raise LabError("A piecewise-linear profile needs at least two knots.")
    if xs[0] != 0.0 or xs[-1] != 1.0 or np.any(np.diff(xs) <= 0):
        raise LabError("Knot positions must increase strictly from 0 to 1.")
    if ys[0] != ys[-1]:
        raise LabError(
            f"Knots leave a jump of {ys[-1] - ys[0]:.6g} at the periodic seam; "
            f"the profile must be continuous."
        )
    return xs, ys


def knots_total_variation(knots: Sequence[tuple[float, float]]) -> float:
    """Closed-form total variation of a continuous piecewise-linear profile."""
    _, ys = _validate_knots(knots)
    return float(np.sum(np.abs(np.diff(ys))))


def continuous_bv_field(grid: Grid, knots: Sequence[tuple[float, float]]) -> Field:
    """Continuous periodic piecewise-linear profile through ``knots`` along ``x1``.

    Args:
        grid: Target grid.
        knots: ``(x, value)`` pairs from ``x = 0`` to ``x = 1`` with equal end
            values.

    Raises:
        LabError: If the knots are unordered or leave a jump at the seam.
    """
    xs, ys = _validate_knots(knots)
    return _profile_field(grid, lambda x: np.interp(x, xs, ys))


def triangle_knots(amplitude: float = 1.0) -> tuple[tuple[float, float], ...]:
    """Symmetric triangle wave between ``-amplitude`` and ``amplitude``."""
    return ((0.0, -amplitude), (0.5, amplitude), (1.0, -amplitude))


def step_profile(a: float = 0.25, b: float = 0.75, low: float = 0.0, high: float = 1.0) -> Profile:
    """Indicator-type profile: ``high`` on ``[a, b)`` and ``low`` elsewhere (periodic)."""
    if not 0 <= a < b <= 1:
        raise LabError(f"Step interval must satisfy 0 <= a < b <= 1, got [{a}, {b}).")
    return lambda x: np.where((np.mod(x, 1.0) >= a) & (np.mod(x, 1.0) < b), high, low)


def sawtooth_profile(slope: float = 2.0) -> Profile:
    """Ramp ``slope * (x - 1/2)`` on ``[0, 1)`` with one jump at the seam."""
    return lambda x: slope * (np.mod(x, 1.0) - 0.5)


def step_field(grid: Grid, a: float = 0.25, b: float = 0.75, low: float = 0.0, high: float = 1.0) -> Field:
    return _profile_field(grid, step_profile(a, b, low, high))


def sawtooth_field(grid: Grid, slope: float = 2.0) -> Field:
    return _profile_field(grid, sawtooth_profile(slope))


def travelling_field(grid: Grid, profile: Profile, speed: float) -> Field:
    """``w(t, x) = profile(x1 - speed * t)`` (periodic); not a solution in general."""
    return sample(
        lambda t, *xs: profile(np.mod(xs[0] - speed * t, 1.0)),
        grid,
    )


def vacuum_band(
    grid: Grid,
    band: tuple[float, float] = (0.4, 0.6),
    u0: float | Sequence[float] = 1.0,
    rho_outside: float = 1.0,
) -> tuple[Field, Field]:
    """Density 0 on ``x1 in [band)`` and ``rho_outside`` elsewhere.

    The velocity is ``u0`` inside the vacuum band and 0 outside, so the
    momentum vanishes identically and the state is stationary.
    """
    a, b = band
    rho = _profile_field(grid, step_profile(a, b, low=rho_outside, high=0.0))
    inside = step_profile(a, b, low=0.0, high=1.0)
    velocity = _velocity_tuple(u0, grid.d)
    u = sample(lambda t, *xs: tuple(v * inside(xs[0]) for v in velocity), grid, components=grid.d)
    return rho, u
