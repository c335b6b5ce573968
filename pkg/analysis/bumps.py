"""Bump profiles and closed-form test functions.

The standard bump ``r -> exp(-1/(1-r^2))`` is shared by the mollification
kernels and by test functions. Test functions are products of a compactly
supported time bump and a smooth periodic spatial factor; all derivatives
are analytic.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import NamedTuple, Protocol

import numpy as np

from .constants import SpatialShape
from .errors import SupportError
from .grid import Grid


def bump(r: np.ndarray) -> np.ndarray:
    """Standard bump ``exp(-1/(1-r^2))`` on ``|r| < 1`` and 0 elsewhere."""
    r = np.asarray(r, dtype=np.float64)
    out = np.zeros_like(r)
    inside = np.abs(r) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - r[inside] ** 2))
    return out


def bump_derivative(r: np.ndarray) -> np.ndarray:
    """Derivative of ``bump`` with respect to ``r``."""
    r = np.asarray(r, dtype=np.float64)
    out = np.zeros_like(r)
    inside = np.abs(r) < 1.0
    ri = r[inside]
    q = 1.0 - ri**2
    out[inside] = np.exp(-1.0 / q) * (-2.0 * ri / q**2)
    return out


def _unit_bump(r: np.ndarray) -> np.ndarray:
    return np.e * bump(r)


def _unit_bump_derivative(r: np.ndarray) -> np.ndarray:
    return np.e * bump_derivative(r)


def _periodic_offset(x: np.ndarray, centre: float) -> np.ndarray:
    """Signed distance from ``centre`` on the unit circle, in ``[-1/2, 1/2)``."""
    return np.mod(x - centre + 0.5, 1.0) - 0.5


class TestFunctionSamples(NamedTuple):
    """Values of ``phi``, ``d phi/dt`` and ``grad phi`` on a block of time rows.

    ``phi`` and ``dphi_dt`` have shape ``(rows, n_x[, n_x])``; ``grad_phi``
    appends an axis of length ``d``.
    """

    phi: np.ndarray
    dphi_dt: np.ndarray
    grad_phi: np.ndarray


class SupportsTestFunction(Protocol):
    def time_support(self) -> tuple[float, float]: ...

    def evaluate(self, grid: Grid, t_start: int, t_stop: int) -> TestFunctionSamples: ...

    def values_at(self, times: np.ndarray, point: Sequence[float]) -> np.ndarray: ...


@dataclass(frozen=True)
class TestFunction:
    """``phi(t, x) = b((t - t_center)/t_radius) * s(x)``.

    ``b`` is the bump scaled to ``b(0) = 1``. The spatial factor ``s`` is 1,
    a product of periodic bumps of half-width ``x_radius`` around
    ``x_center``, or ``1 + amplitude * cos(2 pi k.x)``.

    Attributes:
        t_center: Centre of the time support.
        t_radius: Half-width of the time support.
        shape: Spatial factor kind.
        x_center: Bump centre per spatial axis.
        x_radius: Bump half-width, at most 1/2.
        wavevector: Integer wavevector of the cosine factor.
        amplitude: Cosine amplitude.
    """

    __test__ = False

    t_center: float
    t_radius: float
    shape: SpatialShape = SpatialShape.CONSTANT
    x_center: tuple[float, ...] = (0.5,)
    x_radius: float = 0.25
    wavevector: tuple[int, ...] = (1,)
    amplitude: float = 0.5

    def __post_init__(self) -> None:
        if not self.t_radius > 0:
            raise SupportError(f"t_radius must be positive, got {self.t_radius}.")
        if self.shape is SpatialShape.BUMP and not 0 < self.x_radius <= 0.5:
            raise SupportError(f"x_radius must lie in (0, 1/2], got {self.x_radius}.")

    def time_support(self) -> tuple[float, float]:
        return self.t_center - self.t_radius, self.t_center + self.t_radius

    def _spatial(self, grid: Grid) -> tuple[np.ndarray, np.ndarray]:
        mesh = np.meshgrid(*([grid.positions] * grid.d), indexing="ij")
        return self._spatial_on(mesh)

    def _spatial_on(self, mesh: Sequence[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
        d = len(mesh)
        shape = np.shape(mesh[0])
        if self.shape is SpatialShape.CONSTANT:
            return np.ones(shape), np.zeros((*shape, d))
        if self.shape is SpatialShape.BUMP:
            centres = _broadcast_tuple(self.x_center, d)
            offsets = [_periodic_offset(x, c) / self.x_radius for x, c in zip(mesh, centres)]
            factors = [_unit_bump(r) for r in offsets]
            slopes = [_unit_bump_derivative(r) / self.x_radius for r in offsets]
            value = np.prod(factors, axis=0)
            grad = np.stack(
                [
                    slopes[a] * np.prod([factors[b] for b in range(d) if b != a], axis=0)
                    for a in range(d)
                ],
                axis=-1,
            )
            return value, grad
        k = _broadcast_tuple(self.wavevector, d)
        phase = 2 * np.pi * sum(ki * x for ki, x in zip(k, mesh))
        value = 1.0 + self.amplitude * np.cos(phase)
        grad = np.stack(
            [-self.amplitude * 2 * np.pi * ki * np.sin(phase) for ki in k], axis=-1
        )
        return value, grad

    def evaluate(self, grid: Grid, t_start: int, t_stop: int) -> TestFunctionSamples:
        r = (grid.times[t_start:t_stop] - self.t_center) / self.t_radius
        b = _unit_bump(r)
        db = _unit_bump_derivative(r) / self.t_radius
        s, grad_s = self._spatial(grid)
        expand = (slice(None),) + (np.newaxis,) * grid.d
        phi = b[expand] * s
        dphi_dt = db[expand] * s
        grad_phi = b[expand + (np.newaxis,)] * grad_s
        return TestFunctionSamples(phi, dphi_dt, grad_phi)

    def values_at(self, times: np.ndarray, point: Sequence[float]) -> np.ndarray:
        """``phi(t, point)`` for each entry of ``times``."""
        b = _unit_bump((np.asarray(times, dtype=np.float64) - self.t_center) / self.t_radius)
        s, _ = self._spatial_on([np.array([float(x)]) for x in point])
        return b * float(s[0])

    def __add__(self, other: SupportsTestFunction) -> CombinedTestFunction:
        return CombinedTestFunction(((1.0, self), (1.0, other)))

    def __rmul__(self, factor: float) -> CombinedTestFunction:
        return CombinedTestFunction(((float(factor), self),))


@dataclass(frozen=True)
class CombinedTestFunction:
    """Finite linear combination of test functions."""

    terms: tuple[tuple[float, SupportsTestFunction], ...] = field(default=())

    def time_support(self) -> tuple[float, float]:
        supports = [fn.time_support() for _, fn in self.terms]
        return min(s[0] for s in supports), max(s[1] for s in supports)

    def evaluate(self, grid: Grid, t_start: int, t_stop: int) -> TestFunctionSamples:
        parts = [(c, fn.evaluate(grid, t_start, t_stop)) for c, fn in self.terms]
        return TestFunctionSamples(
            sum(c * p.phi for c, p in parts),
            sum(c * p.dphi_dt for c, p in parts),
            sum(c * p.grad_phi for c, p in parts),
        )

    def values_at(self, times: np.ndarray, point: Sequence[float]) -> np.ndarray:
        return sum(c * fn.values_at(times, point) for c, fn in self.terms)

    def __add__(self, other: SupportsTestFunction) -> CombinedTestFunction:
        return CombinedTestFunction(self.terms + ((1.0, other),))

    def __rmul__(self, factor: float) -> CombinedTestFunction:
        return CombinedTestFunction(tuple((factor * c, fn) for c, fn in self.terms))


def _broadcast_tuple(values: Sequence, d: int) -> tuple:
    values = tuple(values)
    if len(values) == 1:
        return values * d
    if len(values) != d:
        raise SupportError(f"Expected {d} spatial entries, got {len(values)}.")
    return values


def check_time_support(
    phi: SupportsTestFunction, grid: Grid, lower: float, upper: float
) -> None:
    """Require the time support of ``phi`` to lie inside ``(lower, T - upper)``.

    Raises:
        SupportError: If the support reaches outside the interval.
    """
    a, b = phi.time_support()
    if a < lower or b > grid.T - upper:
        raise SupportError(
            f"Test function time support ({a:.6g}, {b:.6g}) is not inside "
            f"({lower:.6g}, {grid.T - upper:.6g})."
        )
