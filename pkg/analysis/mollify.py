"""Space and space-time mollification, analytic kernel gradients and the
one-sided time average.

Convolutions are direct sums over the compact kernel stencil, accumulated in
a fixed order in increment form ``w + sum_j K_j (S_j w - w)``. Spatial shifts
wrap; the time pass only produces rows whose whole stencil lies inside the
input window, so space-time outputs live on the epsilon-interior.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from itertools import product

import numpy as np
from loguru import logger

from .besov import lp_norm
from .bumps import bump
from .constants import RESOLUTION_FLOOR_CELLS, Axes
from .errors import LabError, ResolutionError
from .grid import Field, Grid
from .rate_fit import RateFit, fit_power_law

Stencil = tuple[tuple[tuple[int, ...], float], ...]

_FLOOR_SLACK = 1e-9


def resolution_floor(grid: Grid, axes: Axes | str) -> float:
    """Smallest admissible ``epsilon`` for ``axes``."""
    spacing = max(grid.dx, grid.dt) if Axes(axes) is Axes.SPACETIME else grid.dx
    return RESOLUTION_FLOOR_CELLS * spacing


def _radius_cells(epsilon: float, spacing: float) -> int:
    return int(math.floor(epsilon / spacing + _FLOOR_SLACK))


@dataclass(frozen=True)
class Kernel:
    """Discrete bump kernel ``eta^eps`` and its analytic derivatives.

    Spatial weights are ``eta(|y|/eps)`` at lattice offsets, divided by their
    sum so the discrete mass is 1. Derivative weights are the analytic
    derivative of the same profile, scaled so that affine data are
    differentiated exactly.

    Attributes:
        axes: ``space`` or ``spacetime`` (product of a time and a space bump).
        epsilon: Support radius.
        space: Nonzero spatial weights as ``(offset, weight)`` pairs.
        space_gradient: One stencil per spatial axis.
        time: Time weights indexed by offset ``-J_t..J_t`` (empty for space).
        time_derivative: Time-derivative weights (empty for space).
    """

    axes: Axes
    epsilon: float
    space: Stencil
    space_gradient: tuple[Stencil, ...]
    time: tuple[float, ...]
    time_derivative: tuple[float, ...]

    @property
    def time_radius(self) -> int:
        return (len(self.time) - 1) // 2 if self.time else 0

    @property
    def mass(self) -> float:
        return float(sum(w for _, w in self.space))


def _profile_weights(offsets: np.ndarray, spacing: float, epsilon: float) -> np.ndarray:
    radius = np.sqrt(np.sum((offsets * spacing) ** 2, axis=-1)) / epsilon
    return bump(radius)


def _derivative_weights(
    offsets: np.ndarray, spacing: float, epsilon: float, axis: int, norm: float
) -> np.ndarray:
    y = offsets * spacing
    r2 = np.sum(y**2, axis=-1) / epsilon**2
    inside = r2 < 1.0
    raw = np.zeros(len(offsets))
    q = 1.0 - r2[inside]
    raw[inside] = np.exp(-1.0 / q) * (-2.0 / q**2) * y[inside, axis] / epsilon**2
    raw /= norm
    # sum_j G_j (x - y_j) must equal 1 on affine data
    first_moment = -float(np.sum(raw * y[:, axis]))
    return raw / first_moment


def build_kernel(grid: Grid, epsilon: float, axes: Axes | str = Axes.SPACE) -> Kernel:
    """Build the discrete kernel for ``epsilon`` on ``grid``.

    Raises:
        ResolutionError: If ``epsilon`` is below ``4 * max(dx, dt)``
            (space-time) or ``4 * dx`` (space).
    """
    axes = Axes(axes)
    floor = resolution_floor(grid, axes)
    if epsilon < floor * (1 - _FLOOR_SLACK):
        raise ResolutionError("epsilon", epsilon, floor)

    J = _radius_cells(epsilon, grid.dx)
    offsets = np.array(list(product(range(-J, J + 1), repeat=grid.d)), dtype=np.int64)
    eta = _profile_weights(offsets, grid.dx, epsilon)
    total = float(eta.sum())
    keep = eta > 0
    space = tuple(
        (tuple(int(o) for o in off), float(w / total))
        for off, w in zip(offsets[keep], eta[keep])
    )
    gradient = []
    for axis in range(grid.d):
        g = _derivative_weights(offsets[keep].astype(np.float64), grid.dx, epsilon, axis, total)
        gradient.append(
            tuple((tuple(int(o) for o in off), float(w)) for off, w in zip(offsets[keep], g))
        )

    time: tuple[float, ...] = ()
    time_derivative: tuple[float, ...] = ()
    if axes is Axes.SPACETIME:
        Jt = _radius_cells(epsilon, grid.dt)
        toff = np.arange(-Jt, Jt + 1, dtype=np.float64)[:, np.newaxis]
        eta_t = _profile_weights(toff, grid.dt, epsilon)
        norm_t = float(eta_t.sum())
        time = tuple((eta_t / norm_t).tolist())
        time_derivative = tuple(
            _derivative_weights(toff, grid.dt, epsilon, 0, norm_t).tolist()
        )
    return Kernel(
        axes=axes,
        epsilon=float(epsilon),
        space=space,
        space_gradient=tuple(gradient),
        time=time,
        time_derivative=time_derivative,
    )


def _space_pass(values: np.ndarray, stencil: Stencil, d: int, increment_only: bool) -> np.ndarray:
    """``values + sum_j K_j (values(x - y_j) - values)`` over spatial axes 1..d.

    With ``increment_only`` the leading ``values`` term is dropped, which is
    the form used for derivative stencils (their weights sum to zero).
    """
    spatial_axes = tuple(range(1, 1 + d))
    acc = np.zeros_like(values)
    for offset, weight in stencil:
        if not any(offset):
            continue
        acc += weight * (np.roll(values, offset, axis=spatial_axes) - values)
    return acc if increment_only else values + acc


def _time_pass(values: np.ndarray, weights: Sequence[float], increment_only: bool) -> np.ndarray:
    """Time convolution keeping only rows whose stencil is fully defined."""
    Jt = (len(weights) - 1) // 2
    n = values.shape[0]
    if n <= 2 * Jt:
        raise LabError(
            f"Time window of {n} rows is too short for a kernel of radius {Jt} rows."
        )
    centre = values[Jt : n - Jt]
    acc = np.zeros_like(centre)
    for index, weight in enumerate(weights):
        a = index - Jt
        if a == 0 or weight == 0.0:
            continue
        acc += weight * (values[Jt - a : n - Jt - a] - centre)
    return acc if increment_only else centre + acc


def mollify(field: Field, epsilon: float, axes: Axes | str = Axes.SPACE) -> Field:
    """Convolve ``field`` with ``eta^epsilon``.

    Args:
        field: Scalar or vector field.
        epsilon: Kernel radius, at least the resolution floor.
        axes: ``space`` (periodic, full window) or ``spacetime`` (result
            restricted to the epsilon-interior of the time window).

    Returns:
        The mollified field.
    """
    kernel = build_kernel(field.grid, epsilon, axes)
    return apply_kernel(field, kernel)


def apply_kernel(field: Field, kernel: Kernel) -> Field:
    """Mollify ``field`` with a prebuilt kernel."""
    values = field.values
    t_start = field.t_start
    if kernel.axes is Axes.SPACETIME:
        values = _time_pass(values, kernel.time, increment_only=False)
        t_start += kernel.time_radius
    values = _space_pass(values, kernel.space, field.grid.d, increment_only=False)
    return Field(field.grid, values, t_start)


def mollify_gradient(field: Field, epsilon: float, axes: Axes | str = Axes.SPACE) -> Field:
    """Derivatives of ``field^epsilon`` via the analytically differentiated kernel.

    Args:
        field: Scalar field.
        epsilon: Kernel radius.
        axes: ``space`` gives ``(d/dx1, ..)``; ``spacetime`` gives
            ``(d/dt, d/dx1, ..)``.

    Returns:
        Vector field of derivatives on the same window as ``mollify``.
    """
    kernel = build_kernel(field.grid, epsilon, axes)
    return apply_kernel_gradient(field, kernel)


def apply_kernel_gradient(field: Field, kernel: Kernel) -> Field:
    """Gradient of a scalar field with a prebuilt kernel."""
    values = field.scalar
    d = field.grid.d
    t_start = field.t_start
    parts: list[np.ndarray] = []
    if kernel.axes is Axes.SPACETIME:
        smoothed_t = _time_pass(values, kernel.time, increment_only=False)
        dt_part = _time_pass(values, kernel.time_derivative, increment_only=True)
        parts.append(_space_pass(dt_part, kernel.space, d, increment_only=False))
        base = smoothed_t
        t_start += kernel.time_radius
    else:
        base = values
    for stencil in kernel.space_gradient:
        parts.append(_space_pass(base, stencil, d, increment_only=True))
    return Field(field.grid, np.stack(parts, axis=-1), t_start)


@dataclass(frozen=True)
class OneSidedTimeKernel:
    """``chi_h = (1/h) 1_[-h, 0]`` as a window of ``cells`` time rows."""

    h: float
    cells: int

    @property
    def weight(self) -> float:
        return 1.0 / self.cells


def one_sided_kernel(grid: Grid, h: float) -> OneSidedTimeKernel:
    """Validate ``h`` and return its discrete window.

    Raises:
        ResolutionError: If ``h < 4 dt``.
        LabError: If ``h`` is not a multiple of ``dt`` or too long.
    """
    cells = int(round(h / grid.dt))
    if abs(cells * grid.dt - h) > _FLOOR_SLACK * grid.dt * max(cells, 1):
        raise LabError(f"h={h:.6g} is not a multiple of dt={grid.dt:.6g}.")
    if cells < RESOLUTION_FLOOR_CELLS:
        raise ResolutionError("h", h, RESOLUTION_FLOOR_CELLS * grid.dt)
    if cells >= grid.n_t:
        raise LabError(f"h={h:.6g} exceeds the time horizon.")
    return OneSidedTimeKernel(h=float(h), cells=cells)


def one_sided_time_average(field: Field, h: float) -> Field:
    """``v^h(t) = (1/h) int_t^{t+h} v``: the mean of rows ``i+1..i+H``.

    The result is defined on rows ``[t_start, t_stop - H)``.
    """
    kernel = one_sided_kernel(field.grid, h)
    H = kernel.cells
    values = field.values
    n = values.shape[0]
    if n <= H:
        raise LabError(f"Time window of {n} rows is too short for h={h:.6g}.")
    base = values[: n - H]
    acc = np.zeros_like(base)
    for k in range(1, H + 1):
        acc += values[k : n - H + k] - base
    return Field(field.grid, base + kernel.weight * acc, field.t_start)


def time_difference_quotient(field: Field, h: float) -> Field:
    """``(v(t + h) - v(t)) / h`` on rows ``[t_start, t_stop - H)``."""
    kernel = one_sided_kernel(field.grid, h)
    H = kernel.cells
    values = field.values
    n = values.shape[0]
    if n <= H:
        raise LabError(f"Time window of {n} rows is too short for h={h:.6g}.")
    return Field(field.grid, (values[H:] - values[: n - H]) / kernel.h, field.t_start)


def backward_time_derivative(field: Field) -> Field:
    """``(v_i - v_{i-1}) / dt`` on rows ``[t_start + 1, t_stop)``."""
    values = field.values
    if values.shape[0] < 2:
        raise LabError("Need at least two time rows for a time derivative.")
    return Field(field.grid, (values[1:] - values[:-1]) / field.grid.dt, field.t_start + 1)


def mollification_rate_check(
    field: Field, p: float, eps_list: Sequence[float], axes: Axes | str = Axes.SPACE
) -> tuple[RateFit, RateFit]:
    """Log-log slopes of ``||w^eps - w||_p`` and ``||grad w^eps||_p`` versus eps.

    Args:
        field: Scalar field.
        p: Integrability exponent.
        eps_list: At least four radii within resolution bounds.
        axes: Mollification axes.

    Returns:
        ``(difference_fit, gradient_fit)``; all-zero series come back with
        ``exact=True``.
    """
    differences: list[float] = []
    gradients: list[float] = []
    for eps in eps_list:
        kernel = build_kernel(field.grid, eps, axes)
        smoothed = apply_kernel(field, kernel)
        differences.append(lp_norm(smoothed - field, p))
        gradients.append(lp_norm(apply_kernel_gradient(field, kernel), p))
        logger.debug(
            f"eps={eps:.5g}: |w^eps - w|_p={differences[-1]:.4e}, "
            f"|grad w^eps|_p={gradients[-1]:.4e}"
        )
    return fit_power_law(eps_list, differences), fit_power_law(eps_list, gradients)
