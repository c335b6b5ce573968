"""Shift-based Besov seminorms, L^p norms, total variation and regularity fits.

The supremum over translations in the Besov norm is swept over a dyadic set
of lattice shifts. Each dyadic scale ``s`` groups the axis-aligned shift of
length ``s`` with the diagonal ones (2D) and, for space-time sweeps, the
time-only and mixed shifts, so the sup over directions is taken per scale.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from loguru import logger

from .constants import (
    DEFAULT_MAX_SHIFT_SCALE,
    DIVERGENCE_SCALES,
    MIN_FIT_SCALES,
    RESOLUTION_FLOOR_CELLS,
    Axes,
)
from .errors import GridError, LabError, RateFitError
from .grid import Field, Grid, restrict, shift_field
from .rate_fit import fit_power_law

Shift = tuple[int, ...]


@dataclass(frozen=True)
class ShiftScale:
    """All swept lattice shifts sharing one dyadic magnitude ``scale``."""

    scale: float
    shifts: tuple[Shift, ...]


@dataclass(frozen=True)
class BesovEstimate:
    """Estimate of ``||w||_{B_p^{alpha,inf}} = ||w||_p + sup |Δ_ξ w|_p / |ξ|^alpha``.

    Attributes:
        p: Integrability exponent.
        alpha: Smoothness exponent.
        lp_norm: ``||w||_p``.
        seminorm: Sup of the shift ratios over the swept shifts.
        shift_count: Number of shifts swept.
        argmax_shift: Lattice shift realizing the sup (``None`` if all zero).
        divergent: True when the per-scale ratio grows monotonically across
            the finest dyadic scales.
    """

    p: float
    alpha: float
    lp_norm: float
    seminorm: float
    shift_count: int
    argmax_shift: Shift | None
    divergent: bool

    @property
    def total(self) -> float:
        return self.lp_norm + self.seminorm


@dataclass(frozen=True)
class RegularityFit:
    """Log-log slope of the sup increment norm against the shift scale.

    Attributes:
        alpha_hat: Fitted exponent (1 for exactly constant fields).
        log_intercept: Intercept of the fit (NaN when degenerate).
        r_squared: Goodness of fit in ``[0, 1]``.
        shift_scales: Scales ``|ξ|`` used.
        increments: Sup increment norm per scale.
        degenerate: True when every increment vanished.
    """

    alpha_hat: float
    log_intercept: float
    r_squared: float
    shift_scales: tuple[float, ...]
    increments: tuple[float, ...]
    degenerate: bool = False


def _check_p(p: float) -> float:
    p = float(p)
    if not p >= 1:
        raise LabError(f"Integrability exponent must satisfy p >= 1, got {p}.")
    return p


def _magnitude(values: np.ndarray) -> np.ndarray:
    if values.shape[-1] == 1:
        return np.abs(values[..., 0])
    return np.linalg.norm(values, axis=-1)


def lp_norm(field: Field, p: float) -> float:
    """Discrete ``L^p`` norm over the valid window with weight ``dx^d dt``.

    Vector fields use the pointwise Euclidean magnitude; ``p = inf`` is the
    max norm.
    """
    p = _check_p(p)
    mag = _magnitude(field.values)
    if math.isinf(p):
        return float(mag.max())
    weight = field.grid.cell_volume * field.grid.dt
    return float((np.sum(mag**p) * weight) ** (1.0 / p))


def shift_length(grid: Grid, xi: Sequence[int]) -> float:
    """Physical length of a lattice shift ``(kt, kx...)``."""
    kt, *kx = xi
    return math.sqrt((kt * grid.dt) ** 2 + sum((k * grid.dx) ** 2 for k in kx))


def shift_seminorm(field: Field, xi: Sequence[int], p: float) -> float:
    """``||w(. + ξ) - w||_p`` on the window where both terms are defined.

    Raises:
        GridError: For the zero shift or an out-of-range time offset.
    """
    if not any(int(k) for k in xi):
        raise GridError("Zero shift: the increment ratio is undefined.")
    shifted = shift_field(field, xi)
    base = restrict(field, shifted.t_start, shifted.t_stop)
    return lp_norm(shifted - base, p)


def dyadic_shifts(
    grid: Grid,
    axes: Axes | str = Axes.SPACE,
    max_scale: float = DEFAULT_MAX_SHIFT_SCALE,
) -> list[ShiftScale]:
    """Dyadic shift sweep from ``4 h`` up to ``max_scale``.

    ``h`` is ``dx`` for spatial sweeps and ``max(dx, dt)`` for space-time
    sweeps. Scales whose shifts exceed half an axis are dropped.
    """
    axes = Axes(axes)
    spacetime = axes is Axes.SPACETIME
    h = max(grid.dx, grid.dt) if spacetime else grid.dx
    groups: list[ShiftScale] = []
    scale = RESOLUTION_FLOOR_CELLS * h
    while scale <= max_scale * (1 + 1e-12):
        m = int(round(scale / grid.dx))
        mt = int(round(scale / grid.dt)) if spacetime else 0
        if m > grid.n_x // 2 or mt > grid.n_t // 2:
            break
        spatial: list[Shift] = []
        for axis in range(grid.d):
            vec = [0] * grid.d
            vec[axis] = m
            spatial.append(tuple(vec))
        if grid.d == 2:
            spatial += [(m, m), (m, -m)]
        shifts: list[Shift] = [(0, *v) for v in spatial]
        if spacetime:
            shifts.append((mt,) + (0,) * grid.d)
            for axis in range(grid.d):
                for sign in (1, -1):
                    vec = [0] * grid.d
                    vec[axis] = sign * m
                    shifts.append((mt, *vec))
        groups.append(ShiftScale(scale=scale, shifts=tuple(shifts)))
        scale *= 2
    return groups


def besov_norm_estimate(
    field: Field,
    p: float,
    alpha: float,
    shift_set: Sequence[ShiftScale] | None = None,
    axes: Axes | str = Axes.SPACE,
) -> BesovEstimate:
    """Estimate the ``B_p^{alpha,inf}`` norm over a dyadic shift sweep.

    Args:
        field: Field to measure.
        p: Integrability exponent in ``[1, inf]``.
        alpha: Smoothness exponent in ``[0, 1]``.
        shift_set: Scale groups to sweep; defaults to ``dyadic_shifts``.
        axes: Axes of the default sweep.

    Returns:
        The estimate, with the location of the sup and a divergence flag.
    """
    p = _check_p(p)
    if not 0 <= alpha <= 1:
        raise LabError(f"Smoothness exponent must lie in [0, 1], got {alpha}.")
    groups = list(shift_set) if shift_set is not None else dyadic_shifts(field.grid, axes)
    if not groups or not any(g.shifts for g in groups):
        raise LabError("Shift set is empty.")

    best, best_shift = 0.0, None
    per_scale: list[tuple[float, float]] = []
    count = 0
    for group in groups:
        group_best = 0.0
        for xi in group.shifts:
            ratio = shift_seminorm(field, xi, p) / shift_length(field.grid, xi) ** alpha
            count += 1
            group_best = max(group_best, ratio)
            if ratio > best:
                best, best_shift = ratio, xi
        per_scale.append((group.scale, group_best))

    finest = sorted(per_scale)[:DIVERGENCE_SCALES]
    divergent = len(finest) == DIVERGENCE_SCALES and all(
        finer[1] > coarser[1] for finer, coarser in zip(finest, finest[1:])
    )
    if divergent:
        logger.warning(
            f"Besov ratio for p={p}, alpha={alpha} grows across the "
            f"{DIVERGENCE_SCALES} finest scales; the sup is not finite."
        )
    return BesovEstimate(
        p=p,
        alpha=float(alpha),
        lp_norm=lp_norm(field, p),
        seminorm=best,
        shift_count=count,
        argmax_shift=best_shift,
        divergent=divergent,
    )


def sup_increments(field: Field, p: float, groups: Sequence[ShiftScale]) -> list[float]:
    """Sup over each scale group of the increment norm."""
    return [max(shift_seminorm(field, xi, p) for xi in g.shifts) for g in groups]


def fit_regularity_exponent(
    field: Field,
    p: float,
    scales: Sequence[ShiftScale] | None = None,
    axes: Axes | str = Axes.SPACE,
    max_scale: float = DEFAULT_MAX_SHIFT_SCALE,
) -> RegularityFit:
    """Fit ``alpha`` from ``sup_{|ξ|=s} ||w(. + ξ) - w||_p ~ s^alpha``.

    Args:
        field: Field to measure.
        p: Integrability exponent.
        scales: Explicit scale groups; defaults to ``dyadic_shifts``.
        axes: Axes of the default sweep.
        max_scale: Largest dyadic scale of the default sweep.

    Returns:
        The fit; all-zero increments give ``alpha_hat = 1`` and
        ``degenerate = True``.

    Raises:
        RateFitError: With fewer than four scales.
    """
    p = _check_p(p)
    groups = list(scales) if scales is not None else dyadic_shifts(field.grid, axes, max_scale)
    if len(groups) < MIN_FIT_SCALES:
        raise RateFitError(
            f"Need at least {MIN_FIT_SCALES} dyadic scales, got {len(groups)}; "
            f"refine the grid or raise max_scale."
        )
    increments = sup_increments(field, p, groups)
    scale_values = tuple(g.scale for g in groups)
    if all(v == 0 for v in increments):
        logger.debug("All increments vanish; reporting exact constancy.")
        return RegularityFit(
            alpha_hat=1.0,
            log_intercept=math.nan,
            r_squared=1.0,
            shift_scales=scale_values,
            increments=tuple(increments),
            degenerate=True,
        )
    fit = fit_power_law(scale_values, increments)
    logger.debug(f"Regularity fit p={p}: alpha_hat={fit.slope:.4f}, r2={fit.r_squared:.4f}")
    return RegularityFit(
        alpha_hat=fit.slope,
        log_intercept=fit.intercept,
        r_squared=fit.r_squared,
        shift_scales=scale_values,
        increments=tuple(increments),
    )


def total_variation(field: Field, row: int = 0) -> float:
    """Periodic total variation of one time row of a scalar field.

    Sums ``|w(x + dx e_a) - w(x)|`` over all cells and axes, weighted by
    ``dx^(d-1)``.
    """
    slice_ = field.scalar[row]
    tv = 0.0
    for axis in range(field.grid.d):
        tv += float(np.sum(np.abs(np.roll(slice_, -1, axis=axis) - slice_)))
    return tv * field.grid.dx ** (field.grid.d - 1)


def interpolation_bound(field: Field, xi: Sequence[int], p: float) -> tuple[float, float]:
    """Both sides of ``|Δ|_p <= |Δ|_1^(1/p) (2 max|w|)^(1-1/p)``."""
    p = _check_p(p)
    lhs = shift_seminorm(field, xi, p)
    if math.isinf(p):
        return lhs, 2 * float(_magnitude(field.values).max())
    amplitude = 2 * float(_magnitude(field.values).max())
    rhs = shift_seminorm(field, xi, 1.0) ** (1 / p) * amplitude ** (1 - 1 / p)
    return lhs, rhs


def bv_embedding_constant(field: Field, p: float, axes: Axes | str = Axes.SPACE) -> float:
    """Ratio of the ``B_p^{1/p,inf}`` seminorm to ``TV^(1/p) max|w|^(1-1/p)``.

    The seminorm is normalized by the duration of the valid window so the
    ratio does not depend on ``T``.
    """
    p = _check_p(p)
    estimate = besov_norm_estimate(field, p, 1.0 / p, axes=axes)
    tv = total_variation(field)
    peak = float(np.abs(field.scalar).max())
    if tv == 0 or peak == 0:
        return 0.0
    duration = field.rows * field.grid.dt
    scale = duration ** (1 / p) * tv ** (1 / p) * peak ** (1 - 1 / p)
    return estimate.seminorm / scale
