"""Log-log power-law regression shared by regularity, mollification and
commutator sweeps."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from scipy import optimize, stats

from .constants import MIN_FIT_SCALES
from .errors import RateFitError


@dataclass(frozen=True)
class RateFit:
    """Least-squares fit of ``log value = slope * log scale + intercept``.

    Attributes:
        slope: Fitted exponent (NaN when ``exact``).
        intercept: Fitted log-intercept (NaN when ``exact``).
        residual: Root-mean-square residual in log space.
        r_squared: Coefficient of determination, clipped to ``[0, 1]``.
        scales: Scales the fit used.
        values: Magnitudes the fit used.
        exact: True when every value is exactly zero (no fit performed).
    """

    slope: float
    intercept: float
    residual: float
    r_squared: float
    scales: tuple[float, ...]
    values: tuple[float, ...]
    exact: bool = False


def fit_power_law(
    scales: Sequence[float], values: Sequence[float], min_points: int = MIN_FIT_SCALES
) -> RateFit:
    """Fit ``values ~ C * scales**slope`` in log-log space.

    Args:
        scales: Positive abscissae (radii or shift magnitudes).
        values: Non-negative magnitudes, one per scale.
        min_points: Minimum number of points.

    Returns:
        The fit, or an ``exact`` result when every value is zero.

    Raises:
        RateFitError: On too few points, mismatched lengths, non-positive
            scales, or a mixture of zero/negative and positive values.
    """
    x = np.asarray(scales, dtype=np.float64)
    y = np.asarray(values, dtype=np.float64)
    if x.shape != y.shape:
        raise RateFitError(f"Got {x.size} scales but {y.size} values.")
    if x.size < min_points:
        raise RateFitError(f"Need at least {min_points} points, got {x.size}.")
    if np.any(x <= 0) or not np.all(np.isfinite(x)):
        raise RateFitError("Scales must be positive and finite.")
    if not np.all(np.isfinite(y)):
        raise RateFitError("Values must be finite.")
    if np.all(y == 0):
        return RateFit(
            slope=math.nan,
            intercept=math.nan,
            residual=0.0,
            r_squared=1.0,
            scales=tuple(x.tolist()),
            values=tuple(y.tolist()),
            exact=True,
        )
    if np.any(y <= 0):
        raise RateFitError(
            "Values mix non-positive and positive entries; cannot fit a power law."
        )
    log_x, log_y = np.log(x), np.log(y)
    result = stats.linregress(log_x, log_y)
    predicted = result.slope * log_x + result.intercept
    rms = float(np.sqrt(np.mean((log_y - predicted) ** 2)))
    r_squared = float(np.clip(result.rvalue**2, 0.0, 1.0))
    return RateFit(
        slope=float(result.slope),
        intercept=float(result.intercept),
        residual=rms,
        r_squared=r_squared,
        scales=tuple(x.tolist()),
        values=tuple(y.tolist()),
    )


def richardson_extrapolate(
    scales: tuple[float, float], values: tuple[float, float], slope: float
) -> float:
    """Eliminate the leading ``C * scale**slope`` error from two samples.

    Args:
        scales: ``(finer, coarser)`` scales.
        values: Signed values at those scales.
        slope: Positive order of the leading error term.

    Returns:
        The zero-scale estimate ``(v1 r^s - v2) / (r^s - 1)`` with
        ``r = coarser / finer``.
    """
    if not slope > 0:
        raise RateFitError(f"Extrapolation needs a positive order, got {slope}.")
    ratio = (scales[1] / scales[0]) ** slope
    if ratio == 1.0:
        raise RateFitError("Extrapolation needs two distinct scales.")
    return float((values[0] * ratio - values[1]) / (ratio - 1.0))


LIMIT_ORDER_BOUNDS: tuple[float, float] = (0.25, 4.0)


def extrapolate_limit(
    scales: Sequence[float],
    values: Sequence[float],
    order_bounds: tuple[float, float] = LIMIT_ORDER_BOUNDS,
) -> float:
    """Zero-scale value ``a`` of the least-squares fit ``values ~ a + b * scales**q``.

    The limit need not vanish, so the order is not read off ``|values|``. For
    each trial order ``q`` in ``order_bounds`` the pair ``(a, b)`` solves a
    linear least-squares problem; ``q`` minimizes its residual. Fewer than three
    samples, or a constant series, give the finest value.

    Raises:
        RateFitError: On mismatched lengths, no samples or non-positive scales.
    """
    x = np.asarray(scales, dtype=np.float64)
    y = np.asarray(values, dtype=np.float64)
    if x.shape != y.shape or x.size == 0:
        raise RateFitError(f"Got {x.size} scales but {y.size} values.")
    if np.any(x <= 0):
        raise RateFitError("Scales must be positive.")
    finest = float(y[np.argmin(x)])
    if x.size < 3 or np.all(y == y[0]):
        return finest
    s = x / x.max()

    def solve(order: float) -> tuple[np.ndarray, float]:
        design = np.column_stack([np.ones_like(s), s**order])
        coeffs, *_ = np.linalg.lstsq(design, y, rcond=None)
        return coeffs, float(np.sum((design @ coeffs - y) ** 2))

    best = optimize.minimize_scalar(
        lambda order: solve(order)[1], bounds=order_bounds, method="bounded"
    )
    coeffs, _ = solve(float(best.x))
    return float(coeffs[0])
