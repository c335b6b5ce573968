"""Periodic space-time lattice and immutable sampled fields.

Space is the unit torus per axis (indices wrap modulo ``n_x``); time is the
interval ``[0, T)`` and never wraps. Every ``Field`` therefore carries an
explicit valid time window ``[t_start, t_stop)`` in lattice indices, which
shrinks whenever an operation needs data beyond the window edge (time shifts,
space-time mollification, one-sided time averages).

Samples sit at cell centres ``t_i = (i + 1/2) dt`` and ``x_j = (j + 1/2) dx``
so that discontinuous generators never sample exactly on a jump.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from loguru import logger

from .constants import MAX_SPATIAL_DIM, MIN_SAMPLES_PER_AXIS, Domain
from .errors import GridError, NonFiniteSampleError


@dataclass(frozen=True)
class Grid:
    """Uniform periodic lattice on ``[0, T) x T^d``.

    Attributes:
        d: Spatial dimension (1 or 2).
        n_x: Samples per spatial axis.
        n_t: Time samples.
        T: Time horizon.
    """

    d: int
    n_x: int
    n_t: int
    T: float

    @property
    def dx(self) -> float:
        return 1.0 / self.n_x

    @property
    def dt(self) -> float:
        return self.T / self.n_t

    @property
    def spatial_shape(self) -> tuple[int, ...]:
        return (self.n_x,) * self.d

    @property
    def cell_volume(self) -> float:
        """Spatial quadrature weight ``dx^d``."""
        return self.dx**self.d

    def quadrature_weight(self, over: Domain | str) -> float:
        """Return the rectangle-rule weight for ``over`` (space or spacetime)."""
        if Domain(over) is Domain.SPACE:
            return self.cell_volume
        return self.cell_volume * self.dt

    @cached_property
    def times(self) -> np.ndarray:
        return (np.arange(self.n_t) + 0.5) * self.dt

    @cached_property
    def positions(self) -> np.ndarray:
        return (np.arange(self.n_x) + 0.5) * self.dx

    def mesh(self, t_start: int = 0, t_stop: int | None = None) -> list[np.ndarray]:
        """Return broadcastable coordinate arrays ``[t, x1, ..., xd]``.

        Args:
            t_start: First time index (inclusive).
            t_stop: Last time index (exclusive); defaults to ``n_t``.

        Returns:
            Sparse ``indexing="ij"`` mesh suitable for closed-form evaluation.
        """
        stop = self.n_t if t_stop is None else t_stop
        axes = [self.times[t_start:stop]] + [self.positions] * self.d
        return np.meshgrid(*axes, indexing="ij", sparse=True)


def make_grid(d: int, n_x: int, n_t: int, T: float) -> Grid:
    """Build a validated ``Grid``.

    Args:
        d: Spatial dimension, 1 or 2.
        n_x: Samples per spatial axis, at least 8.
        n_t: Time samples, at least 8.
        T: Positive time horizon.

    Returns:
        The grid with ``dx = 1/n_x`` and ``dt = T/n_t``.

    Raises:
        GridError: If any dimension is undersized or non-positive.
    """
    if d not in range(1, MAX_SPATIAL_DIM + 1):
        raise GridError(f"Spatial dimension must be 1 or 2, got {d}.")
    if n_x < MIN_SAMPLES_PER_AXIS or n_t < MIN_SAMPLES_PER_AXIS:
        raise GridError(
            f"Grid is undersized: n_x={n_x}, n_t={n_t} "
            f"(need at least {MIN_SAMPLES_PER_AXIS} per axis)."
        )
    if not T > 0:
        raise GridError(f"Time horizon must be positive, got T={T}.")
    return Grid(d=int(d), n_x=int(n_x), n_t=int(n_t), T=float(T))


@dataclass(frozen=True, eq=False)
class Field:
    """Immutable samples of a scalar or vector quantity on a ``Grid``.

    ``values`` has shape ``(rows, n_x[, n_x], components)`` where row ``r``
    holds lattice time index ``t_start + r``.

    Attributes:
        grid: The lattice the samples live on.
        values: Read-only sample array.
        t_start: Lattice index of the first valid time row.
    """

    grid: Grid
    values: np.ndarray
    t_start: int = field(default=0)

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64)
        if values.ndim == 1 + self.grid.d:
            values = values[..., np.newaxis]
        if values.ndim != 2 + self.grid.d:
            raise GridError(
                f"Field values must have {2 + self.grid.d} axes, got {values.ndim}."
            )
        if values.shape[1:-1] != self.grid.spatial_shape:
            raise GridError(
                f"Spatial shape {values.shape[1:-1]} does not match grid "
                f"{self.grid.spatial_shape}."
            )
        rows = values.shape[0]
        if rows < 1 or self.t_start < 0 or self.t_start + rows > self.grid.n_t:
            raise GridError(
                f"Time window [{self.t_start}, {self.t_start + rows}) lies outside "
                f"[0, {self.grid.n_t})."
            )
        if not np.all(np.isfinite(values)):
            raise GridError("Field values must all be finite.")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def components(self) -> int:
        return self.values.shape[-1]

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def t_stop(self) -> int:
        return self.t_start + self.rows

    @property
    def window(self) -> tuple[int, int]:
        return self.t_start, self.t_stop

    @property
    def scalar(self) -> np.ndarray:
        """Component 0 without the trailing axis; requires a scalar field."""
        if self.components != 1:
            raise GridError(f"Expected a scalar field, got {self.components} components.")
        return self.values[..., 0]

    def component(self, index: int) -> Field:
        return Field(self.grid, self.values[..., index : index + 1], self.t_start)

    def with_values(self, values: np.ndarray, t_start: int | None = None) -> Field:
        """Return a new field on the same grid with ``values``."""
        return Field(self.grid, values, self.t_start if t_start is None else t_start)

    def __add__(self, other: Field) -> Field:
        a, b = align(self, other)
        return a.with_values(a.values + b.values)

    def __sub__(self, other: Field) -> Field:
        a, b = align(self, other)
        return a.with_values(a.values - b.values)

    def scale(self, factor: float) -> Field:
        return self.with_values(factor * self.values)


def from_components(fields: Sequence[Field]) -> Field:
    """Stack scalar fields sharing a window into one vector field."""
    aligned = align(*fields)
    stacked = np.concatenate([f.values for f in aligned], axis=-1)
    return aligned[0].with_values(stacked)


def sample(
    f: Callable[..., np.ndarray | float | Sequence[np.ndarray | float]],
    grid: Grid,
    components: int = 1,
) -> Field:
    """Evaluate a closed-form function at every cell centre.

    Args:
        f: Callable ``f(t, x1[, x2])`` on broadcastable arrays. Vector fields
            return a sequence with one entry per component.
        grid: Target lattice.
        components: Number of components ``f`` returns.

    Returns:
        The sampled field over the full time window.

    Raises:
        NonFiniteSampleError: At the first cell where ``f`` is not finite.
    """
    mesh = grid.mesh()
    full_shape = (grid.n_t, *grid.spatial_shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        raw = f(*mesh)
    if isinstance(raw, (tuple, list)):
        parts = list(raw)
    else:
        parts = [raw]
    if len(parts) != components:
        raise GridError(f"Expected {components} components, got {len(parts)}.")
    values = np.stack(
        [np.broadcast_to(np.asarray(p, dtype=np.float64), full_shape) for p in parts],
        axis=-1,
    )
    bad = np.argwhere(~np.isfinite(values))
    if bad.size:
        idx = bad[0]
        raise NonFiniteSampleError(
            time=float(grid.times[idx[0]]),
            position=tuple(float(grid.positions[j]) for j in idx[1 : 1 + grid.d]),
            value=float(values[tuple(idx)]),
        )
    logger.debug(f"Sampled field with shape {values.shape}")
    return Field(grid, values)


def integrate(field: Field, over: Domain | str = Domain.SPACE) -> np.ndarray | float:
    """Rectangle-rule integral of a scalar field.

    Args:
        field: Scalar field.
        over: ``"space"`` integrates each valid time row over the torus and
            returns one value per row; ``"spacetime"`` also sums over the
            valid rows and returns a float.

    Returns:
        Per-row spatial integrals, or the space-time integral.
    """
    values = field.scalar
    spatial_axes = tuple(range(1, 1 + field.grid.d))
    per_row = values.sum(axis=spatial_axes) * field.grid.cell_volume
    if Domain(over) is Domain.SPACE:
        return per_row
    return float(per_row.sum() * field.grid.dt)


def shift_field(field: Field, k: Sequence[int]) -> Field:
    """Translate a field by a lattice offset.

    The result at ``(t_i, x_j)`` equals ``field`` at ``(t_{i+kt}, x_{j+kx})``.
    Spatial offsets wrap; a time offset keeps only rows where both ``i`` and
    ``i + kt`` are valid, mirroring the intersection of the domain with its
    translate.

    Args:
        field: Field to shift.
        k: Offsets ``(kt, kx1[, kx2])`` in lattice cells.

    Returns:
        The shifted field on the reduced time window.

    Raises:
        GridError: If the offset has the wrong length, ``|kt| >= n_t``, or
            no valid row remains.
    """
    grid = field.grid
    if len(k) != 1 + grid.d:
        raise GridError(f"Shift must have {1 + grid.d} entries, got {len(k)}.")
    kt = int(k[0])
    if abs(kt) >= grid.n_t:
        raise GridError(f"Time offset {kt} out of range for n_t={grid.n_t}.")
    start = max(field.t_start, field.t_start - kt)
    stop = min(field.t_stop, field.t_stop - kt)
    if start >= stop:
        raise GridError(f"Time offset {kt} leaves no valid window.")
    rows = field.values[start + kt - field.t_start : stop + kt - field.t_start]
    spatial = [int(s) for s in k[1:]]
    if any(spatial):
        rows = np.roll(rows, [-s for s in spatial], axis=tuple(range(1, 1 + grid.d)))
    return Field(grid, rows, start)


def restrict(field: Field, start: int, stop: int) -> Field:
    """Restrict a field to the lattice time window ``[start, stop)``."""
    if start < field.t_start or stop > field.t_stop or start >= stop:
        raise GridError(
            f"Window [{start}, {stop}) is not inside [{field.t_start}, {field.t_stop})."
        )
    return Field(
        field.grid,
        field.values[start - field.t_start : stop - field.t_start],
        start,
    )


def common_window(*fields: Field) -> tuple[int, int]:
    """Intersection of the valid windows of ``fields``."""
    if not fields:
        raise GridError("common_window needs at least one field.")
    grid = fields[0].grid
    if any(f.grid != grid for f in fields):
        raise GridError("Fields live on different grids.")
    start = max(f.t_start for f in fields)
    stop = min(f.t_stop for f in fields)
    if start >= stop:
        raise GridError("Fields have disjoint time windows.")
    return start, stop


def align(*fields: Field) -> list[Field]:
    """Restrict every field to the common window."""
    start, stop = common_window(*fields)
    return [restrict(f, start, stop) for f in fields]
