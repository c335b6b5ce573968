"""Shared Hypothesis strategies + helpers for metamorphic tests."""

from __future__ import annotations

import numpy as np
from hypothesis import strategies as st

from analysis.bumps import TestFunction
from analysis.constants import SpatialShape
from analysis.grid import Field, Grid, make_grid, sample

# Small enough for a full spacetime pairing per example, fine enough for
# radii four cells above the floor.
GRID: Grid = make_grid(1, 128, 64, 1.0)
FLOOR: float = 4 * max(GRID.dx, GRID.dt)


@st.composite
def trig_fields(draw, *, offset: float = 0.0) -> Field:
    """Travelling two-mode waves ``offset + a sin(2 pi k (x - c t)) + b cos(...)``.

    Amplitudes stay below one half so ``offset = 1`` gives a positive density.
    """
    a = draw(st.floats(min_value=-0.25, max_value=0.25))
    b = draw(st.floats(min_value=-0.2, max_value=0.2))
    k = draw(st.integers(min_value=1, max_value=4))
    c = draw(st.floats(min_value=-1.0, max_value=1.0))

    def f(t: np.ndarray, x: np.ndarray) -> np.ndarray:
        phase = 2 * np.pi * k * (x - c * t)
        return offset + a * np.sin(phase) + b * np.cos(2 * phase)

    return sample(f, GRID)


@st.composite
def bump_test_functions(draw) -> TestFunction:
    """Space-time bumps well inside the time window."""
    return TestFunction(
        t_center=draw(st.floats(min_value=0.4, max_value=0.6)),
        t_radius=draw(st.floats(min_value=0.15, max_value=0.3)),
        shape=SpatialShape.BUMP,
        x_center=(draw(st.floats(min_value=0.0, max_value=1.0)),),
        x_radius=draw(st.floats(min_value=0.1, max_value=0.5)),
    )


def lattice_shifts() -> st.SearchStrategy[int]:
    """Spatial offsets in whole cells."""
    return st.integers(min_value=-GRID.n_x, max_value=GRID.n_x)


def radii() -> st.SearchStrategy[float]:
    """Kernel radii from the spacetime floor to a tenth of the period."""
    return st.floats(min_value=FLOOR, max_value=0.1)
