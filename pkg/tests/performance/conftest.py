"""Shared fixtures, helpers, and budget constants for performance tests."""

from __future__ import annotations

import time

import numpy as np
import pytest

from analysis.grid import Field, make_grid, sample

# ---------------------------------------------------------------------------
# Performance budget constants
# Adjust only here when hardware budgets change, never inside tests.
# ---------------------------------------------------------------------------

BUDGET_MOLLIFY_1D_4096_S: float = 1.0
BUDGET_MOLLIFY_2D_256_S: float = 3.0
BUDGET_BESOV_FIT_4096_S: float = 3.0
BUDGET_COMMUTATOR_SWEEP_2D_64_S: float = 15.0

BUDGET_MEMORY_MOLLIFY_1D_4096_BYTES: int = 32 * 1024 * 1024  # 32 MB

SCALABILITY_LINEAR_MULTIPLIER: float = 15.0

TIMING_REPEATS: int = 3


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _measure_ns(fn, repeat: int = TIMING_REPEATS) -> list[float]:
    """Run *fn* *repeat* times and return wall-clock durations in seconds.

    Args:
        fn: Zero-argument callable to benchmark.
        repeat: Number of repetitions.

    Returns:
        List of elapsed times in seconds.
    """
    results: list[float] = []
    for _ in range(repeat):
        start = time.perf_counter_ns()
        fn()
        elapsed = (time.perf_counter_ns() - start) / 1e9
        results.append(elapsed)
    return results


def _noisy_field(n_x: int, n_t: int, rng: np.random.Generator, d: int = 1) -> Field:
    """A smooth wave plus white noise on a ``d``-dimensional grid."""
    grid = make_grid(d, n_x, n_t, 1.0)
    smooth = sample(lambda t, *x: np.sin(2 * np.pi * (x[0] - t)), grid)
    noise = rng.normal(scale=0.1, size=smooth.values.shape)
    return smooth.with_values(smooth.values + noise)


# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------


@pytest.fixture(scope="session")
def rng() -> np.random.Generator:
    """Session-scoped seeded random generator for reproducible data.

    Returns:
        Seeded NumPy Generator.
    """
    return np.random.default_rng(seed=42)


@pytest.fixture(scope="session")
def field_1d_4096(rng: np.random.Generator) -> Field:
    """Session-scoped rough 1D field with 4096 cells and 64 time rows.

    Returns:
        Scalar field.
    """
    return _noisy_field(4096, 64, rng)


@pytest.fixture(scope="session")
def field_2d_256(rng: np.random.Generator) -> Field:
    """Session-scoped rough 2D field with 256 x 256 cells and 8 time rows.

    Returns:
        Scalar field.
    """
    return _noisy_field(256, 8, rng, d=2)
