"""
Shared pytest configuration and fixtures for all test modules.

This module provides common grids, fields, pressure laws and run
configurations for the entire test suite, following pytest best practices.
"""

from __future__ import annotations

from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from loguru import logger

from analysis.grid import Field, Grid, make_grid, sample
from analysis.models import PressureLaw
from experiments.run_config import RunConfig, load_config

if TYPE_CHECKING:
    from collections.abc import Generator

REPO_ROOT = Path(__file__).resolve().parents[1]
CONFIGS_DIR = REPO_ROOT / "configs"

# ---------------------------------------------------------------------------
# Hypothesis global profile
# Registered here so every @given test picks it up without per-test @settings.
# Numerical kernels sweep whole grids per example, so max_examples stays low;
# suppress HealthCheck.too_slow to avoid flaky timeouts on slow runners.
# ---------------------------------------------------------------------------
settings.register_profile(
    "default",
    max_examples=25,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def grid_1d() -> Grid:
    """
    Provides a small 1D grid (n_x=64, n_t=32, T=1).

    Scope: session - Grids are frozen dataclasses and cannot be mutated.

    Returns:
        Grid with dx = 1/64 and dt = 1/32.
    """
    return make_grid(1, 64, 32, 1.0)


@pytest.fixture(scope="session")
def grid_2d() -> Grid:
    """
    Provides a small 2D grid (n_x=32, n_t=16, T=1).

    Scope: session - Grids are frozen dataclasses and cannot be mutated.

    Returns:
        Grid with dx = 1/32 and dt = 1/16.
    """
    return make_grid(2, 32, 16, 1.0)


@pytest.fixture(scope="session")
def fine_grid_1d() -> Grid:
    """
    Provides a 1D grid fine enough in space for four dyadic shift scales.

    Scope: session - Grids are frozen dataclasses and cannot be mutated.

    Returns:
        Grid with n_x=1024, n_t=8, T=1.
    """
    return make_grid(1, 1024, 8, 1.0)


@pytest.fixture(scope="session")
def _base_sine_field(grid_1d: Grid) -> Field:
    """
    Session-level, private source-of-truth field ``sin(2 pi x) cos(t)``.

    Scope: session - Created once; consumed only through the function-scoped
    public wrapper ``sine_field``.

    Returns:
        Scalar field on ``grid_1d``.
    """
    return sample(lambda t, x: np.sin(2 * np.pi * x) * np.cos(t), grid_1d)


@pytest.fixture(scope="function")
def sine_field(_base_sine_field: Field) -> Field:
    """
    Provides a per-test copy of the smooth sine field.

    Scope: function - Fields are read-only, but each test receives its own
    array so identity checks cannot leak between tests.

    Args:
        _base_sine_field: Session-level source field.

    Returns:
        Independent copy of the field.
    """
    return _base_sine_field.with_values(_base_sine_field.values.copy())


@pytest.fixture(scope="session")
def _base_constant_field(grid_1d: Grid) -> Field:
    """
    Session-level, private constant field with value 1.7.

    Scope: session - Created once; consumed only through ``constant_field``.

    Returns:
        Scalar field on ``grid_1d``.
    """
    return Field(grid_1d, np.full((grid_1d.n_t, grid_1d.n_x), 1.7))


@pytest.fixture(scope="function")
def constant_field(_base_constant_field: Field) -> Field:
    """
    Provides a per-test copy of the constant field.

    Scope: function - Each test receives an independent copy.

    Args:
        _base_constant_field: Session-level source field.

    Returns:
        Independent copy of the field.
    """
    return _base_constant_field.with_values(_base_constant_field.values.copy())


@pytest.fixture(scope="session")
def law() -> PressureLaw:
    """
    Provides the quadratic pressure law ``p = rho^2``.

    Scope: session - Pressure laws are frozen dataclasses.

    Returns:
        PressureLaw with kappa=1, gamma=2.
    """
    return PressureLaw(kappa=1.0, gamma=2.0)


@pytest.fixture(scope="session")
def smoke_config_path() -> Path:
    """
    Provides the path of the bundled smoke configuration.

    Scope: session - Path is immutable.

    Returns:
        Path to ``configs/smoke.cfg``.
    """
    return CONFIGS_DIR / "smoke.cfg"


@pytest.fixture(scope="session")
def _base_smoke_config(smoke_config_path: Path) -> RunConfig:
    """
    Session-level, private smoke configuration with resolved tolerances.

    Scope: session - Parsed once; consumed only through ``smoke_config``.

    Returns:
        Validated RunConfig.
    """
    return load_config(smoke_config_path).with_tolerances(
        slope=0.1, dissipation=0.02, exponent=0.05
    )


@pytest.fixture(scope="function")
def smoke_config(_base_smoke_config: RunConfig) -> RunConfig:
    """
    Provides a per-test deep copy of the smoke configuration.

    Scope: function - Each test receives an independent model so attribute
    assignments cannot leak between tests.

    Args:
        _base_smoke_config: Session-level source configuration.

    Returns:
        Deep copy of the configuration.
    """
    return _base_smoke_config.model_copy(deep=True)


@pytest.fixture(scope="function")
def temp_output_dir(tmp_path: Path) -> Path:
    """
    Provides a temporary directory for test output files.

    Scope: function - Each test gets its own isolated temporary directory.

    Args:
        tmp_path: pytest built-in temporary directory fixture.

    Returns:
        Path object pointing to a temporary test output directory.
    """
    output_dir = tmp_path / "test_output"
    output_dir.mkdir(exist_ok=True)
    return output_dir


@pytest.fixture(scope="session", autouse=True)
def configure_test_logging() -> Generator[None, None, None]:
    """
    Configure loguru logger for test environment.

    Scope: session - Configure once for all tests.
    Autouse: True - Automatically applied to all tests.

    Yields:
        None - Cleanup happens after all tests complete.
    """
    # Remove default handler and configure for tests
    logger.remove()
    logger.add(
        lambda msg: None,  # Suppress output during tests
        level="DEBUG",
        format="{time:YYYY-MM-DD HH:mm:ss} | {level: <8} | {name}:{function}:{line} - {message}",
    )

    yield

    # Cleanup after all tests
    logger.remove()


# Marker definitions live exclusively in pyproject.toml [tool.pytest.ini_options].
