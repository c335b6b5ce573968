"""Constants and enumerations for the Onsager energy-conservation lab.

This module provides type-safe enumerations for the Euler systems, the
axes a mollification or shift acts on, and the fixture kinds a run
configuration may request, together with the numerical floors shared by
every analysis module.
"""

from __future__ import annotations

from enum import Enum

MIN_SAMPLES_PER_AXIS: int = 8
RESOLUTION_FLOOR_CELLS: int = 4  # smallest admissible ε, h and shift, in cells
MIN_FIT_SCALES: int = 4
DEFAULT_MAX_SHIFT_SCALE: float = 1 / 8
DIVERGENCE_SCALES: int = 4
MAX_SPATIAL_DIM: int = 2

# Relative size of |s - s0| below which Taylor-remainder ratios are dominated
# by cancellation error and skipped.
TAYLOR_PAIR_MIN_SEPARATION: float = 1e-4


class System(str, Enum):
    """Euler systems whose local energy balance the lab measures.

    The inhomogeneous incompressible system carries an externally supplied
    pressure field; the compressible isentropic system derives pressure and
    pressure potential from a ``PressureLaw``.
    """

    INHOMOGENEOUS_INCOMPRESSIBLE = "inhom-incompressible"
    COMPRESSIBLE = "compressible"


class Axes(str, Enum):
    """Axes a mollification, gradient or shift sweep acts on."""

    SPACE = "space"
    SPACETIME = "spacetime"


class Domain(str, Enum):
    """Integration domains for quadrature."""

    SPACE = "space"
    SPACETIME = "spacetime"


class FixtureKind(str, Enum):
    """Fixture generators a run configuration can reference.

    Each kind maps to a builder in ``experiments.fixtures``.
    """

    CONSTANT = "constant"
    SHEAR = "shear"
    SHOCK = "shock"
    TRAVELLING = "travelling"
    SCALAR = "scalar"
    VACUUM_BAND = "vacuum-band"


class ProfileKind(str, Enum):
    """One-dimensional periodic profiles used to build fixtures."""

    CONSTANT = "constant"
    SINE = "sine"
    STEP = "step"
    SAWTOOTH = "sawtooth"
    KNOTS = "knots"
    WEIERSTRASS = "weierstrass"


class SpatialShape(str, Enum):
    """Spatial factor of a test function."""

    CONSTANT = "constant"
    BUMP = "bump"
    COSINE = "cosine"


class Verdict(str, Enum):
    """Outcome of a rate or tolerance check."""

    PASS = "pass"
    FAIL = "fail"
    EXACT = "exact"
