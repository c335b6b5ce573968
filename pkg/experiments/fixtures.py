"""Build fixture fields from run-configuration entries.

Fields are written under ``<out>/fields/<fixture_id>/<quantity>.field`` by
the ``generate`` stage; later stages read them back when present and rebuild
them deterministically otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from loguru import logger

from analysis.constants import FixtureKind, ProfileKind, System
from analysis.field_io import read_field, write_field
from analysis.fieldsgen import (
    ShockStates,
    constant_state,
    solve_shock_states,
    stationary_shear,
    stationary_shock,
    travelling_field,
    vacuum_band,
)
from analysis.grid import Field, Grid, from_components
from analysis.models import PressureLaw

from .run_config import FixtureSpec, ProfileSpec, RunConfig

FIELDS_DIR = "fields"
FIELD_SUFFIX = ".field"

# Besov exponent assumed for a constant quantity in rate predictions
SMOOTH_EXPONENT: float = 1.0


@dataclass(frozen=True)
class FixtureData:
    """Sampled fields of one fixture plus what the stages need to judge them.

    Attributes:
        fixture_id: Config identifier.
        spec: The fixture entry.
        grid: Lattice of every field.
        fields: ``rho``, ``u`` (and ``p`` for the incompressible system) or
            ``w`` for scalar fixtures.
        law: Pressure law of the compressible system, else ``None``.
        shock: Jump data of shock fixtures, else ``None``.
    """

    fixture_id: str
    spec: FixtureSpec
    grid: Grid
    fields: dict[str, Field]
    law: PressureLaw | None
    shock: ShockStates | None

    @property
    def system(self) -> System | None:
        return self.spec.system

    @property
    def law_or_p(self) -> Field | PressureLaw:
        if self.system is System.COMPRESSIBLE and self.law is not None:
            return self.law
        return self.fields["p"]


def _constant_pressure(grid: Grid, value: float) -> Field:
    return Field(grid, np.full((grid.n_t, *grid.spatial_shape), float(value)))


def _velocity_from_profile(grid: Grid, spec: FixtureSpec, profile: ProfileSpec) -> Field:
    """Velocity ``profile(x1 - speed t) e_1``."""
    first = travelling_field(grid, profile.function(), spec.speed)
    if grid.d == 1:
        return first
    zero = first.with_values(np.zeros_like(first.values))
    return from_components([first, zero])


def _build_fields(
    spec: FixtureSpec, grid: Grid, law: PressureLaw
) -> tuple[dict[str, Field], ShockStates | None]:
    kind = spec.kind
    if kind is FixtureKind.SCALAR:
        assert spec.profile is not None
        return {"w": travelling_field(grid, spec.profile.function(), spec.speed)}, None
    if kind is FixtureKind.SHEAR:
        assert spec.rho_profile is not None and spec.v_profile is not None
        rho, u, p = stationary_shear(
            grid, spec.rho_profile.function(), spec.v_profile.function(), spec.pressure
        )
        return {"rho": rho, "u": u, "p": p}, None
    shock = None
    if kind is FixtureKind.CONSTANT:
        rho, u = constant_state(grid, spec.rho0, spec.u0)
    elif kind is FixtureKind.SHOCK:
        shock, rho, u = stationary_shock(
            law, spec.rho_left, spec.rho_right, grid, allow_reversed=spec.allow_reversed
        )
    elif kind is FixtureKind.VACUUM_BAND:
        rho, u = vacuum_band(grid, spec.band, spec.u0, spec.rho0)
    else:
        assert spec.rho_profile is not None and spec.u_profile is not None
        rho = travelling_field(grid, spec.rho_profile.function(), spec.speed)
        u = _velocity_from_profile(grid, spec, spec.u_profile)
    fields = {"rho": rho, "u": u}
    if spec.system is System.INHOMOGENEOUS_INCOMPRESSIBLE:
        fields["p"] = _constant_pressure(grid, spec.pressure)
    return fields, shock


def quantities(spec: FixtureSpec) -> tuple[str, ...]:
    if spec.kind is FixtureKind.SCALAR:
        return ("w",)
    if spec.system is System.INHOMOGENEOUS_INCOMPRESSIBLE:
        return ("rho", "u", "p")
    return ("rho", "u")


def field_path(out_dir: str | Path, fixture_id: str, quantity: str) -> Path:
    return Path(out_dir) / FIELDS_DIR / fixture_id / f"{quantity}{FIELD_SUFFIX}"


def build_fixture(config: RunConfig, fixture_id: str) -> FixtureData:
    """Generate the fields of ``fixture_id`` from its config entry."""
    spec = config.fixtures[fixture_id]
    grid = config.fixture_grid(fixture_id)
    law = config.law.build()
    fields, shock = _build_fields(spec, grid, law)
    logger.debug(f"Built fixture '{fixture_id}' ({spec.kind.value}) on {grid}")
    return FixtureData(
        fixture_id=fixture_id,
        spec=spec,
        grid=grid,
        fields=fields,
        law=law if spec.system is System.COMPRESSIBLE else None,
        shock=shock,
    )


def load_fixture(config: RunConfig, fixture_id: str, out_dir: str | Path | None) -> FixtureData:
    """Read serialized fields when all are present, else build them."""
    spec = config.fixtures[fixture_id]
    if out_dir is not None:
        paths = {q: field_path(out_dir, fixture_id, q) for q in quantities(spec)}
        if all(p.is_file() for p in paths.values()):
            fields = {q: read_field(p) for q, p in paths.items()}
            law = config.law.build()
            shock = None
            if spec.kind is FixtureKind.SHOCK:
                shock = solve_shock_states(
                    law, spec.rho_left, spec.rho_right, spec.allow_reversed
                )
            logger.debug(f"Loaded fixture '{fixture_id}' from {paths[quantities(spec)[0]].parent}")
            return FixtureData(
                fixture_id=fixture_id,
                spec=spec,
                grid=next(iter(fields.values())).grid,
                fields=fields,
                law=law if spec.system is System.COMPRESSIBLE else None,
                shock=shock,
            )
    return build_fixture(config, fixture_id)


def save_fixture(fixture: FixtureData, out_dir: str | Path) -> dict[str, Path]:
    """Write every field of ``fixture`` and return the paths by quantity."""
    return {
        quantity: write_field(field, field_path(out_dir, fixture.fixture_id, quantity))
        for quantity, field in fixture.fields.items()
    }


def _step_like(a: float, b: float) -> ProfileSpec:
    return ProfileSpec(kind=ProfileKind.STEP, a=a, b=b)


def quantity_profile(spec: FixtureSpec, quantity: str) -> ProfileSpec | None:
    """Profile that generated ``quantity``; ``None`` for constant quantities."""
    kind = spec.kind
    if quantity == "p" or kind is FixtureKind.CONSTANT:
        return None
    if kind is FixtureKind.SCALAR:
        return spec.profile
    if kind is FixtureKind.SHEAR:
        return spec.rho_profile if quantity == "rho" else spec.v_profile
    if kind is FixtureKind.TRAVELLING:
        return spec.rho_profile if quantity == "rho" else spec.u_profile
    if kind is FixtureKind.SHOCK:
        return _step_like(0.0, 0.5)
    # vacuum band: density jumps, velocity jumps unless it vanishes
    if quantity == "u" and not any(spec.u0):
        return None
    if quantity == "rho" and spec.rho0 == 0:
        return None
    return _step_like(*spec.band)


def expected_exponent(spec: FixtureSpec, quantity: str, p: float) -> tuple[float | None, bool]:
    """Expected Besov exponent of ``quantity`` at ``p`` and whether it is sharp."""
    profile = quantity_profile(spec, quantity)
    if profile is None:
        return None, True
    return profile.expected_exponent(p)


def regularity_pair(spec: FixtureSpec, p: float = 3.0) -> tuple[float, float]:
    """``(alpha, beta)`` for rate predictions: config overrides, else profiles at ``p``."""
    alpha = spec.alpha
    beta = spec.beta
    if alpha is None:
        value, _ = expected_exponent(spec, "u", p)
        alpha = SMOOTH_EXPONENT if value is None else value
    if beta is None:
        value, _ = expected_exponent(spec, "rho", p)
        beta = SMOOTH_EXPONENT if value is None else value
    return alpha, beta

