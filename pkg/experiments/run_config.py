"""Run configuration: TOML ``key = value`` sections validated with pydantic.

A configuration names a default grid, a pressure law, the sweep parameters,
a set of fixtures and a set of test functions. Syntax errors report the
line and column; validation errors report the dotted entry, for example
``sweep.epsilons[0]``.
"""

from __future__ import annotations

import math
import tomllib
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from analysis.bumps import TestFunction, check_time_support
from analysis.constants import (
    DEFAULT_MAX_SHIFT_SCALE,
    MIN_FIT_SCALES,
    Axes,
    FixtureKind,
    ProfileKind,
    SpatialShape,
    System,
)
from analysis.errors import LabError
from analysis.fieldsgen import (
    Profile,
    knots_total_variation,
    sawtooth_profile,
    step_profile,
    triangle_knots,
    weierstrass_profile,
)
from analysis.grid import Grid, make_grid
from analysis.models import PressureLaw
from analysis.mollify import one_sided_kernel, resolution_floor

DEFAULT_DECOMPOSITION_TOLERANCE: float = 1e-8
DEFAULT_BV_FLOOR_FACTOR: float = 10.0

# Fixture kinds that are exact weak solutions of their system
SOLUTION_KINDS: frozenset[FixtureKind] = frozenset(
    {FixtureKind.CONSTANT, FixtureKind.SHEAR, FixtureKind.SHOCK, FixtureKind.VACUUM_BAND}
)


class ConfigError(ValueError):
    """Invalid run configuration.

    Attributes:
        entry: Dotted path of the offending entry (``"sweep.epsilons[0]"``).
    """

    def __init__(self, entry: str, message: str) -> None:
        self.entry = entry
        super().__init__(f"{entry}: {message}" if entry else message)


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class GridSpec(_Section):
    d: int = 1
    n_x: int = 256
    n_t: int = 64
    T: float = 1.0

    def build(self) -> Grid:
        return make_grid(self.d, self.n_x, self.n_t, self.T)


class LawSpec(_Section):
    kappa: float = 1.0
    gamma: float = 2.0
    floor: float | None = None

    def build(self) -> PressureLaw:
        return PressureLaw(self.kappa, self.gamma, self.floor)


class ProfileSpec(_Section):
    """Periodic profile ``offset + amplitude * base(wavenumber * x)``.

    ``base`` is 1 (constant), ``sin(2 pi x)`` (sine), the indicator of
    ``[a, b)`` (step), the seam ramp ``slope (x - 1/2)`` (sawtooth), linear
    interpolation of ``knots`` (knots, triangle wave by default) or a
    lacunary series with exponent ``alpha`` (weierstrass).
    """

    kind: ProfileKind
    amplitude: float = 1.0
    offset: float = 0.0
    wavenumber: int = Field(default=1, ge=1)
    a: float = 0.25
    b: float = 0.75
    slope: float = 2.0
    knots: list[tuple[float, float]] | None = None
    alpha: float = 0.5
    n_terms: int = Field(default=6, ge=0)
    seed: int = 0

    @model_validator(mode="after")
    def _check_parameters(self) -> ProfileSpec:
        if self.kind is ProfileKind.KNOTS and self.knots is not None:
            knots_total_variation(self.knots)
        if self.kind is ProfileKind.WEIERSTRASS and not 0 < self.alpha < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        return self

    def _base(self) -> Profile:
        kind = self.kind
        if kind is ProfileKind.CONSTANT:
            return lambda x: np.ones_like(np.asarray(x, dtype=np.float64))
        if kind is ProfileKind.SINE:
            return lambda x: np.sin(2 * np.pi * np.asarray(x, dtype=np.float64))
        if kind is ProfileKind.STEP:
            return step_profile(self.a, self.b)
        if kind is ProfileKind.SAWTOOTH:
            return sawtooth_profile(self.slope)
        if kind is ProfileKind.KNOTS:
            knots = self.knots or list(triangle_knots())
            xs = np.array([k[0] for k in knots])
            ys = np.array([k[1] for k in knots])
            return lambda x: np.interp(np.mod(x, 1.0), xs, ys)
        return weierstrass_profile(self.alpha, self.n_terms, self.seed)

    def function(self) -> Profile:
        base = self._base()
        k = self.wavenumber
        return lambda x: self.offset + self.amplitude * base(np.mod(k * np.asarray(x), 1.0))

    def expected_exponent(self, p: float) -> tuple[float | None, bool]:
        """Besov exponent at integrability ``p`` and whether it is sharp.

        Constant profiles return ``None``. Lipschitz profiles (sine, knots)
        return the lower bound 1; jumps give ``1/p``.
        """
        if self.kind is ProfileKind.CONSTANT or self.amplitude == 0:
            return None, True
        if self.kind in (ProfileKind.SINE, ProfileKind.KNOTS):
            return 1.0, False
        if self.kind in (ProfileKind.STEP, ProfileKind.SAWTOOTH):
            return (0.0 if math.isinf(p) else 1.0 / p), True
        return self.alpha, True

    @property
    def top_frequency(self) -> int:
        if self.kind is not ProfileKind.WEIERSTRASS:
            return 0
        return self.wavenumber * 2**self.n_terms


class FixtureSpec(_Section):
    """One fixture entry ``[fixtures.<id>]``."""

    kind: FixtureKind
    system: System | None = None
    grid: GridSpec | None = None
    rho0: float = 1.0
    u0: list[float] = Field(default_factory=lambda: [0.0])
    rho_profile: ProfileSpec | None = None
    v_profile: ProfileSpec | None = None
    u_profile: ProfileSpec | None = None
    profile: ProfileSpec | None = None
    pressure: float = 0.0
    rho_left: float = 1.0
    rho_right: float = 2.0
    allow_reversed: bool = False
    speed: float = 0.0
    band: tuple[float, float] = (0.4, 0.6)
    axes: Axes = Axes.SPACE
    alpha: float | None = None
    beta: float | None = None
    bv_terms: bool = False
    test_functions: list[str] | None = None
    epsilons: list[float] | None = None

    @model_validator(mode="after")
    def _check_kind(self) -> FixtureSpec:
        required = {
            FixtureKind.SHEAR: ("rho_profile", "v_profile"),
            FixtureKind.TRAVELLING: ("rho_profile", "u_profile"),
            FixtureKind.SCALAR: ("profile",),
        }.get(self.kind, ())
        missing = [name for name in required if getattr(self, name) is None]
        if missing:
            raise ValueError(f"kind '{self.kind.value}' needs {', '.join(missing)}")
        if self.kind is FixtureKind.SCALAR:
            if self.system is not None:
                raise ValueError("scalar fixtures carry no system")
            return self
        default = {
            FixtureKind.SHEAR: System.INHOMOGENEOUS_INCOMPRESSIBLE,
            FixtureKind.SHOCK: System.COMPRESSIBLE,
        }.get(self.kind, System.COMPRESSIBLE)
        if self.system is None:
            self.system = default
        if self.kind in (FixtureKind.SHEAR, FixtureKind.SHOCK) and self.system is not default:
            raise ValueError(f"kind '{self.kind.value}' is a {default.value} solution")
        return self

    @property
    def is_solution(self) -> bool:
        return self.kind in SOLUTION_KINDS

    @property
    def profiles(self) -> list[tuple[str, ProfileSpec]]:
        named = [
            ("rho_profile", self.rho_profile),
            ("v_profile", self.v_profile),
            ("u_profile", self.u_profile),
            ("profile", self.profile),
        ]
        return [(name, spec) for name, spec in named if spec is not None]


class TestFunctionSpec(_Section):
    """One test function entry ``[test_functions.<id>]``."""

    __test__ = False

    t_center: float
    t_radius: float = Field(gt=0)
    shape: SpatialShape = SpatialShape.CONSTANT
    x_center: list[float] = Field(default_factory=lambda: [0.5])
    x_radius: float = 0.25
    wavevector: list[int] = Field(default_factory=lambda: [1])
    amplitude: float = 0.5

    def build(self) -> TestFunction:
        return TestFunction(
            t_center=self.t_center,
            t_radius=self.t_radius,
            shape=self.shape,
            x_center=tuple(self.x_center),
            x_radius=self.x_radius,
            wavevector=tuple(self.wavevector),
            amplitude=self.amplitude,
        )


class SweepSpec(_Section):
    epsilons: list[float] = Field(min_length=MIN_FIT_SCALES)
    h_values: list[float] = Field(default_factory=list)
    p_values: list[float] = Field(default_factory=lambda: [1.0, 2.0, 3.0])
    max_scale: float = DEFAULT_MAX_SHIFT_SCALE


class ToleranceSpec(_Section):
    """Per-run overrides; unset entries fall back to the environment settings."""

    slope: float | None = Field(default=None, gt=0)
    dissipation: float | None = Field(default=None, gt=0)
    exponent: float | None = Field(default=None, gt=0)
    decomposition: float = Field(default=DEFAULT_DECOMPOSITION_TOLERANCE, gt=0)
    bv_floor_factor: float = Field(default=DEFAULT_BV_FLOOR_FACTOR, gt=0)


class OutputSpec(_Section):
    dir: str | None = None


class RunConfig(_Section):
    """A complete, validated run configuration."""

    grid: GridSpec = Field(default_factory=GridSpec)
    law: LawSpec = Field(default_factory=LawSpec)
    sweep: SweepSpec
    fixtures: dict[str, FixtureSpec] = Field(min_length=1)
    test_functions: dict[str, TestFunctionSpec] = Field(default_factory=dict)
    tolerances: ToleranceSpec = Field(default_factory=ToleranceSpec)
    output: OutputSpec = Field(default_factory=OutputSpec)

    def fixture_grid(self, fixture_id: str) -> Grid:
        spec = self.fixtures[fixture_id]
        return (spec.grid or self.grid).build()

    def epsilons_for(self, fixture_id: str) -> list[float]:
        return list(self.fixtures[fixture_id].epsilons or self.sweep.epsilons)

    def test_functions_for(self, fixture_id: str) -> list[tuple[str, TestFunctionSpec]]:
        """Test functions of a fixture in config order; all of them by default."""
        names = self.fixtures[fixture_id].test_functions
        if names is None:
            return list(self.test_functions.items())
        return [(name, self.test_functions[name]) for name in names]

    def with_seed(self, seed: int) -> RunConfig:
        """Copy with the ``i``-th seeded profile (config order) seeded ``seed + i``."""
        data = self.model_dump(mode="json")
        index = 0
        for fixture in data["fixtures"].values():
            for name in ("rho_profile", "v_profile", "u_profile", "profile"):
                profile = fixture.get(name)
                if profile is not None and profile["kind"] == ProfileKind.WEIERSTRASS.value:
                    profile["seed"] = seed + index
                    index += 1
        return RunConfig.model_validate(data)

    def with_tolerances(
        self, slope: float, dissipation: float, exponent: float
    ) -> RunConfig:
        """Copy with unset tolerances filled from the given defaults."""
        tol = self.tolerances
        resolved = tol.model_copy(
            update={
                "slope": tol.slope if tol.slope is not None else slope,
                "dissipation": tol.dissipation if tol.dissipation is not None else dissipation,
                "exponent": tol.exponent if tol.exponent is not None else exponent,
            }
        )
        return self.model_copy(update={"tolerances": resolved})


def _entry(loc: Sequence[Any]) -> str:
    parts = ""
    for item in loc:
        if isinstance(item, int):
            parts += f"[{item}]"
        else:
            parts += f".{item}" if parts else str(item)
    return parts


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    """Parse and validate configuration text.

    Raises:
        ConfigError: On syntax errors, schema violations or unsatisfiable
            resolution and support constraints.
    """
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(source, f"syntax error {exc}") from exc
    try:
        config = RunConfig.model_validate(raw)
    except ValidationError as exc:
        first = exc.errors()[0]
        raise ConfigError(_entry(first["loc"]), first["msg"]) from exc
    validate_semantics(config)
    return config


def load_config(path: str | Path) -> RunConfig:
    """Read and validate a ``.cfg`` file."""
    target = Path(path)
    if not target.is_file():
        raise ConfigError(str(target), "configuration file not found")
    return parse_config(target.read_text(encoding="utf-8"), source=str(target))


def _check_epsilons(
    config: RunConfig, fixture_id: str, grid: Grid, axes: Axes
) -> None:
    spec = config.fixtures[fixture_id]
    base = f"fixtures.{fixture_id}.epsilons" if spec.epsilons else "sweep.epsilons"
    values = config.epsilons_for(fixture_id)
    if len(values) < MIN_FIT_SCALES:
        raise ConfigError(base, f"need at least {MIN_FIT_SCALES} radii, got {len(values)}")
    floor = resolution_floor(grid, axes)
    for i, eps in enumerate(values):
        if eps < floor * (1 - 1e-9):
            raise ConfigError(
                f"{base}[{i}]",
                f"epsilon={eps:.6g} is below 4 x max(dx, dt) = {floor:.6g} "
                f"for fixture '{fixture_id}'",
            )


def validate_semantics(config: RunConfig) -> None:
    """Cross-field checks that need grids: floors, supports, resolutions.

    Raises:
        ConfigError: Naming the first offending entry.
    """
    try:
        config.law.build()
    except LabError as exc:
        raise ConfigError("law", str(exc)) from exc

    for fixture_id, spec in config.fixtures.items():
        prefix = f"fixtures.{fixture_id}"
        try:
            grid = config.fixture_grid(fixture_id)
        except LabError as exc:
            raise ConfigError(f"{prefix}.grid" if spec.grid else "grid", str(exc)) from exc

        if spec.kind is FixtureKind.SHOCK and grid.d != 1:
            raise ConfigError(f"{prefix}.kind", f"shock fixtures need a 1D grid, got d={grid.d}")
        if spec.kind is FixtureKind.SHEAR and grid.d != 2:
            raise ConfigError(f"{prefix}.kind", f"shear fixtures need a 2D grid, got d={grid.d}")
        if len(spec.u0) not in (1, grid.d):
            raise ConfigError(f"{prefix}.u0", f"expected 1 or {grid.d} components")

        for name, profile in spec.profiles:
            top = profile.top_frequency
            if top and top > grid.n_x // 4:
                raise ConfigError(
                    f"{prefix}.{name}.n_terms",
                    f"top frequency {top} is under-resolved on n_x={grid.n_x}",
                )

        axes = Axes.SPACETIME if spec.system is not None else spec.axes
        _check_epsilons(config, fixture_id, grid, axes)
        if spec.system is None:
            continue

        names = spec.test_functions
        if names is not None:
            for i, name in enumerate(names):
                if name not in config.test_functions:
                    raise ConfigError(
                        f"{prefix}.test_functions[{i}]", f"unknown test function '{name}'"
                    )
        phis = config.test_functions_for(fixture_id)
        if not phis:
            raise ConfigError(f"{prefix}.test_functions", "fixture needs a test function")

        margin = max(config.epsilons_for(fixture_id))
        if spec.bv_terms:
            if spec.system is not System.COMPRESSIBLE:
                raise ConfigError(f"{prefix}.bv_terms", "error terms need the compressible system")
            if len(config.sweep.h_values) < 2:
                raise ConfigError("sweep.h_values", "bv_terms fixtures need at least two h values")
            for i, h in enumerate(config.sweep.h_values):
                try:
                    one_sided_kernel(grid, h)
                except LabError as exc:
                    raise ConfigError(f"sweep.h_values[{i}]", str(exc)) from exc
            margin += max(config.sweep.h_values)

        for name, phi_spec in phis:
            try:
                check_time_support(phi_spec.build(), grid, margin, margin)
            except LabError as exc:
                raise ConfigError(f"test_functions.{name}", str(exc)) from exc
