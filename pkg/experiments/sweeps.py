"""Stage planning and evaluation of the sweep matrix.

Every stage expands into independent cells (one fixture, optionally one
test function). Cells are evaluated sequentially or in a process pool,
recorded in the run manifest as they finish, and written to CSV in plan
order once the stage is complete.
"""

from __future__ import annotations

import hashlib
import math
from collections.abc import Callable
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np
from loguru import logger

from analysis.besov import besov_norm_estimate, fit_regularity_exponent
from analysis.commutators import (
    COMMUTATOR_TERMS,
    CommutatorSweep,
    commutator_sweep,
    decomposition_residual,
    iterated_limit_sweep,
)
from analysis.constants import Axes, FixtureKind, System, Verdict
from analysis.defect import (
    defect_report,
    dissipation_matches,
    shock_pairing,
    total_energy_series,
)
from analysis.exporter import (
    ReportExporter,
    Row,
    besov_norm_row,
    bv_rows,
    commutator_rows,
    defect_row,
    defect_series_rows,
    energy_series_rows,
    field_row,
    mollify_row,
    rate_row,
    regularity_row,
)
from analysis.models import predicted_exponents
from analysis.mollify import mollification_rate_check
from analysis.rate_fit import RateFit

from .fixtures import (
    FixtureData,
    build_fixture,
    expected_exponent,
    load_fixture,
    regularity_pair,
    save_fixture,
)
from .manifest import CellRecord, RunManifest
from .run_config import RunConfig

STAGES: tuple[str, ...] = (
    "generate",
    "besov-fit",
    "mollify-rates",
    "commutator-sweep",
    "energy-defect",
)

STAGE_TABLES: dict[str, tuple[str, ...]] = {
    "generate": ("fields",),
    "besov-fit": ("besov_fits", "besov_norms"),
    "mollify-rates": ("mollify_rates",),
    "commutator-sweep": ("commutators", "commutator_rates", "bv_terms"),
    "energy-defect": ("defects", "defect_series", "energy_series", "energy_checks"),
}

# Terms whose magnitude stays below this fraction of the largest term, or
# below the absolute floor, are rounding noise and get an exact verdict.
NEGLIGIBLE_TERM_FRACTION: float = 1e-10
NEGLIGIBLE_TERM_FLOOR: float = 1e-12
SHARPNESS_SLOPE: float = 0.05
ENERGY_CONSTANCY_TOLERANCE: float = 1e-12
REGULARITY_P: float = 3.0

Tables = dict[str, list[Row]]


@dataclass(frozen=True)
class Cell:
    """One unit of work: a stage applied to a fixture (and test function)."""

    stage: str
    fixture_id: str
    phi_id: str | None = None

    @property
    def key(self) -> str:
        parts = [self.stage, self.fixture_id]
        if self.phi_id is not None:
            parts.append(self.phi_id)
        return "/".join(parts)


def config_digest(config: RunConfig) -> str:
    return hashlib.sha256(config.model_dump_json().encode("utf-8")).hexdigest()[:16]


def plan_stage(config: RunConfig, stage: str) -> list[Cell]:
    """Cells of ``stage`` in config order."""
    cells: list[Cell] = []
    for fixture_id, spec in config.fixtures.items():
        if stage in ("generate", "besov-fit"):
            cells.append(Cell(stage, fixture_id))
        elif stage == "mollify-rates":
            if spec.kind is FixtureKind.SCALAR:
                cells.append(Cell(stage, fixture_id))
        elif stage == "commutator-sweep":
            if spec.system is not None:
                cells += [Cell(stage, fixture_id, name) for name, _ in config.test_functions_for(fixture_id)]
        elif stage == "energy-defect":
            if spec.system is not None and spec.is_solution:
                cells.append(Cell(stage, fixture_id))
                cells += [Cell(stage, fixture_id, name) for name, _ in config.test_functions_for(fixture_id)]
        else:
            raise ValueError(f"Unknown stage '{stage}'.")
    return cells


def exponent_verdict(
    alpha_hat: float,
    degenerate: bool,
    expected: float | None,
    sharp: bool,
    tolerance: float,
) -> Verdict:
    """Judge a fitted exponent; lower-bound-only expectations accept larger fits."""
    if expected is None:
        return Verdict.EXACT if degenerate else Verdict.FAIL
    if degenerate or not math.isfinite(alpha_hat):
        return Verdict.FAIL
    gap = alpha_hat - expected
    ok = abs(gap) <= tolerance if sharp else gap >= -tolerance
    return Verdict.PASS if ok else Verdict.FAIL


def _slope_ok(fit: RateFit, expected: float, sharp: bool, tolerance: float) -> bool:
    if fit.exact:
        return False
    gap = fit.slope - expected
    return abs(gap) <= tolerance if sharp else gap >= -tolerance


def _tolerances(config: RunConfig) -> tuple[float, float, float]:
    tol = config.tolerances
    if tol.slope is None or tol.dissipation is None or tol.exponent is None:
        raise ValueError("Tolerances must be resolved before evaluating cells.")
    return tol.slope, tol.dissipation, tol.exponent


def _generate(config: RunConfig, out_dir: str, cell: Cell) -> Tables:
    fixture = build_fixture(config, cell.fixture_id)
    paths = save_fixture(fixture, out_dir)
    rows = [
        field_row(cell.fixture_id, q, str(paths[q].relative_to(out_dir)), fixture.fields[q])
        for q in fixture.fields
    ]
    return {"fields": rows}


def _besov(config: RunConfig, fixture: FixtureData) -> Tables:
    _, _, exponent_tol = _tolerances(config)
    spec = fixture.spec
    fits: list[Row] = []
    norms: list[Row] = []
    for quantity, field in fixture.fields.items():
        if quantity == "p":
            continue
        for p in config.sweep.p_values:
            fit = fit_regularity_exponent(
                field, p, axes=spec.axes, max_scale=config.sweep.max_scale
            )
            expected, sharp = expected_exponent(spec, quantity, p)
            verdict = exponent_verdict(fit.alpha_hat, fit.degenerate, expected, sharp, exponent_tol)
            fits.append(
                regularity_row(
                    fixture.fixture_id, quantity, p, fit, expected, exponent_tol, verdict.value
                )
            )
            alpha = min(1.0, max(0.0, 1.0 if expected is None else expected))
            estimate = besov_norm_estimate(field, p, alpha, axes=spec.axes)
            norms.append(besov_norm_row(fixture.fixture_id, quantity, estimate))
    return {"besov_fits": fits, "besov_norms": norms}


def _mollify(config: RunConfig, fixture: FixtureData) -> Tables:
    slope_tol, _, _ = _tolerances(config)
    spec = fixture.spec
    eps = config.epsilons_for(fixture.fixture_id)
    rows: list[Row] = []
    for quantity, field in fixture.fields.items():
        for p in config.sweep.p_values:
            difference, gradient = mollification_rate_check(field, p, eps, spec.axes)
            expected, sharp = expected_exponent(spec, quantity, p)
            if expected is None:
                ok = difference.exact and gradient.exact
                verdict = Verdict.EXACT if ok else Verdict.FAIL
            else:
                ok = _slope_ok(difference, expected, sharp, slope_tol) and _slope_ok(
                    gradient, expected - 1.0, sharp, slope_tol
                )
                verdict = Verdict.PASS if ok else Verdict.FAIL
            rows.append(
                mollify_row(
                    fixture.fixture_id, quantity, p, (difference, gradient),
                    expected, slope_tol, verdict.value,
                )
            )
    return {"mollify_rates": rows}


def _term_rows(
    fixture: FixtureData, phi_id: str, sweep: CommutatorSweep, slope_tol: float
) -> list[Row]:
    system = fixture.system
    assert system is not None
    alpha, beta = regularity_pair(fixture.spec, REGULARITY_P)
    predicted = predicted_exponents(system, alpha, beta)
    predicted["S_int"] = predicted.pop("S", math.nan)
    magnitudes = {
        name: max(abs(r.term(name) or 0.0) for r in sweep.reports) for name in sweep.fits
    }
    reference = max(magnitudes.values(), default=0.0)
    negligible = max(NEGLIGIBLE_TERM_FRACTION * reference, NEGLIGIBLE_TERM_FLOOR)
    rows: list[Row] = []
    decaying: list[float] = []
    vanishing: list[str] = []
    for name in COMMUTATOR_TERMS:
        if name not in sweep.fits:
            continue
        fit = sweep.fits[name]
        target = predicted[name]
        if magnitudes[name] <= negligible:
            # rounding noise: no slope
            fit = None
            verdict = Verdict.EXACT
            vanishing.append(name)
        elif fit is None:
            verdict = Verdict.FAIL
        else:
            verdict = Verdict.PASS if fit.slope >= target - slope_tol else Verdict.FAIL
            decaying.append(fit.slope)
        rows.append(rate_row(fixture.fixture_id, phi_id, name, fit, target, slope_tol, verdict.value))
    if vanishing:
        logger.info(
            f"{', '.join(vanishing)} vanish identically on '{fixture.fixture_id}' "
            f"against '{phi_id}'; no rate is measured for them"
        )

    if fixture.spec.kind is FixtureKind.SHOCK:
        slowest = min(decaying, default=math.nan)
        ok = math.isfinite(slowest) and slowest <= SHARPNESS_SLOPE
        rows.append(
            {
                "fixture_id": fixture.fixture_id,
                "phi": phi_id,
                "term": "sharpness",
                "slope": slowest,
                "r_squared": math.nan,
                "predicted": SHARPNESS_SLOPE,
                "tolerance": 0.0,
                "verdict": (Verdict.PASS if ok else Verdict.FAIL).value,
            }
        )
    return rows


def _commutators(config: RunConfig, fixture: FixtureData, phi_id: str) -> Tables:
    slope_tol, _, _ = _tolerances(config)
    system = fixture.system
    assert system is not None
    phi = config.test_functions[phi_id].build()
    rho, u = fixture.fields["rho"], fixture.fields["u"]
    eps = config.epsilons_for(fixture.fixture_id)
    sweep = commutator_sweep(system, rho, u, fixture.law_or_p, phi, eps)
    decomposition = {
        r.epsilon: decomposition_residual(rho, u, r.epsilon, Axes.SPACETIME) for r in sweep.reports
    }
    tables: Tables = {
        "commutators": commutator_rows(
            fixture.fixture_id, system.value, phi_id, sweep, decomposition
        ),
        "commutator_rates": _term_rows(fixture, phi_id, sweep, slope_tol),
        "bv_terms": [],
    }
    if fixture.spec.bv_terms and fixture.law is not None:
        limit = iterated_limit_sweep(rho, u, fixture.law, phi, eps, config.sweep.h_values)
        tables["bv_terms"] = bv_rows(fixture.fixture_id, phi_id, limit)
    return tables


def _energy(fixture: FixtureData) -> Tables:
    system = fixture.system
    assert system is not None
    rho, u = fixture.fields["rho"], fixture.fields["u"]
    series = total_energy_series(system, rho, u, fixture.law)
    times = fixture.grid.times[rho.t_start : rho.t_stop]
    mean = float(np.mean(series))
    spread = float(np.max(np.abs(series - mean)))
    deviation = spread / abs(mean) if mean != 0 else spread
    if deviation == 0:
        verdict = Verdict.EXACT
    else:
        verdict = Verdict.PASS if deviation < ENERGY_CONSTANCY_TOLERANCE else Verdict.FAIL
    return {
        "energy_series": energy_series_rows(fixture.fixture_id, times, series),
        "energy_checks": [
            {
                "fixture_id": fixture.fixture_id,
                "stationary": True,
                "max_relative_deviation": deviation,
                "tolerance": ENERGY_CONSTANCY_TOLERANCE,
                "verdict": verdict.value,
            }
        ],
    }


def _defect(config: RunConfig, fixture: FixtureData, phi_id: str) -> Tables:
    _, dissipation_tol, _ = _tolerances(config)
    system = fixture.system
    assert system is not None
    phi = config.test_functions[phi_id].build()
    report = defect_report(
        fixture.fixture_id,
        system,
        fixture.fields["rho"],
        fixture.fields["u"],
        fixture.law_or_p,
        phi,
        config.epsilons_for(fixture.fixture_id),
        phi_label=phi_id,
    )
    if fixture.shock is not None:
        oracle = shock_pairing(fixture.shock, phi, fixture.grid)
        verdict = dissipation_matches(report.weak_residual, oracle, dissipation_tol)
        tolerance = dissipation_tol
    else:
        oracle = 0.0
        tolerance = report.quadrature_floor
        if report.weak_residual == 0:
            verdict = Verdict.EXACT
        else:
            within = abs(report.weak_residual) <= report.quadrature_floor
            verdict = Verdict.PASS if within else Verdict.FAIL
    return {
        "defects": [defect_row(report, oracle, tolerance, verdict.value)],
        "defect_series": defect_series_rows(report),
    }


@lru_cache(maxsize=8)
def _cached_config(config_json: str) -> RunConfig:
    return RunConfig.model_validate_json(config_json)


@lru_cache(maxsize=4)
def _cached_fixture(config_json: str, out_dir: str, fixture_id: str) -> FixtureData:
    return load_fixture(_cached_config(config_json), fixture_id, out_dir)


def evaluate_cell(config_json: str, out_dir: str, cell: Cell) -> Tables:
    """Evaluate one cell; a module-level function so worker processes can run it."""
    config = _cached_config(config_json)
    if cell.stage == "generate":
        return _generate(config, out_dir, cell)
    fixture = _cached_fixture(config_json, out_dir, cell.fixture_id)
    if cell.stage == "besov-fit":
        return _besov(config, fixture)
    if cell.stage == "mollify-rates":
        return _mollify(config, fixture)
    if cell.stage == "commutator-sweep":
        assert cell.phi_id is not None
        return _commutators(config, fixture, cell.phi_id)
    if cell.phi_id is None:
        return _energy(fixture)
    return _defect(config, fixture, cell.phi_id)


def _evaluate_all(
    todo: list[Cell],
    config_json: str,
    out_dir: str,
    workers: int,
    record: Callable[[Cell, Tables], None],
) -> None:
    if workers <= 1 or len(todo) <= 1:
        for cell in todo:
            logger.debug(f"Evaluating {cell.key}")
            record(cell, evaluate_cell(config_json, out_dir, cell))
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = {pool.submit(evaluate_cell, config_json, out_dir, c): c for c in todo}
        for future in as_completed(futures):
            record(futures[future], future.result())


def run_stage(
    config: RunConfig, stage: str, out_dir: str | Path, workers: int = 1
) -> dict[str, Path]:
    """Evaluate every pending cell of ``stage`` and write its CSV tables.

    Args:
        config: Validated configuration with resolved tolerances.
        stage: One of ``STAGES``.
        out_dir: Output directory holding the manifest and the reports.
        workers: Worker processes; 1 evaluates in the calling process.

    Returns:
        CSV path per table written.
    """
    out = Path(out_dir)
    manifest = RunManifest(out)
    state = manifest.read()
    digest = config_digest(config)
    cells = plan_stage(config, stage)
    keys = [c.key for c in cells]
    if state.plans.get(stage) != keys or state.digests.get(stage) != digest:
        manifest.write_plan(stage, digest, keys)
        state.plans[stage] = keys
        state.digests[stage] = digest
    done = state.completed(stage)
    results: dict[str, Tables] = {k: r.tables for k, r in done.items() if k in keys}
    todo = [c for c in cells if c.key not in results]
    if results and todo:
        logger.warning(
            f"Resuming stage '{stage}': {len(results)} of {len(cells)} cells already complete"
        )

    def record(cell: Cell, tables: Tables) -> None:
        manifest.write_cell(CellRecord(stage, cell.key, digest, tables))
        results[cell.key] = tables

    _evaluate_all(todo, config.model_dump_json(), str(out), workers, record)

    exporter = ReportExporter(out)
    return {
        table: exporter.export(
            table, [row for c in cells for row in results[c.key].get(table, [])]
        )
        for table in STAGE_TABLES[stage]
    }
