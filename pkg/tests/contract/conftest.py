"""Shared fixtures for contract tests."""

from __future__ import annotations

from pathlib import Path

import pytest

from experiments.report import report
from experiments.run_config import (
    DEFAULT_BV_FLOOR_FACTOR,
    DEFAULT_DECOMPOSITION_TOLERANCE,
    load_config,
)
from experiments.sweeps import STAGES, run_stage


@pytest.fixture(scope="module")
def smoke_tables(smoke_config_path: Path, tmp_path_factory: pytest.TempPathFactory) -> Path:
    """Output directory of a full smoke run, stages plus report.

    Scope: module - the tables are only read.

    Returns:
        Directory holding every CSV table and ``summary.txt``.
    """
    config = load_config(smoke_config_path).with_tolerances(
        slope=0.1, dissipation=0.02, exponent=0.05
    )
    out = tmp_path_factory.mktemp("contract_run")
    for stage in STAGES:
        run_stage(config, stage, out)
    report(out, DEFAULT_DECOMPOSITION_TOLERANCE, DEFAULT_BV_FLOOR_FACTOR)
    return out
