"""Integration test specific fixtures.

Provides a command-line runner with logging setup disabled and a smoke
run shared by the pipeline tests. Global fixtures are inherited from
tests/conftest.py.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from pathlib import Path

import pytest

import main as cli

CliRunner = Callable[[Sequence[str]], int]


@pytest.fixture
def run_cli(monkeypatch: pytest.MonkeyPatch) -> CliRunner:
    """Return ``main`` with loguru setup replaced.

    Scope: function - the monkeypatch is undone after each test.

    Returns:
        Callable taking an argument list and returning the exit status.
    """
    monkeypatch.setattr(cli, "setup_logging", lambda *args, **kwargs: None)
    return cli.main


@pytest.fixture(scope="module")
def smoke_run(
    smoke_config_path: Path, tmp_path_factory: pytest.TempPathFactory
) -> tuple[int, Path]:
    """Run the whole smoke pipeline once per module.

    Scope: module - every stage on the smoke configuration takes a few
    seconds; tests only read the outputs.

    Returns:
        Tuple of ``(exit_status, output_dir)``.
    """
    out = tmp_path_factory.mktemp("smoke_run")
    with pytest.MonkeyPatch.context() as mp:
        mp.setattr(cli, "setup_logging", lambda *args, **kwargs: None)
        code = cli.main(["run", "--config", str(smoke_config_path), "--out", str(out)])
    return code, out
