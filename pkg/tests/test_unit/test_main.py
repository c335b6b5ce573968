"""Tests for the command-line entry point in main.py.

Covers argument parsing, output-directory precedence, configuration
preparation, the per-run log and the exit status of single commands.
Logging setup is replaced so the tests write no files under ``logs/``.
"""

from __future__ import annotations

from pathlib import Path

import pytest

import main as cli
from config.logging_config import RUN_LOG_NAME
from experiments.run_config import RunConfig
from main import (
    EXIT_ERROR,
    EXIT_OK,
    build_parser,
    main,
    prepare_config,
    resolve_output_dir,
)


@pytest.fixture(autouse=True)
def _no_log_files(monkeypatch: pytest.MonkeyPatch) -> None:
    """Keep main() from reconfiguring loguru during tests."""
    monkeypatch.setattr(cli, "setup_logging", lambda *args, **kwargs: None)


@pytest.mark.unit
class TestBuildParser:
    """Test suite for the argument parser."""

    @pytest.mark.parametrize(
        "command",
        ["generate", "besov-fit", "mollify-rates", "commutator-sweep", "energy-defect", "run"],
    )
    def test_build_parser_when_stage_command_then_config_required(self, command: str) -> None:
        """Tests that stage commands need --config."""
        # Act & Assert
        with pytest.raises(SystemExit):
            build_parser().parse_args([command])

    def test_build_parser_when_report_then_config_optional(self) -> None:
        """Tests that report runs from an output directory alone."""
        # Act
        args = build_parser().parse_args(["report", "--out", "runs/a", "--charts"])

        # Assert
        assert args.config is None
        assert args.out == Path("runs/a")
        assert args.charts is True

    def test_build_parser_when_options_given_then_parsed_as_ints(self) -> None:
        """Tests worker and seed parsing."""
        # Act
        args = build_parser().parse_args(
            ["generate", "--config", "a.cfg", "--workers", "3", "--seed", "11"]
        )

        # Assert
        assert (args.workers, args.seed) == (3, 11)

    @pytest.mark.edge_case
    def test_main_when_no_command_then_exits_with_usage_error(self) -> None:
        """Tests argparse's own usage error."""
        # Act & Assert
        with pytest.raises(SystemExit) as exc_info:
            main([])
        assert exc_info.value.code == 2


@pytest.mark.unit
class TestResolveOutputDir:
    """Test suite for resolve_output_dir."""

    def test_resolve_output_dir_when_out_given_then_wins(self, smoke_config: RunConfig) -> None:
        """Tests that --out overrides the configuration."""
        # Arrange
        config = smoke_config.model_copy(
            update={"output": smoke_config.output.model_copy(update={"dir": "from_config"})}
        )

        # Act & Assert
        assert resolve_output_dir(Path("cli"), config) == Path("cli")
        assert resolve_output_dir(None, config) == Path("from_config")

    def test_resolve_output_dir_when_nothing_given_then_settings_default(self) -> None:
        """Tests the ONSAGERLAB_OUT fallback."""
        # Act
        result = resolve_output_dir(None, None)

        # Assert
        assert result == cli.settings.get_output_dir_path()


@pytest.mark.unit
class TestPrepareConfig:
    """Test suite for prepare_config."""

    def test_prepare_config_when_loaded_then_tolerances_resolved(
        self, smoke_config_path: Path
    ) -> None:
        """Tests that unset tolerances come from the settings."""
        # Act
        config = prepare_config(smoke_config_path, seed=None)

        # Assert
        assert config.tolerances.slope == pytest.approx(cli.settings.slope_tolerance)
        assert config.tolerances.exponent == pytest.approx(cli.settings.exponent_tolerance)

    def test_prepare_config_when_seed_given_then_weierstrass_profile_reseeded(
        self, temp_output_dir: Path
    ) -> None:
        """Tests the --seed override on a seeded profile."""
        # Arrange
        path = temp_output_dir / "rough.cfg"
        path.write_text(
            "[grid]\nd = 1\nn_x = 1024\nn_t = 8\nT = 1.0\n\n"
            "[sweep]\nepsilons = [0.01, 0.02, 0.03, 0.04]\n\n"
            "[fixtures.rough]\nkind = \"scalar\"\n"
            "profile = { kind = \"weierstrass\", alpha = 0.5, n_terms = 6 }\n",
            encoding="utf-8",
        )

        # Act
        config = prepare_config(path, seed=17)

        # Assert
        assert config.fixtures["rough"].profile.seed == 17


@pytest.mark.unit
class TestMainExitCodes:
    """Test suite for main() exit status."""

    def test_main_when_generate_smoke_then_exit_ok(
        self, smoke_config_path: Path, temp_output_dir: Path
    ) -> None:
        """Tests a single successful stage."""
        # Act
        code = main(["generate", "--config", str(smoke_config_path), "--out", str(temp_output_dir)])

        # Assert
        assert code == EXIT_OK
        assert (temp_output_dir / "fields.csv").is_file()

    def test_main_when_stage_repeated_then_run_log_appended(
        self, smoke_config_path: Path, temp_output_dir: Path
    ) -> None:
        """Tests that both invocations land in the run log of the output directory."""
        # Arrange
        args = ["generate", "--config", str(smoke_config_path), "--out", str(temp_output_dir)]

        # Act
        main(args)
        main(args)

        # Assert
        contents = (temp_output_dir / RUN_LOG_NAME).read_text(encoding="utf-8")
        assert contents.count("Step 1 - generate") == 2

    @pytest.mark.edge_case
    def test_main_when_config_missing_then_exit_error(self, temp_output_dir: Path) -> None:
        """Tests that configuration errors map to exit status 2."""
        # Act
        code = main(
            ["generate", "--config", str(temp_output_dir / "absent.cfg"), "--out", str(temp_output_dir)]
        )

        # Assert
        assert code == EXIT_ERROR

    @pytest.mark.edge_case
    def test_main_when_config_invalid_then_exit_error(self, temp_output_dir: Path) -> None:
        """Tests a configuration that fails validation."""
        # Arrange
        bad = temp_output_dir / "bad.cfg"
        bad.write_text("[grid]\nd = 4\nn_x = 8\nn_t = 8\nT = 1.0\n", encoding="utf-8")

        # Act
        code = main(["generate", "--config", str(bad), "--out", str(temp_output_dir)])

        # Assert
        assert code == EXIT_ERROR

    @pytest.mark.edge_case
    def test_main_when_report_on_empty_directory_then_exit_error(
        self, temp_output_dir: Path
    ) -> None:
        """Tests that report needs a completed run."""
        # Act
        code = main(["report", "--out", str(temp_output_dir)])

        # Assert
        assert code == EXIT_ERROR

    @pytest.mark.edge_case
    def test_main_when_workers_zero_then_exit_error(
        self, smoke_config_path: Path, temp_output_dir: Path
    ) -> None:
        """Tests the worker-count check."""
        # Act
        code = main(
            [
                "generate", "--config", str(smoke_config_path),
                "--out", str(temp_output_dir), "--workers", "0",
            ]
        )

        # Assert
        assert code == EXIT_ERROR
