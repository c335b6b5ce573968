"""Type-safe application settings backed by pydantic-settings.

Environment-specific defaults (output directory, worker count, verdict
tolerances) are read from ``ONSAGERLAB_*`` environment variables or a
``.env`` file. Invalid settings fail fast at startup.
"""

from __future__ import annotations

from pathlib import Path

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

LOG_LEVELS = ("TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL")


class Settings(BaseSettings):
    """Application settings loaded from environment variables or a ``.env`` file.

    Attributes:
        output_dir: Default output directory when neither ``--out`` nor the
            run configuration names one.
        workers: Default number of worker processes for the sweep matrix.
        log_level: Default loguru level.
        slope_tolerance: Allowed shortfall of a fitted rate against its
            predicted slope.
        dissipation_tolerance: Relative tolerance of a measured shock defect
            against the Rankine-Hugoniot oracle.
        exponent_tolerance: Allowed deviation of a fitted Besov exponent.
    """

    output_dir: str = Field(
        default="output",
        alias="ONSAGERLAB_OUT",
        description="Default output directory for reports and serialized fields",
    )

    workers: int = Field(
        default=1,
        alias="ONSAGERLAB_WORKERS",
        description="Worker processes evaluating sweep cells",
    )

    log_level: str = Field(
        default="INFO",
        alias="ONSAGERLAB_LOG_LEVEL",
        description="Minimum loguru level",
    )

    # Verdict tolerances
    slope_tolerance: float = Field(
        default=0.1,
        alias="ONSAGERLAB_SLOPE_TOLERANCE",
        description="Tolerance on fitted log-log slopes",
    )

    dissipation_tolerance: float = Field(
        default=0.02,
        alias="ONSAGERLAB_DISSIPATION_TOLERANCE",
        description="Relative tolerance of the shock defect against its oracle",
    )

    exponent_tolerance: float = Field(
        default=0.05,
        alias="ONSAGERLAB_EXPONENT_TOLERANCE",
        description="Tolerance on fitted Besov exponents",
    )

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    @field_validator("workers")
    @classmethod
    def validate_workers(cls, v: int) -> int:
        """Reject worker counts below one.

        Raises:
            ValueError: If ``v < 1``.
        """
        if v < 1:
            raise ValueError(f"Worker count must be at least 1, got {v}")
        return v

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        level = v.upper()
        if level not in LOG_LEVELS:
            raise ValueError(f"Unknown log level {v!r}; expected one of {', '.join(LOG_LEVELS)}")
        return level

    @field_validator("slope_tolerance", "dissipation_tolerance", "exponent_tolerance")
    @classmethod
    def validate_tolerance(cls, v: float) -> float:
        """Validate that a tolerance is positive.

        Args:
            v: Tolerance value to validate.

        Returns:
            The validated tolerance unchanged.

        Raises:
            ValueError: If ``v`` is not strictly positive.
        """
        if not v > 0:
            raise ValueError(f"Tolerance must be positive, got {v}")
        return v

    def get_output_dir_path(self) -> Path:
        """Return the default output directory as a ``Path`` object."""
        return Path(self.output_dir)


# Fails fast at import time if the environment is invalid
try:
    settings = Settings()
except Exception as e:
    import sys

    print(f"Configuration Error: {e}")
    print("\nPlease check your ONSAGERLAB_* environment variables or .env file.")
    print("See docs/configuration.md for the supported settings.")
    sys.exit(1)
