"""
Master Configuration System
Consolidates environment and .env settings for the encoding simulator.

All settings are read from environment variables prefixed with ``DECENC_``
(for example ``DECENC_DEFAULT_SEED=7``) or from a local ``.env`` file.
"""

from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import load_dotenv
from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

# Load environment variables
load_dotenv()


_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")
_OUTPUT_FORMATS = ("csv", "json-lines")


class SimulatorSettings(BaseSettings):
    """Defaults for simulator runs and experiment sweeps."""

    default_seed: int = Field(default=0, ge=0, description="Seed used when a scenario gives none")
    default_trials: int = Field(default=5, ge=0, description="Random-input trials per scenario")
    default_format: str = Field(default="csv", description="Table format emitted by the CLI")

    model_config = SettingsConfigDict(
        env_prefix="DECENC_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )

    @field_validator("default_format")
    @classmethod
    def _known_format(cls, value: str) -> str:
        if value not in _OUTPUT_FORMATS:
            raise ValueError(f"default_format must be one of {_OUTPUT_FORMATS}, got {value!r}")
        return value


class LoggingSettings(BaseSettings):
    """Logging output settings."""

    log_level: str = Field(default="WARNING", description="Root logging level")
    json_logs: bool = Field(default=True, description="Emit JSON log records")
    log_file: Optional[Path] = Field(default=None, description="Optional log file path")

    model_config = SettingsConfigDict(
        env_prefix="DECENC_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        value = value.upper()
        if value not in _LOG_LEVELS:
            raise ValueError(f"log_level must be one of {_LOG_LEVELS}, got {value!r}")
        return value


class MasterConfig:
    """
    Master configuration object consolidating all settings.

    Usage:
        from src.config import config

        print(config.simulator.default_trials)
        print(config.logging.log_level)
    """

    def __init__(self):
        self.simulator = SimulatorSettings()
        self.logging = LoggingSettings()

    def to_dict(self) -> Dict[str, Any]:
        """Export all configuration as dictionary."""
        return {
            "simulator": self.simulator.model_dump(),
            "logging": self.logging.model_dump(mode="json"),
        }

    def validate(self) -> Dict[str, list]:
        """
        Validate the combined configuration and return issues.

        Returns:
            Dictionary with 'errors' and 'warnings' lists
        """
        errors = []
        warnings = []

        if self.logging.log_file is not None:
            parent = self.logging.log_file.parent
            if parent.exists() and not parent.is_dir():
                errors.append(f"Log file parent is not a directory: {parent}")

        if self.simulator.default_trials == 0:
            warnings.append("Default trials is 0: only cost checks will run")

        return {
            "errors": errors,
            "warnings": warnings
        }


# Global configuration instance
config = MasterConfig()


# Convenience function
def get_config() -> MasterConfig:
    """Get global configuration instance."""
    return config
