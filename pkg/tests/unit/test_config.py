"""
Configuration Tests

Tests environment-backed simulator and logging settings.
"""

import pytest
from pydantic import ValidationError

from src.config import LoggingSettings, MasterConfig, SimulatorSettings, get_config


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    """Remove DECENC_ overrides inherited from the shell."""
    for name in ("DEFAULT_SEED", "DEFAULT_TRIALS", "DEFAULT_FORMAT", "LOG_LEVEL", "JSON_LOGS", "LOG_FILE"):
        monkeypatch.delenv(f"DECENC_{name}", raising=False)


class TestSimulatorSettings:
    """Simulator defaults"""

    def test_defaults(self):
        settings = SimulatorSettings()
        assert settings.default_seed == 0
        assert settings.default_trials == 5
        assert settings.default_format == "csv"

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv("DECENC_DEFAULT_TRIALS", "3")
        monkeypatch.setenv("DECENC_DEFAULT_FORMAT", "json-lines")
        settings = SimulatorSettings()
        assert settings.default_trials == 3
        assert settings.default_format == "json-lines"

    def test_unknown_format(self, monkeypatch):
        monkeypatch.setenv("DECENC_DEFAULT_FORMAT", "xml")
        with pytest.raises(ValidationError):
            SimulatorSettings()

    def test_negative_seed(self, monkeypatch):
        monkeypatch.setenv("DECENC_DEFAULT_SEED", "-1")
        with pytest.raises(ValidationError):
            SimulatorSettings()


class TestLoggingSettings:
    """Logging defaults"""

    def test_defaults(self):
        settings = LoggingSettings()
        assert settings.log_level == "WARNING"
        assert settings.json_logs is True
        assert settings.log_file is None

    def test_level_is_normalized(self, monkeypatch):
        monkeypatch.setenv("DECENC_LOG_LEVEL", "debug")
        assert LoggingSettings().log_level == "DEBUG"

    def test_unknown_level(self, monkeypatch):
        monkeypatch.setenv("DECENC_LOG_LEVEL", "LOUD")
        with pytest.raises(ValidationError):
            LoggingSettings()


class TestMasterConfig:
    """Combined configuration"""

    def test_to_dict(self):
        data = MasterConfig().to_dict()
        assert set(data) == {"simulator", "logging"}
        assert data["simulator"]["default_trials"] == 5

    def test_validate_clean(self):
        assert MasterConfig().validate() == {"errors": [], "warnings": []}

    def test_validate_warns_on_zero_trials(self, monkeypatch):
        monkeypatch.setenv("DECENC_DEFAULT_TRIALS", "0")
        issues = MasterConfig().validate()
        assert issues["errors"] == []
        assert len(issues["warnings"]) == 1

    def test_validate_rejects_file_parent(self, monkeypatch, tmp_path):
        blocker = tmp_path / "not_a_dir"
        blocker.write_text("x", encoding="utf-8")
        monkeypatch.setenv("DECENC_LOG_FILE", str(blocker / "run.log"))
        assert len(MasterConfig().validate()["errors"]) == 1

    def test_global_instance(self):
        assert get_config() is get_config()
