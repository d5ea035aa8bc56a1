"""
Configuration module for the decentralized encoding simulator.

Usage:
    from src.config import config

    trials = config.simulator.default_trials
    level = config.logging.log_level
"""

from .master_config import (
    config,
    get_config,
    MasterConfig,
    SimulatorSettings,
    LoggingSettings,
)

__all__ = [
    "config",
    "get_config",
    "MasterConfig",
    "SimulatorSettings",
    "LoggingSettings",
]
