"""
Command line interface.

Batch runner for scenario configs: parse, verify, emit cost tables.
"""

from .suite import (
    COLUMNS,
    ConfigParseError,
    OutputFormat,
    ScenarioConfig,
    SuiteRow,
    emit_table,
    parse_configs,
    run_suite,
)

__all__ = [
    "COLUMNS",
    "ConfigParseError",
    "OutputFormat",
    "ScenarioConfig",
    "SuiteRow",
    "emit_table",
    "parse_configs",
    "run_suite",
]
