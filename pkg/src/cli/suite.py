"""
Experiment suite runner

Scenario configs are flat key=value stanzas separated by blank lines:

    # universal vs structured on a 6-point omega grid
    q=13
    K=6
    R=0
    p=2
    code=vandermonde-grid
    algorithm=universal,structured

Every (stanza, algorithm) pair is verified against the oracle and yields
one table row.

Usage:
    from src.cli.suite import parse_configs, run_suite

    configs = parse_configs(Path("sweep.cfg").read_text())
    status = run_suite(configs, sys.stdout)
"""

import csv
import io
import json
import logging
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, TextIO, Tuple

import galois
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    PrivateAttr,
    ValidationError,
    ValidationInfo,
    field_validator,
)

from src.config import get_config
from src.services.framework import (
    Algorithm,
    CodeKind,
    PaddingMode,
    UnsupportedAlgorithmError,
    block_lower_bounds,
    build_scenario,
    resolve_algorithm,
    verify_scenario,
)

logger = logging.getLogger(__name__)

GRID_CODES = (CodeKind.VANDERMONDE_GRID, CodeKind.GRS_NONSYSTEMATIC)


class ConfigParseError(ValueError):
    """A scenario config could not be parsed or built"""

    def __init__(self, message: str, line: Optional[int] = None, key: Optional[str] = None):
        self.line = line
        self.key = key
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key '{key}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(f"{prefix}{message}")


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON_LINES = "json-lines"


def _split_list(value: Any) -> Any:
    if isinstance(value, str):
        return tuple(item.strip() for item in value.split(",") if item.strip())
    return value


class ScenarioConfig(BaseModel):
    """One parsed config stanza."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    q: int = Field(..., ge=3, description="Prime field modulus")
    K: int = Field(..., ge=1, description="Number of sources")
    R: int = Field(0, ge=0, description="Number of sinks")
    p: int = Field(1, ge=1, description="Ports per processor")
    W: int = Field(1, ge=1, description="Field elements per symbol")
    alpha: float = Field(0.0, ge=0, description="Start-up cost per round")
    beta: float = Field(1.0, ge=0, description="Transfer cost per bit")
    code: CodeKind = Field(CodeKind.RANDOM, description="Generator family")
    algorithm: Tuple[Algorithm, ...] = Field((Algorithm.AUTO,), min_length=1)
    seed: Optional[int] = Field(None, ge=0)
    trials: Optional[int] = Field(None, ge=0)
    padding: PaddingMode = Field(PaddingMode.ZERO)
    phi_table: Optional[Tuple[int, ...]] = Field(None, alias="phi-table")

    _line: int = PrivateAttr(default=0)

    @field_validator("q")
    @classmethod
    def _prime_q(cls, value: int) -> int:
        if not galois.is_prime(value):
            raise ValueError(f"q={value} is not prime")
        return value

    @field_validator("algorithm", "phi_table", mode="before")
    @classmethod
    def _comma_list(cls, value: Any) -> Any:
        return _split_list(value)

    @field_validator("phi_table")
    @classmethod
    def _phi_needs_grid(
        cls, value: Optional[Tuple[int, ...]], info: ValidationInfo
    ) -> Optional[Tuple[int, ...]]:
        # an invalid code is reported on its own key
        if value is None or "code" not in info.data:
            return value
        code = info.data["code"]
        if code not in GRID_CODES:
            raise ValueError(f"phi-table does not apply to code={code.value}")
        return value

    @property
    def line(self) -> int:
        """First line of the stanza in the config text"""
        return self._line


class SuiteRow(BaseModel):
    """One emitted table row; field order is the column order."""

    K: int
    R: int
    p: int
    q: int
    W: int
    algorithm: str
    C1_measured: int
    C2_measured: int
    cost_measured: float
    C1_predicted: int
    C2_predicted: int
    c1_lowerbound: int
    c2_lowerbound: int
    verified: bool


COLUMNS = tuple(SuiteRow.model_fields)


def _stanzas(text: str) -> List[Dict[str, Tuple[str, int]]]:
    stanzas, current = [], {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            if current:
                stanzas.append(current)
                current = {}
            continue
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigParseError(f"expected key=value, got {line!r}", line=lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigParseError("missing key before '='", line=lineno)
        if key in current:
            raise ConfigParseError("duplicate key", line=lineno, key=key)
        current[key] = (value, lineno)
    if current:
        stanzas.append(current)
    return stanzas


def _build_config(stanza: Dict[str, Tuple[str, int]]) -> ScenarioConfig:
    first_line = min(lineno for _, lineno in stanza.values())
    try:
        config = ScenarioConfig.model_validate({key: value for key, (value, _) in stanza.items()})
    except ValidationError as exc:
        error = exc.errors()[0]
        key = str(error["loc"][0]) if error["loc"] else None
        line = stanza[key][1] if key in stanza else first_line
        if error["type"] == "extra_forbidden":
            raise ConfigParseError("unknown key", line=line, key=key) from exc
        raise ConfigParseError(error["msg"], line=line, key=key) from exc
    config._line = first_line
    return config


def parse_configs(text: str) -> List[ScenarioConfig]:
    """
    Parse key=value stanzas into ScenarioConfigs.

    ``#`` starts a comment. Keys are case sensitive.

    Raises:
        ConfigParseError: malformed line, duplicate or unknown key, or an
            invalid value (the error names the line and the key)
    """
    configs = [_build_config(stanza) for stanza in _stanzas(text)]
    logger.debug("Configs parsed", extra={"event": "configs_parsed", "count": len(configs)})
    return configs


def _format_row(row: SuiteRow) -> Dict[str, Any]:
    values = row.model_dump()
    values["cost_measured"] = f"{row.cost_measured:.6f}"
    return values


def emit_table(rows: Sequence[SuiteRow], fmt: OutputFormat = OutputFormat.CSV) -> str:
    """
    Render rows as CSV (header always present) or JSON lines.

    Costs are printed with six decimals; booleans as true/false.
    """
    fmt = OutputFormat(fmt)
    buffer = io.StringIO()
    if fmt is OutputFormat.CSV:
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(COLUMNS)
        for row in rows:
            values = _format_row(row)
            values["verified"] = "true" if row.verified else "false"
            writer.writerow([values[column] for column in COLUMNS])
        return buffer.getvalue()

    for row in rows:
        values = row.model_dump()
        values["cost_measured"] = round(row.cost_measured, 6)
        buffer.write(json.dumps(values) + "\n")
    return buffer.getvalue()


def run_suite(
    configs: Sequence[ScenarioConfig],
    out: TextIO,
    fmt: OutputFormat = OutputFormat.CSV,
    seed: Optional[int] = None,
    trials: Optional[int] = None,
    trace: Optional[TextIO] = None,
) -> int:
    """
    Verify every (config, algorithm) pair and write the table to ``out``.

    Seeds: a stanza's own seed, else ``seed`` (or the configured default)
    plus the stanza index. Trials: the stanza's, else ``trials``, else
    the configured default.

    Returns:
        0 if every row verified, 1 otherwise

    Raises:
        ConfigParseError: a stanza describes an impossible scenario
    """
    settings = get_config().simulator
    base_seed = settings.default_seed if seed is None else seed
    default_trials = settings.default_trials if trials is None else trials

    rows: List[SuiteRow] = []
    for index, config in enumerate(configs):
        scenario_seed = config.seed if config.seed is not None else base_seed + index
        try:
            scenario = build_scenario(
                q=config.q,
                K=config.K,
                R=config.R,
                p=config.p,
                W=config.W,
                code=config.code,
                alpha=config.alpha,
                beta=config.beta,
                seed=scenario_seed,
                phi=config.phi_table,
                padding=config.padding,
            )
        except ValueError as exc:
            raise ConfigParseError(str(exc), line=config.line) from exc

        logger.info(
            "Scenario started",
            extra={"event": "scenario_started", "scenario": scenario.label, "seed": scenario_seed}
        )
        n_trials = config.trials if config.trials is not None else default_trials
        for requested in config.algorithm:
            try:
                algorithm = resolve_algorithm(scenario, requested)
            except UnsupportedAlgorithmError as exc:
                raise ConfigParseError(str(exc), line=config.line, key="algorithm") from exc

            report = verify_scenario(scenario, n_trials, algorithm, trace=trace)
            c1_lb, c2_lb = block_lower_bounds(scenario, algorithm)
            measured = report.measured
            # a run the simulator rejected leaves no measurement
            C1, C2, cost = (measured.C1, measured.C2, measured.cost) if measured else (0, 0, 0.0)
            rows.append(SuiteRow(
                K=scenario.K,
                R=scenario.R,
                p=scenario.p,
                q=scenario.ctx.q,
                W=scenario.W,
                algorithm=algorithm.value,
                C1_measured=C1,
                C2_measured=C2,
                cost_measured=cost,
                C1_predicted=report.prediction.C1,
                C2_predicted=report.prediction.C2,
                c1_lowerbound=c1_lb,
                c2_lowerbound=c2_lb,
                verified=report.passed,
            ))

    out.write(emit_table(rows, fmt))
    return 0 if all(row.verified for row in rows) else 1
