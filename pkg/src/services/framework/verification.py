"""
Scenario verification against the linear algebra oracle

verify_scenario runs an encode program on random source symbols (sinks
start with zero symbols) and checks:
- outputs: every sink (systematic) or every processor (non-systematic)
  holds its coordinate of x . A or x . G exactly
- C1, C2, cost: measured values equal the schedule prediction
- ports: no processor used more than p ports in any round
- run: the simulator accepted the program (members, destinations, payloads)

Failures are report entries, never exceptions.
"""

import logging
import time
from dataclasses import dataclass, field
from typing import List, Optional, TextIO

import numpy as np

from src.core.matrix import OracleOp, mat_oracle
from src.services.framework.encoder import (
    CostPrediction,
    encode_program,
    predicted_cost_framework,
    resolve_algorithm,
)
from src.services.framework.layout import plan_layout
from src.services.framework.scenario import Algorithm, EncodingScenario
from src.services.netsim import Program, RunReport, SimulationError, run

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one check."""
    name: str
    passed: bool
    detail: str = ""


@dataclass
class VerificationReport:
    """
    Outcome of verify_scenario.

    Attributes:
        scenario: Scenario label
        algorithm: Concrete algorithm that was run
        prediction: Predicted cost
        measured: Report of the last run (None if nothing ran)
        checks: Every check performed, in order
    """
    scenario: str
    algorithm: Algorithm
    prediction: CostPrediction
    measured: Optional[RunReport] = None
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> List[CheckResult]:
        return [check for check in self.checks if not check.passed]

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append(CheckResult(name, bool(passed), detail))


def expected_outputs(scenario: EncodingScenario, X):
    """Oracle result: (R, W) sink symbols or (N, W) codeword symbols."""
    gen = scenario.generator
    matrix = gen.A if gen.systematic else gen.G
    return mat_oracle(scenario.ctx, matrix, OracleOp.MATVEC, X)


def _inputs(scenario: EncodingScenario, X):
    GF = scenario.ctx.GF
    sinks = GF.Zeros((scenario.R, scenario.W))
    return np.concatenate([np.asarray(X), np.asarray(sinks)], axis=0).view(GF)


def _check_outputs(report: VerificationReport, scenario: EncodingScenario, run_report, X, trial: int):
    expected = expected_outputs(scenario, X)
    if scenario.generator.systematic:
        targets = scenario.sinks
    else:
        targets = tuple(range(scenario.N))
    wrong = [
        pid for i, pid in enumerate(targets)
        if not np.array_equal(run_report.outputs[pid], expected[i])
    ]
    report.add(
        f"outputs[{trial}]",
        not wrong,
        f"mismatch at processors {wrong[:5]}" if wrong else "",
    )


def _check_costs(report: VerificationReport, run_report: RunReport, prediction: CostPrediction):
    report.add("C1", run_report.C1 == prediction.C1, f"measured {run_report.C1}, predicted {prediction.C1}")
    report.add("C2", run_report.C2 == prediction.C2, f"measured {run_report.C2}, predicted {prediction.C2}")
    report.add(
        "cost",
        abs(run_report.cost - prediction.cost) <= 1e-9 * max(1.0, abs(prediction.cost)),
        f"measured {run_report.cost}, predicted {prediction.cost}",
    )
    report.add(
        "ports",
        not run_report.violations,
        f"{len(run_report.violations)} port violations" if run_report.violations else "",
    )


def verify_scenario(
    scenario: EncodingScenario,
    trials: int = 5,
    algorithm: Algorithm = Algorithm.AUTO,
    program: Optional[Program] = None,
    seed: Optional[int] = None,
    trace: Optional[TextIO] = None,
) -> VerificationReport:
    """
    Run ``trials`` random-input executions and compare with the oracle.

    Args:
        scenario: Scenario to verify
        trials: Random trials; 0 runs once on zero inputs and checks costs only
        algorithm: Algorithm for the encode program and the prediction
        program: Program to run instead of the scenario's own encode
            (negative controls)
        seed: Seed of the input generator (defaults to the scenario seed)
        trace: Optional sink for the netsim message dump
    """
    started = time.perf_counter()
    algorithm = resolve_algorithm(scenario, algorithm)
    layout = plan_layout(scenario)
    prediction = predicted_cost_framework(scenario, algorithm, layout=layout)
    program = encode_program(scenario, algorithm, layout) if program is None else program
    report = VerificationReport(scenario=scenario.label, algorithm=algorithm, prediction=prediction)

    rng = np.random.default_rng(scenario.seed if seed is None else seed)
    GF = scenario.ctx.GF
    params = scenario.params

    for trial in range(max(trials, 1)):
        if trials == 0:
            X = GF.Zeros((scenario.K, scenario.W))
        else:
            X = GF.Random((scenario.K, scenario.W), seed=rng)
        try:
            run_report = run(program, params, _inputs(scenario, X), trace=trace, strict=False)
        except SimulationError as exc:
            report.add("run", False, str(exc))
            break
        report.measured = run_report
        if trials:
            _check_outputs(report, scenario, run_report, X, trial)
        _check_costs(report, run_report, prediction)

    if report.passed:
        logger.info(
            "Scenario verified",
            extra={
                "event": "scenario_verified",
                "scenario": scenario.label,
                "algorithm": algorithm.value,
                "duration_ms": round((time.perf_counter() - started) * 1000, 3),
            }
        )
    else:
        logger.warning(
            "Verification failed",
            extra={
                "event": "verification_failed",
                "scenario": scenario.label,
                "algorithm": algorithm.value,
                "failures": [check.name for check in report.failures],
            }
        )
    return report
