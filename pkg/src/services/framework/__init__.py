"""
Decentralized encoding framework.

Scenario construction, processor grids with borrowed processors, phase
orchestration and verification against the oracle.
"""

from .encoder import (
    BlockPlan,
    CostPrediction,
    block_lower_bounds,
    encode_program,
    plan_blocks,
    predicted_cost_framework,
    resolve_algorithm,
)
from .layout import PAD, BlockAssignment, GridLayout, LayoutCase, classify, plan_layout
from .scenario import (
    Algorithm,
    CodeKind,
    EncodingScenario,
    GeneratorSpec,
    PaddingMode,
    ScenarioError,
    UnsupportedAlgorithmError,
    build_scenario,
    corrupt_generator,
)
from .verification import CheckResult, VerificationReport, expected_outputs, verify_scenario

__all__ = [
    "PAD",
    "Algorithm",
    "BlockAssignment",
    "BlockPlan",
    "CheckResult",
    "CodeKind",
    "CostPrediction",
    "EncodingScenario",
    "GeneratorSpec",
    "GridLayout",
    "LayoutCase",
    "PaddingMode",
    "ScenarioError",
    "UnsupportedAlgorithmError",
    "VerificationReport",
    "block_lower_bounds",
    "build_scenario",
    "classify",
    "corrupt_generator",
    "encode_program",
    "expected_outputs",
    "plan_blocks",
    "plan_layout",
    "predicted_cost_framework",
    "resolve_algorithm",
    "verify_scenario",
]
