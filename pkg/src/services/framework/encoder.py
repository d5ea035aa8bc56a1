"""
Decentralized encode programs and their cost predictions

encode_program composes the phases of a layout into one netsim Program:
    SYS_TALL:    parallel block encodes, then parallel row reduces
    SYS_WIDE:    parallel row broadcasts, then parallel block encodes
    NONSYS_TALL: one all-to-all encode
    NONSYS_WIDE: parallel row broadcasts, then parallel column encodes
Phase 2 starts once every instance of phase 1 has finished.

Each block is encoded by the selected algorithm:
    universal:  prepare-and-shoot on the explicit block matrix
    structured: draw-and-loose on the block's evaluation points followed by
                the column scaling (Vandermonde-type codes); blocks whose
                points form no omega grid fall back to universal
    cauchy:     the two-pass Cauchy-like block program (GRS and Lagrange)
    auto:       cauchy for GRS/Lagrange, structured for Vandermonde-type
                codes, universal otherwise
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

from src.core.field import ceil_log
from src.services.all_to_all import (
    PrepareAndShoot,
    cauchy_block_program,
    cauchy_block_specs,
    detect_omega_grid,
    draw_and_loose_program,
    lower_bounds,
    predicted_profile_cauchy,
    predicted_profile_draw_and_loose,
    predicted_profile_universal,
)
from src.services.collectives import (
    broadcast_program,
    cost_broadcast,
    predicted_profile_broadcast,
    reduce_program,
)
from src.services.framework.layout import BlockAssignment, GridLayout, LayoutCase, plan_layout
from src.services.framework.scenario import (
    CAUCHY_CODES,
    VANDERMONDE_CODES,
    Algorithm,
    EncodingScenario,
    UnsupportedAlgorithmError,
)
from src.services.netsim import (
    NetParams,
    Parallel,
    Program,
    ScaleMap,
    Sequential,
    cost_from_counts,
    parallel_profile,
    sequential_profile,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BlockPlan:
    """Program and predicted per-round profile of one block encode."""
    block: BlockAssignment
    program: Program
    profile: Tuple[int, ...]
    algorithm: Algorithm


@dataclass(frozen=True)
class CostPrediction:
    """
    Predicted cost of a scenario.

    Attributes:
        C1, C2, cost: Schedule prediction (composed phase profiles); this
            is what a run must measure
        profile: Predicted m_t per round
        bound_cost: max block cost plus C_BR over M grid columns, the
            closed-form variant that ignores the extra root of the
            collective groups
    """
    C1: int
    C2: int
    cost: float
    profile: Tuple[int, ...]
    bound_cost: float


def resolve_algorithm(scenario: EncodingScenario, algorithm: Algorithm = Algorithm.AUTO) -> Algorithm:
    """
    Concrete algorithm for ``scenario``.

    Raises:
        UnsupportedAlgorithmError: structured on a code without evaluation
            points, or cauchy on a code that is not GRS/Lagrange
    """
    algorithm = Algorithm(algorithm)
    code = scenario.generator.code
    if algorithm is Algorithm.AUTO:
        if code in CAUCHY_CODES:
            return Algorithm.CAUCHY
        if code in VANDERMONDE_CODES:
            return Algorithm.STRUCTURED
        return Algorithm.UNIVERSAL
    if algorithm is Algorithm.STRUCTURED and code not in VANDERMONDE_CODES:
        raise UnsupportedAlgorithmError(f"structured encoding needs a Vandermonde-type code, got {code.value}")
    if algorithm is Algorithm.CAUCHY and code not in CAUCHY_CODES:
        raise UnsupportedAlgorithmError(f"cauchy encoding needs a GRS or Lagrange code, got {code.value}")
    return algorithm


def _universal_plan(scenario: EncodingScenario, block: BlockAssignment) -> BlockPlan:
    return BlockPlan(
        block=block,
        program=PrepareAndShoot(block.matrix, scenario.p, block.members),
        profile=tuple(predicted_profile_universal(block.size, scenario.p, scenario.W)),
        algorithm=Algorithm.UNIVERSAL,
    )


def _structured_plan(scenario: EncodingScenario, block: BlockAssignment) -> BlockPlan:
    gen, ctx, p = scenario.generator, scenario.ctx, scenario.p
    points = [gen.points[c] for c in block.columns]
    match = detect_omega_grid(points, ctx, p)
    if match is None:
        logger.debug(
            "No omega grid on block, falling back to universal",
            extra={"event": "structured_fallback", "scenario": scenario.label}
        )
        return _universal_plan(scenario, block)

    scale = ScaleMap({
        pid: ctx.GF(gen.scales[c]) for pid, c in zip(block.members, block.columns)
    })
    return BlockPlan(
        block=block,
        program=Sequential([
            draw_and_loose_program(match.grid, p, members=block.members, order=match.order),
            scale,
        ]),
        profile=tuple(predicted_profile_draw_and_loose(match.grid, p, scenario.W, match.order)),
        algorithm=Algorithm.STRUCTURED,
    )


def _cauchy_plans(scenario: EncodingScenario, layout: GridLayout) -> List[BlockPlan]:
    gen = scenario.generator
    specs = cauchy_block_specs(
        scenario.ctx, gen.alphas, gen.betas, gen.u, gen.v, scenario.p, gen.virtual or None
    )
    return [
        BlockPlan(
            block=block,
            program=cauchy_block_program(spec, scenario.p, block.members),
            profile=tuple(predicted_profile_cauchy(spec, scenario.p, scenario.W)),
            algorithm=Algorithm.CAUCHY,
        )
        for spec, block in zip(specs, layout.blocks)
    ]


def plan_blocks(
    scenario: EncodingScenario,
    layout: GridLayout,
    algorithm: Algorithm = Algorithm.AUTO,
) -> List[BlockPlan]:
    """One BlockPlan per layout block, in layout order."""
    algorithm = resolve_algorithm(scenario, algorithm)
    if algorithm is Algorithm.CAUCHY:
        return _cauchy_plans(scenario, layout)
    if algorithm is Algorithm.STRUCTURED:
        return [_structured_plan(scenario, block) for block in layout.blocks]
    return [_universal_plan(scenario, block) for block in layout.blocks]


def _collective_program(scenario: EncodingScenario, layout: GridLayout) -> Program:
    make = broadcast_program if layout.collective_first else reduce_program
    return Parallel([make(group, scenario.W, scenario.p) for group in layout.groups])


def _collective_profile(scenario: EncodingScenario, layout: GridLayout) -> List[int]:
    return parallel_profile([
        predicted_profile_broadcast(group.size, scenario.W, scenario.p)
        for group in layout.groups
    ])


def encode_program(
    scenario: EncodingScenario,
    algorithm: Algorithm = Algorithm.AUTO,
    layout: Optional[GridLayout] = None,
) -> Program:
    """
    Complete decentralized encode of ``scenario``.

    After the run sink T_r holds sum_k x_k A[k, r] (systematic) or every
    processor j holds sum_k x_k G[k, j] (non-systematic).
    """
    layout = plan_layout(scenario) if layout is None else layout
    encode = Parallel([plan.program for plan in plan_blocks(scenario, layout, algorithm)])
    if not layout.groups:
        return encode
    collective = _collective_program(scenario, layout)
    if layout.collective_first:
        return Sequential([collective, encode])
    return Sequential([encode, collective])


def predicted_cost_framework(
    scenario: EncodingScenario,
    algorithm: Algorithm = Algorithm.AUTO,
    params: Optional[NetParams] = None,
    layout: Optional[GridLayout] = None,
) -> CostPrediction:
    """Schedule prediction and closed-form variant of the encode cost."""
    params = scenario.params if params is None else params
    layout = plan_layout(scenario) if layout is None else layout
    plans = plan_blocks(scenario, layout, algorithm)

    encode = parallel_profile([list(plan.profile) for plan in plans])
    if layout.groups:
        collective = _collective_profile(scenario, layout)
        phases = [collective, encode] if layout.collective_first else [encode, collective]
    else:
        phases = [encode]
    profile = sequential_profile(phases)
    C1, C2 = len(profile), sum(profile)

    max_block = max(
        cost_from_counts(len(plan.profile), sum(plan.profile), params) for plan in plans
    )
    bound = max_block
    if layout.case is not LayoutCase.NONSYS_TALL:
        bound += cost_broadcast(layout.M, params.W, params)

    return CostPrediction(
        C1=C1,
        C2=C2,
        cost=cost_from_counts(C1, C2, params),
        profile=tuple(profile),
        bound_cost=bound,
    )


def block_lower_bounds(
    scenario: EncodingScenario,
    algorithm: Algorithm = Algorithm.AUTO,
    layout: Optional[GridLayout] = None,
) -> Tuple[int, int]:
    """
    (c1, c2) lower bounds for the largest all-to-all block.

    Universal encodes use the universal-algorithm bounds; structured and
    Cauchy encodes use the dissemination bound ceil(log_{p+1} n) for both.
    """
    layout = plan_layout(scenario) if layout is None else layout
    n = layout.max_block
    if resolve_algorithm(scenario, algorithm) is Algorithm.UNIVERSAL:
        return lower_bounds(n, scenario.p)
    bound = ceil_log(n, scenario.p + 1) if n > 1 else 0
    return bound, bound
