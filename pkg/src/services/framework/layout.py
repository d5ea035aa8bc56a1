"""
Processor grids and block matrices

Four layouts cover every scenario:

SYS_TALL (systematic, K >= R): M = ceil(K/R) columns of R sources,
    grid[r][m] = S_{r+mR}. Missing positions of the last column are filled
    by the sink T_r of that row (zero input). Column m encodes with the
    R x R block A_m = A[mR:(m+1)R, :] (zero or random padding rows), then
    row r reduces its partial sums to T_r.
SYS_WIDE (systematic, K < R): M = ceil(R/K) columns of K sinks,
    grid[k][m] = T_{k+mK}, missing positions filled by S_k. S_k first
    broadcasts x_k along row k, then column m encodes with
    A[:, mK:(m+1)K] (padding columns are discarded).
NONSYS_TALL (non-systematic, K > R, or R = 0): one N x N all-to-all
    encode of G' = [G; B] with the sinks holding zeros.
NONSYS_WIDE (non-systematic, K <= R): the sources form column 0 and the
    first F = R // K groups of K sinks form columns 1..F. The L = R mod K
    leftover sinks join columns 0..F round robin. S_k broadcasts x_k along
    row k, then each column encodes with its square G'_c whose top K rows
    are the members' columns of G.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from math import ceil
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.core.matrix import Mat
from src.services.collectives import GroupSpec
from src.services.framework.scenario import EncodingScenario, PaddingMode

logger = logging.getLogger(__name__)

PAD = -1


class LayoutCase(str, Enum):
    SYS_TALL = "sys-tall"
    SYS_WIDE = "sys-wide"
    NONSYS_TALL = "nonsys-tall"
    NONSYS_WIDE = "nonsys-wide"


@dataclass(frozen=True)
class BlockAssignment:
    """
    One square all-to-all encode of the layout.

    Attributes:
        members: Processor ids, in local order
        matrix: Square block matrix; member i ends with (x.matrix)_i
        rows: Generator row feeding each member (PAD for zero-input members)
        columns: Generator column computed by each member (PAD when the
            output is discarded); sink index for systematic codes,
            codeword coordinate otherwise
    """
    members: Tuple[int, ...]
    matrix: Mat
    rows: Tuple[int, ...]
    columns: Tuple[int, ...]

    def __post_init__(self):
        n = len(self.members)
        if self.matrix.shape != (n, n) or len(self.rows) != n or len(self.columns) != n:
            raise ValueError(f"block of {n} members has matrix {self.matrix.shape}")

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class GridLayout:
    """
    Processor placement and phase structure of a scenario.

    Attributes:
        case: Layout case
        M: Number of grid columns (1 for NONSYS_TALL)
        grid: grid[row][column] processor ids
        blocks: All-to-all encodes run in parallel
        groups: Broadcast or reduce groups run in parallel
        borrowed: Processors placed in the grid outside their own role
    """
    case: LayoutCase
    M: int
    grid: Tuple[Tuple[int, ...], ...]
    blocks: Tuple[BlockAssignment, ...]
    groups: Tuple[GroupSpec, ...]
    borrowed: Tuple[int, ...] = ()

    @property
    def collective_first(self) -> bool:
        """Broadcast before the encode (True) or reduce after it (False)"""
        return self.case in (LayoutCase.SYS_WIDE, LayoutCase.NONSYS_WIDE)

    @property
    def max_block(self) -> int:
        return max(block.size for block in self.blocks)


def classify(scenario: EncodingScenario) -> LayoutCase:
    K, R = scenario.K, scenario.R
    if scenario.generator.systematic:
        return LayoutCase.SYS_TALL if K >= R else LayoutCase.SYS_WIDE
    if R == 0 or K > R:
        return LayoutCase.NONSYS_TALL
    return LayoutCase.NONSYS_WIDE


def _block_matrix(
    scenario: EncodingScenario,
    source: Mat,
    rows: Sequence[int],
    columns: Sequence[int],
    rng: Optional[np.random.Generator],
) -> Mat:
    GF = scenario.ctx.GF
    n = len(rows)
    if scenario.padding is PaddingMode.RANDOM:
        block = GF.Random((n, n), seed=rng)
    else:
        block = GF.Zeros((n, n))
    real_rows = [i for i, row in enumerate(rows) if row != PAD]
    real_cols = [j for j, col in enumerate(columns) if col != PAD]
    if real_rows and real_cols:
        block[np.ix_(real_rows, real_cols)] = source[
            np.ix_([rows[i] for i in real_rows], [columns[j] for j in real_cols])
        ]
    return block


def _sys_tall(scenario: EncodingScenario, rng) -> GridLayout:
    K, R = scenario.K, scenario.R
    A = scenario.generator.A
    M = ceil(K / R)

    def sink(r: int) -> int:
        return K + r

    grid = tuple(
        tuple(r + m * R if r + m * R < K else sink(r) for m in range(M))
        for r in range(R)
    )
    borrowed = tuple(sink(r) for r in range(R) if r + (M - 1) * R >= K)

    blocks = []
    for m in range(M):
        rows = tuple(r + m * R if r + m * R < K else PAD for r in range(R))
        columns = tuple(range(R))
        blocks.append(BlockAssignment(
            members=tuple(grid[r][m] for r in range(R)),
            matrix=_block_matrix(scenario, A, rows, columns, rng),
            rows=rows,
            columns=columns,
        ))

    groups = []
    for r in range(R):
        members = list(grid[r])
        if sink(r) not in members:
            members.append(sink(r))
        groups.append(GroupSpec(members=tuple(members), root=sink(r)))

    return GridLayout(LayoutCase.SYS_TALL, M, grid, tuple(blocks), tuple(groups), borrowed)


def _sys_wide(scenario: EncodingScenario, rng) -> GridLayout:
    K, R = scenario.K, scenario.R
    A = scenario.generator.A
    M = ceil(R / K)

    grid = tuple(
        tuple(K + k + m * K if k + m * K < R else k for m in range(M))
        for k in range(K)
    )
    borrowed = tuple(k for k in range(K) if k + (M - 1) * K >= R)

    blocks = []
    for m in range(M):
        rows = tuple(range(K))
        columns = tuple(k + m * K if k + m * K < R else PAD for k in range(K))
        blocks.append(BlockAssignment(
            members=tuple(grid[k][m] for k in range(K)),
            matrix=_block_matrix(scenario, A, rows, columns, rng),
            rows=rows,
            columns=columns,
        ))

    groups = []
    for k in range(K):
        members = [k] + [pid for pid in grid[k] if pid != k]
        groups.append(GroupSpec(members=tuple(members), root=k))

    return GridLayout(LayoutCase.SYS_WIDE, M, grid, tuple(blocks), tuple(groups), borrowed)


def _nonsys_tall(scenario: EncodingScenario, rng) -> GridLayout:
    K, N = scenario.K, scenario.N
    rows = tuple(range(K)) + (PAD,) * scenario.R
    columns = tuple(range(N))
    block = BlockAssignment(
        members=columns,
        matrix=_block_matrix(scenario, scenario.generator.G, rows, columns, rng),
        rows=rows,
        columns=columns,
    )
    grid = tuple((pid,) for pid in range(N))
    return GridLayout(LayoutCase.NONSYS_TALL, 1, grid, (block,), ())


def _nonsys_wide(scenario: EncodingScenario, rng) -> GridLayout:
    K, R = scenario.K, scenario.R
    F, L = divmod(R, K)

    # coordinate c*K + k sits at row k of column c; processor id == coordinate
    grid = tuple(tuple(c * K + k for c in range(F + 1)) for k in range(K))
    extras: List[List[int]] = [[] for _ in range(F + 1)]
    for l in range(L):
        extras[l % (F + 1)].append(K + F * K + l)

    blocks = []
    for c in range(F + 1):
        members = tuple(grid[k][c] for k in range(K)) + tuple(extras[c])
        rows = tuple(range(K)) + (PAD,) * len(extras[c])
        blocks.append(BlockAssignment(
            members=members,
            matrix=_block_matrix(scenario, scenario.generator.G, rows, members, rng),
            rows=rows,
            columns=members,
        ))

    groups = tuple(GroupSpec(members=grid[k], root=k) for k in range(K))
    return GridLayout(LayoutCase.NONSYS_WIDE, F + 1, grid, tuple(blocks), groups)


def plan_layout(scenario: EncodingScenario) -> GridLayout:
    """
    Grid, blocks and collective groups of ``scenario``.

    Random padding is drawn from a generator seeded with the scenario seed.
    """
    rng = np.random.default_rng(scenario.seed) if scenario.padding is PaddingMode.RANDOM else None
    case = classify(scenario)
    builder = {
        LayoutCase.SYS_TALL: _sys_tall,
        LayoutCase.SYS_WIDE: _sys_wide,
        LayoutCase.NONSYS_TALL: _nonsys_tall,
        LayoutCase.NONSYS_WIDE: _nonsys_wide,
    }[case]
    layout = builder(scenario, rng)
    logger.debug(
        "Layout planned",
        extra={
            "event": "layout_planned",
            "scenario": scenario.label,
            "case": case.value,
            "M": layout.M,
            "borrowed": len(layout.borrowed),
        }
    )
    return layout
