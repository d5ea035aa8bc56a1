"""
Encoding scenarios

An EncodingScenario fixes everything a decentralized encode needs: the
field, K sources holding x_0..x_{K-1}, R sinks, the payload width W, the
generator and the p-port cost parameters.

Processor ids: source S_k is k, sink T_r is K + r, so N = K + R.

Systematic generators [I | A] give sink T_r the symbol sum_k x_k A[k, r].
Non-systematic generators G (K x N) give processor j the symbol
sum_k x_k G[k, j]. R = 0 is the bare K x K all-to-all encode.

Usage:
    from src.services.framework import build_scenario, CodeKind

    scenario = build_scenario(q=13, K=25, R=4, p=1, code=CodeKind.RANDOM, seed=7)
"""

import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np

from src.core.field import FieldCtx, get_field
from src.core.matrix import Mat, ShapeMismatchError, build_vandermonde, systematic_grs_A
from src.services.all_to_all import (
    MAX_RADIX,
    choose_radix,
    design_grs_points,
    make_omega_grid,
)
from src.services.netsim import NetParams

logger = logging.getLogger(__name__)


class ScenarioError(ValueError):
    """Scenario parameters are inconsistent"""


class UnsupportedAlgorithmError(ScenarioError):
    """The algorithm cannot encode this code"""


class CodeKind(str, Enum):
    """Generator families"""
    RANDOM = "random"
    GRS_SYSTEMATIC = "grs-systematic"
    GRS_NONSYSTEMATIC = "grs-nonsystematic"
    LAGRANGE = "lagrange"
    DFT = "dft"
    VANDERMONDE_GRID = "vandermonde-grid"


class Algorithm(str, Enum):
    """All-to-all encode implementation used per block"""
    UNIVERSAL = "universal"
    STRUCTURED = "structured"
    CAUCHY = "cauchy"
    AUTO = "auto"


class PaddingMode(str, Enum):
    """Content of the padding matrix completing ragged blocks"""
    ZERO = "zero"
    RANDOM = "random"


SYSTEMATIC_CODES = (CodeKind.RANDOM, CodeKind.GRS_SYSTEMATIC, CodeKind.LAGRANGE)
CAUCHY_CODES = (CodeKind.GRS_SYSTEMATIC, CodeKind.LAGRANGE)
VANDERMONDE_CODES = (CodeKind.GRS_NONSYSTEMATIC, CodeKind.DFT, CodeKind.VANDERMONDE_GRID)


@dataclass(frozen=True)
class GeneratorSpec:
    """
    Generator matrix plus the parameters it was built from.

    Attributes:
        code: Generator family
        A: K x R parity block (systematic codes)
        G: K x N generator (non-systematic codes and R = 0)
        alphas, betas, u, v: GRS / Lagrange parameters
        virtual: Spare points completing ragged Cauchy blocks
        points: Evaluation point of every codeword coordinate
            (Vandermonde-type codes, G = V(points) diag(scales))
        scales: Column multipliers of Vandermonde-type codes
    """
    code: CodeKind
    A: Optional[Mat] = None
    G: Optional[Mat] = None
    alphas: Tuple[int, ...] = ()
    betas: Tuple[int, ...] = ()
    u: Tuple[int, ...] = ()
    v: Tuple[int, ...] = ()
    virtual: Tuple[int, ...] = ()
    points: Tuple[int, ...] = ()
    scales: Tuple[int, ...] = ()

    def __post_init__(self):
        if (self.A is None) == (self.G is None):
            raise ScenarioError("exactly one of A and G must be given")

    @property
    def systematic(self) -> bool:
        return self.A is not None


@dataclass(frozen=True)
class EncodingScenario:
    """
    One decentralized encoding problem.

    Attributes:
        ctx: Field context
        K: Number of sources
        R: Number of sinks
        W: Field elements per data symbol
        p: Ports per processor
        generator: Generator definition
        alpha: Start-up cost per round
        beta: Transfer cost per bit
        padding: Padding matrix content for ragged blocks
        seed: Seed the scenario was drawn with
    """
    ctx: FieldCtx
    K: int
    R: int
    W: int
    p: int
    generator: GeneratorSpec
    alpha: float = 0.0
    beta: float = 1.0
    padding: PaddingMode = PaddingMode.ZERO
    seed: int = 0

    def __post_init__(self):
        if self.K < 1 or self.R < 0:
            raise ScenarioError(f"need K >= 1 and R >= 0, got K={self.K}, R={self.R}")
        if self.W < 1 or self.p < 1:
            raise ScenarioError(f"need W >= 1 and p >= 1, got W={self.W}, p={self.p}")
        gen = self.generator
        if gen.systematic:
            if self.R < 1:
                raise ScenarioError("systematic generators need R >= 1")
            if gen.A.shape != (self.K, self.R):
                raise ShapeMismatchError(f"A is {gen.A.shape}, expected {(self.K, self.R)}")
        elif gen.G.shape != (self.K, self.N):
            raise ShapeMismatchError(f"G is {gen.G.shape}, expected {(self.K, self.N)}")

    @property
    def N(self) -> int:
        return self.K + self.R

    @property
    def sources(self) -> Tuple[int, ...]:
        return tuple(range(self.K))

    @property
    def sinks(self) -> Tuple[int, ...]:
        return tuple(range(self.K, self.N))

    @property
    def params(self) -> NetParams:
        return NetParams(
            N=self.N, p=self.p, alpha=self.alpha, beta=self.beta, q=self.ctx.q, W=self.W
        )

    @property
    def label(self) -> str:
        return f"{self.generator.code.value}:q={self.ctx.q}:K={self.K}:R={self.R}:p={self.p}:W={self.W}"


def _nonzero(ctx: FieldCtx, count: int, rng: np.random.Generator) -> Tuple[int, ...]:
    return tuple(int(x) for x in ctx.GF.Random(count, low=1, seed=rng))


def _dft_radix(ctx: FieldCtx, N: int, p: int) -> int:
    for P in [p + 1] + [P for P in range(2, MAX_RADIX + 1) if P != p + 1]:
        size = 1
        while size < N:
            size *= P
        if size == N and ctx.order % N == 0:
            return P
    raise ScenarioError(f"N={N} is not a radix power dividing q-1={ctx.order}")


def _vandermonde_generator(
    ctx: FieldCtx,
    code: CodeKind,
    K: int,
    N: int,
    p: int,
    phi: Optional[Sequence[int]],
    rng: np.random.Generator,
) -> GeneratorSpec:
    if N > ctx.order:
        raise ScenarioError(f"{code.value} needs N={N} <= q-1={ctx.order} distinct points")
    if code is CodeKind.DFT:
        grid = make_omega_grid(ctx, N, _dft_radix(ctx, N, p))
    else:
        grid = make_omega_grid(ctx, N, choose_radix(N, ctx.q, p), phi)
    scales = _nonzero(ctx, N, rng) if code is CodeKind.GRS_NONSYSTEMATIC else (1,) * N
    G = build_vandermonde(ctx, grid.points, K) * ctx.array(scales)[np.newaxis, :]
    return GeneratorSpec(code=code, G=G, points=grid.points, scales=scales)


def _cauchy_generator(
    ctx: FieldCtx,
    code: CodeKind,
    K: int,
    R: int,
    p: int,
    rng: np.random.Generator,
) -> GeneratorSpec:
    if R < 1:
        raise ScenarioError(f"{code.value} is systematic and needs R >= 1")
    design = design_grs_points(ctx, K, R, p)
    if code is CodeKind.LAGRANGE:
        u, v = (1,) * K, (1,) * R
    else:
        u, v = _nonzero(ctx, K, rng), _nonzero(ctx, R, rng)
    A = systematic_grs_A(ctx, design.alphas, design.betas, u, v)
    return GeneratorSpec(
        code=code,
        A=A,
        alphas=design.alphas,
        betas=design.betas,
        u=u,
        v=v,
        virtual=design.virtual,
    )


def build_scenario(
    q: int,
    K: int,
    R: int,
    p: int = 1,
    W: int = 1,
    code: CodeKind = CodeKind.RANDOM,
    alpha: float = 0.0,
    beta: float = 1.0,
    seed: int = 0,
    phi: Optional[Sequence[int]] = None,
    padding: PaddingMode = PaddingMode.ZERO,
) -> EncodingScenario:
    """
    Draw a scenario's generator from a seeded numpy Generator.

    Raises:
        ScenarioError: parameters incompatible with the code family
        PointDesignError: GF(q) too small for the GRS point design
    """
    ctx = get_field(q)
    code = CodeKind(code)
    rng = np.random.default_rng(seed)
    N = K + R

    if code is CodeKind.RANDOM:
        if R >= 1:
            generator = GeneratorSpec(code=code, A=ctx.GF.Random((K, R), seed=rng))
        else:
            generator = GeneratorSpec(code=code, G=ctx.GF.Random((K, K), seed=rng))
    elif code in CAUCHY_CODES:
        generator = _cauchy_generator(ctx, code, K, R, p, rng)
    else:
        generator = _vandermonde_generator(ctx, code, K, N, p, phi, rng)

    scenario = EncodingScenario(
        ctx=ctx,
        K=K,
        R=R,
        W=W,
        p=p,
        generator=generator,
        alpha=alpha,
        beta=beta,
        padding=PaddingMode(padding),
        seed=seed,
    )
    logger.debug(
        "Scenario built",
        extra={"event": "scenario_built", "scenario": scenario.label}
    )
    return scenario


def corrupt_generator(scenario: EncodingScenario) -> EncodingScenario:
    """
    Copy of ``scenario`` whose generator has one coefficient changed.

    The copy is a plain random-code scenario, so every algorithm encodes the
    explicit (corrupted) matrix. Used as a negative control.
    """
    gen = scenario.generator
    matrix = (gen.A if gen.systematic else gen.G).copy()
    matrix[0, -1] += scenario.ctx.GF(1)
    if gen.systematic:
        corrupted = GeneratorSpec(code=CodeKind.RANDOM, A=matrix)
    else:
        corrupted = GeneratorSpec(code=CodeKind.RANDOM, G=matrix)
    return replace(scenario, generator=corrupted)
