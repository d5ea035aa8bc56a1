"""
All-to-all encode of Cauchy-like blocks (systematic GRS and Lagrange codes)

A square block of the systematic GRS parity matrix factors as
    A_block = (V_a diag(left))^-1 . V_b . diag(right)
where V_a, V_b are B x B Vandermonde matrices. The block program runs
four stages on the B processors:
    1. local scale by left^-1
    2. all-to-all encode with V_a^-1
    3. all-to-all encode with V_b
    4. local scale by right
Each Vandermonde stage uses draw-and-loose when its points form an omega
grid and prepare-and-shoot on the explicit matrix otherwise.

Stacked blocks (K >= R): block m takes the alphas of rows S_m = [mR, (m+1)R)
and all R betas, with
    left  = phi_{m,s} = u_k prod_{j not in S_m}(alpha_k - alpha_j)
    right = psi_r     = v_r prod_{j not in S_m}(beta_r - alpha_j)
Concatenated blocks (K < R): block m takes all K alphas and the betas of
columns [mK, (m+1)K), with left = u and right = v restricted to the block.

A short last block is completed with virtual points distinct from every
real point. The diagonals then divide by prod_v(alpha_k - v) and
prod_v(beta_r - v) over the virtual alphas; padded rows use left = 1 and
padded columns use right = 1. Padded rows carry zero data and padded
columns are discarded, so the real entries are unaffected.
"""

import logging
from dataclasses import dataclass
from math import ceil
from typing import List, Optional, Sequence, Tuple

from src.core.field import FieldCtx, OutOfRangeError
from src.core.matrix import (
    DuplicatePointsError,
    Mat,
    OracleOp,
    ShapeMismatchError,
    ZeroScalarError,
    build_vandermonde,
    mat_oracle,
    systematic_grs_A,
)
from src.services.all_to_all.structured import (
    OmegaGrid,
    choose_radix,
    detect_omega_grid,
    draw_and_loose_program,
    predicted_profile_draw_and_loose,
    _grid_depth,
)
from src.services.all_to_all.universal import PrepareAndShoot, predicted_profile_universal
from src.services.netsim import NetParams, Program, ScaleMap, Sequential, cost_from_counts

logger = logging.getLogger(__name__)


class PointDesignError(ValueError):
    """The field is too small for the requested point design"""


@dataclass(frozen=True)
class CauchyBlockSpec:
    """
    One square Cauchy-like block and how to encode it.

    Attributes:
        ctx: Field context
        alpha_points: Points of the inverse-Vandermonde stage
        beta_points: Points of the Vandermonde stage
        left: Left diagonal (the block is divided by it)
        right: Right diagonal
        alpha_grid: Omega grid on alpha_points, None for universal encoding
        beta_grid: Omega grid on beta_points, None for universal encoding
    """
    ctx: FieldCtx
    alpha_points: Tuple[int, ...]
    beta_points: Tuple[int, ...]
    left: Tuple[int, ...]
    right: Tuple[int, ...]
    alpha_grid: Optional[OmegaGrid] = None
    beta_grid: Optional[OmegaGrid] = None

    def __post_init__(self):
        B = len(self.alpha_points)
        if B < 1 or len(self.beta_points) != B or len(self.left) != B or len(self.right) != B:
            raise ShapeMismatchError("block points and diagonals must share one size B >= 1")
        if len(set(self.alpha_points) | set(self.beta_points)) != 2 * B:
            raise DuplicatePointsError("alpha and beta points must be pairwise distinct")
        if 0 in self.left or 0 in self.right:
            raise ZeroScalarError("block diagonals must be nonzero")
        for grid, points in ((self.alpha_grid, self.alpha_points), (self.beta_grid, self.beta_points)):
            if grid is not None and grid.points != points:
                raise ShapeMismatchError("grid points do not match the block points")

    @property
    def B(self) -> int:
        return len(self.alpha_points)

    def matrix(self) -> Mat:
        """(V_a diag(left))^-1 V_b diag(right) via the oracle"""
        return systematic_grs_A(
            self.ctx, self.alpha_points, self.beta_points, self.left, self.right
        )


def _prod(values, q: int) -> int:
    out = 1
    for value in values:
        out = out * value % q
    return out


def phi_psi_diagonals(
    ctx: FieldCtx,
    alphas: Sequence[int],
    betas: Sequence[int],
    u: Sequence[int],
    v: Sequence[int],
    m: int,
    virtual: Sequence[int] = (),
) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """
    Diagonals (phi_m, psi) of stacked block m (K >= R).

    Rows of block m beyond K are padding and get phi = 1. ``virtual`` lists
    the extra alpha points completing a short block.

    Raises:
        OutOfRangeError: block m starts beyond K
        ZeroScalarError: a diagonal entry vanished (points not distinct)
    """
    q = ctx.q
    K, R = len(alphas), len(betas)
    if m < 0 or m * R >= K:
        raise OutOfRangeError(f"block {m} outside the {ceil(K / R)} stacked blocks")
    stop = min((m + 1) * R, K)
    outside = [int(alphas[j]) for j in range(K) if not m * R <= j < stop]
    virtual = [int(x) for x in virtual]

    def scaled(point: int, scalar: int) -> int:
        num = scalar * _prod((point - a for a in outside), q) % q
        den = _prod((point - x for x in virtual), q)
        if num == 0 or den == 0:
            raise ZeroScalarError(f"diagonal vanished at point {point}")
        return num * pow(den, -1, q) % q

    phi = tuple(
        scaled(int(alphas[m * R + s]), int(u[m * R + s])) if m * R + s < K else 1
        for s in range(R)
    )
    psi = tuple(scaled(int(betas[r]), int(v[r])) for r in range(R))
    return phi, psi


def virtual_points(ctx: FieldCtx, exclude: Sequence[int], count: int) -> Tuple[int, ...]:
    """Smallest ``count`` nonzero elements not in ``exclude``."""
    taken = {int(x) for x in exclude}
    out = []
    for x in range(1, ctx.q):
        if len(out) == count:
            break
        if x not in taken:
            out.append(x)
    if len(out) < count:
        raise PointDesignError(f"GF({ctx.q}) has no {count} spare points")
    return tuple(out)


def cauchy_block_specs(
    ctx: FieldCtx,
    alphas: Sequence[int],
    betas: Sequence[int],
    u: Sequence[int],
    v: Sequence[int],
    p: Optional[int] = None,
    virtual: Optional[Sequence[int]] = None,
) -> List[CauchyBlockSpec]:
    """
    Block specs covering the systematic GRS parity matrix.

    K >= R yields ceil(K/R) stacked R x R blocks, K < R yields ceil(R/K)
    concatenated K x K blocks. With ``p`` given, each stage whose points
    form an omega grid is marked for draw-and-loose.
    """
    alphas = tuple(int(a) for a in alphas)
    betas = tuple(int(b) for b in betas)
    u = tuple(int(x) for x in u)
    v = tuple(int(x) for x in v)
    K, R = len(alphas), len(betas)
    if K < 1 or R < 1:
        raise ShapeMismatchError(f"Cauchy blocks need K, R >= 1, got K={K}, R={R}")
    if len(u) != K or len(v) != R:
        raise ShapeMismatchError(f"|u|={len(u)}, |v|={len(v)} for K={K}, R={R}")
    tall = K >= R
    B = R if tall else K
    M = ceil(K / R) if tall else ceil(R / K)
    missing = M * B - (K if tall else R)

    if virtual is None:
        virtual = virtual_points(ctx, alphas + betas, missing)
    virtual = tuple(int(x) for x in virtual)[:missing]
    if len(virtual) < missing:
        raise PointDesignError(f"need {missing} virtual points, got {len(virtual)}")

    def grid_for(points):
        match = detect_omega_grid(points, ctx, p) if p is not None else None
        return match.grid if match is not None and match.in_order else None

    specs = []
    for m in range(M):
        if tall:
            real = alphas[m * R:(m + 1) * R]
            pad = virtual if len(real) < R else ()
            alpha_points = real + pad
            beta_points = betas
            left, right = phi_psi_diagonals(ctx, alphas, betas, u, v, m, pad)
        else:
            real = betas[m * K:(m + 1) * K]
            pad = virtual if len(real) < K else ()
            alpha_points = alphas
            beta_points = real + pad
            left = u
            right = v[m * K:(m + 1) * K] + (1,) * len(pad)
        specs.append(CauchyBlockSpec(
            ctx=ctx,
            alpha_points=alpha_points,
            beta_points=beta_points,
            left=tuple(left),
            right=tuple(right),
            alpha_grid=grid_for(alpha_points),
            beta_grid=grid_for(beta_points),
        ))
    return specs


def _stage(spec: CauchyBlockSpec, p: int, members, inverse: bool) -> Program:
    grid = spec.alpha_grid if inverse else spec.beta_grid
    if grid is not None:
        return draw_and_loose_program(grid, p, inverse=inverse, members=members)
    points = spec.alpha_points if inverse else spec.beta_points
    V = build_vandermonde(spec.ctx, points, spec.B)
    if inverse:
        V = mat_oracle(spec.ctx, V, OracleOp.INVERSE)
    return PrepareAndShoot(V, p, members)


def cauchy_block_program(
    spec: CauchyBlockSpec,
    p: int,
    members: Optional[Sequence[int]] = None,
) -> Program:
    """
    Scale, inverse-Vandermonde encode, Vandermonde encode, scale.

    Member s ends with (x . spec.matrix())_s.
    """
    members = tuple(range(spec.B)) if members is None else tuple(members)
    if len(members) != spec.B:
        raise ShapeMismatchError(f"{len(members)} members for a block of size {spec.B}")
    GF, q = spec.ctx.GF, spec.ctx.q

    unscale = ScaleMap({pid: GF(pow(d, -1, q)) for pid, d in zip(members, spec.left)})
    rescale = ScaleMap({pid: GF(d) for pid, d in zip(members, spec.right)})
    return Sequential([
        unscale,
        _stage(spec, p, members, inverse=True),
        _stage(spec, p, members, inverse=False),
        rescale,
    ])


def _stage_profile(spec: CauchyBlockSpec, grid: Optional[OmegaGrid], p: int, W: int) -> List[int]:
    if grid is not None:
        return predicted_profile_draw_and_loose(grid, p, W)
    return predicted_profile_universal(spec.B, p, W)


def predicted_profile_cauchy(spec: CauchyBlockSpec, p: int, W: int = 1) -> List[int]:
    """Per-round m_t: inverse-Vandermonde stage, then Vandermonde stage."""
    return (
        _stage_profile(spec, spec.alpha_grid, p, W)
        + _stage_profile(spec, spec.beta_grid, p, W)
    )


def predicted_cost_cauchy(spec: CauchyBlockSpec, p: int, params: NetParams) -> Tuple[int, int, float]:
    """(C1, C2, cost) of the two-pass block encode."""
    profile = predicted_profile_cauchy(spec, p, params.W)
    C1, C2 = len(profile), sum(profile)
    return C1, C2, cost_from_counts(C1, C2, params)


@dataclass(frozen=True)
class GRSPoints:
    """Evaluation points designed for structured Cauchy encoding."""
    alphas: Tuple[int, ...]
    betas: Tuple[int, ...]
    virtual: Tuple[int, ...]


def design_grs_points(ctx: FieldCtx, K: int, R: int, p: int) -> GRSPoints:
    """
    Alphas and betas built from omega grids of the block size.

    One grid per alpha block plus one for the betas (K >= R), or one for
    the alphas plus one per beta block (K < R). Grid b uses row exponents
    [b M_b, (b+1) M_b), so all points are distinct. Unused points of the
    last partial grid become the virtual padding points. Falls back to
    depth-0 grids (plain powers of g) when the grids do not fit.

    Raises:
        PointDesignError: GF(q) has fewer than the required points
    """
    if K < 1 or R < 1:
        raise PointDesignError(f"systematic designs need K, R >= 1, got K={K}, R={R}")
    tall = K >= R
    B = R if tall else K
    M = ceil(K / R) if tall else ceil(R / K)
    grids_needed = M + 1

    P = choose_radix(B, ctx.q, p)
    H = _grid_depth(B, ctx.q, P)
    Mb = B // P ** H
    if grids_needed * Mb > ctx.order // P ** H:
        P, H, Mb = 2, 0, B
    if grids_needed * Mb > ctx.order // P ** H:
        raise PointDesignError(
            f"GF({ctx.q}) cannot hold {grids_needed} disjoint grids of {B} points"
        )

    grids = [
        OmegaGrid(ctx=ctx, P=P, H=H, M=Mb, phi=tuple(range(b * Mb, (b + 1) * Mb)))
        for b in range(grids_needed)
    ]
    if tall:
        stacked = [x for grid in grids[:M] for x in grid.points]
        design = GRSPoints(tuple(stacked[:K]), grids[M].points, tuple(stacked[K:]))
    else:
        stacked = [x for grid in grids[1:] for x in grid.points]
        design = GRSPoints(grids[0].points, tuple(stacked[:R]), tuple(stacked[R:]))

    logger.debug(
        "GRS points designed",
        extra={"event": "grs_points_designed", "K": K, "R": R, "P": P, "H": H}
    )
    return design
