"""
Structured all-to-all encode for DFT and omega-grid Vandermonde matrices

Permuted DFT: with K = P^H and beta a primitive K-th root of unity,
processor k ends with f(beta^k') where f(z) = sum_j x_j z^j and k' is the
digit reversal of k. The evaluation splits f into P interleaved
sub-polynomials per level (f(z) = sum_rho z^rho f_rho(z^P)), so each of
the H levels is a P x P all-to-all encode inside groups of processors that
differ in one digit. The group matrices are Vandermonde matrices on nodes
of the element tree, whose level-h values are the P^h-th roots of unity
and whose children are the P-th roots of their parent.

Draw-and-loose: for an omega grid with K = M * Z points
omega_{i,j} = alpha_i * beta_Z^rev(j), processor (i, j) = i*Z + j
    draw:  every grid column encodes with V_M (entries alpha_i^(Z a)),
           then scales by alpha_i^j
    loose: every grid row runs the permuted DFT of size Z
so the whole schedule computes the Vandermonde matrix on the grid points
in grid order. The inverses run the same stages backwards with inverted
group matrices and inverted scales.

Features:
- Element tree with the child^P = parent invariant checked on construction
- Forward and inverse programs over arbitrary global member ids
- Omega-grid construction with a configurable exponent map phi
- Grid detection for point lists in any order, and radix selection
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from math import gcd
from typing import List, Optional, Sequence, Tuple

from src.core.field import (
    FieldCtx,
    OrderNotDividingError,
    OutOfRangeError,
    digit_reverse,
    digits,
    root_of_unity,
)
from src.core.matrix import (
    BadShapeError,
    DuplicatePointsError,
    OracleOp,
    ShapeMismatchError,
    build_vandermonde,
    mat_oracle,
)
from src.services.all_to_all.universal import PrepareAndShoot, predicted_profile_universal
from src.services.netsim import (
    LocalMap,
    NetParams,
    Parallel,
    Permute,
    Program,
    ScaleMap,
    Sequential,
    cost_from_counts,
)

logger = logging.getLogger(__name__)

MAX_RADIX = 8


class PhiNotInjectiveError(ValueError):
    """Two grid rows share an exponent"""


class PhiOutOfRangeError(ValueError):
    """Grid row exponent outside [0, (q-1)/Z)"""


@dataclass(frozen=True)
class ElementTree:
    """
    Roots of unity arranged as a P-ary tree of depth H.

    Level h holds gamma_h(e) = beta^(e K / P^h) for e in [0, P^h). The
    children of gamma_h(e) are gamma_{h+1}(e + rho P^h), rho in [0, P).
    """
    ctx: FieldCtx
    P: int
    H: int
    levels: Tuple[Tuple[int, ...], ...] = field(init=False, repr=False)

    def __post_init__(self):
        K = self.P ** self.H
        q = self.ctx.q
        beta = root_of_unity(self.ctx, K)
        levels = tuple(
            tuple(pow(beta, e * (K // self.P ** h), q) for e in range(self.P ** h))
            for h in range(self.H + 1)
        )

        if levels[0] != (1,):
            raise ValueError(f"tree root is {levels[0]}, expected (1,)")
        for h in range(self.H):
            width = self.P ** h
            for e, parent in enumerate(levels[h]):
                for rho in range(self.P):
                    child = levels[h + 1][e + rho * width]
                    if pow(child, self.P, q) != parent:
                        raise ValueError(f"level {h + 1} node {e + rho * width} is not a P-th root")
        if levels[self.H] != tuple(pow(beta, k, q) for k in range(K)):
            raise ValueError("leaves are not the powers of beta")

        object.__setattr__(self, "levels", levels)

    @property
    def K(self) -> int:
        return self.P ** self.H

    def gamma(self, level: int, index: int) -> int:
        return self.levels[level][index]


def polynomial_tree_exponents(P: int, H: int) -> Tuple[int, ...]:
    """
    Exponent of z attached to each coefficient by the recursive split.

    Expands f(z) = sum_rho z^rho f_rho(z^P) H times, where coefficient j of
    f_rho is x_{rho + P j}. The result maps k to the exponent of x_k and
    equals the identity when the split is consistent with Horner's rule.
    """
    exponents = [0]
    for _ in range(H):
        expanded = [0] * (len(exponents) * P)
        for rho in range(P):
            for j, e in enumerate(exponents):
                expanded[rho + P * j] = rho + P * e
        exponents = expanded
    return tuple(exponents)


def _resolve_members(members: Optional[Sequence[int]], K: int) -> Tuple[int, ...]:
    members = tuple(range(K)) if members is None else tuple(members)
    if len(members) != K:
        raise ShapeMismatchError(f"{len(members)} members for {K} points")
    return members


def _identity(pid, symbol):
    return symbol


def permuted_dft_program(
    ctx: FieldCtx,
    K: int,
    P: int,
    H: int,
    p: int,
    inverse: bool = False,
    members: Optional[Sequence[int]] = None,
) -> Program:
    """
    Encode with D_K P (or its inverse) in H rounds of P x P group encodes.

    Raises:
        BadShapeError: K != P^H
        OrderNotDividingError: K does not divide q-1
    """
    if P < 2 or H < 0 or P ** H != K:
        raise BadShapeError(f"K={K} is not {P}^{H}")
    members = _resolve_members(members, K)
    tree = ElementTree(ctx, P, H)
    if K == 1:
        return LocalMap(members, _identity)

    stages = []
    for h in range(H):
        place = P ** (H - h - 1)
        groups = []
        for k in range(K):
            ks = digits(k, P, H)
            if ks[H - h - 1] != 0:
                continue
            # digits fixed by earlier levels, most significant first
            e_old = sum(ks[H - 1 - j] * P ** j for j in range(h))
            points = [tree.gamma(h + 1, e_old + rho * P ** h) for rho in range(P)]
            A = build_vandermonde(ctx, points, P)
            if inverse:
                A = mat_oracle(ctx, A, OracleOp.INVERSE)
            group = [members[k + rho * place] for rho in range(P)]
            groups.append(PrepareAndShoot(A, p, group))
        stages.append(Parallel(groups))

    if inverse:
        stages.reverse()
    return Sequential(stages)


def predicted_profile_dft(K: int, P: int, H: int, p: int, W: int = 1) -> List[int]:
    """Per-round m_t of the permuted DFT: H copies of the P-point universal profile."""
    if P ** H != K:
        raise BadShapeError(f"K={K} is not {P}^{H}")
    return predicted_profile_universal(P, p, W) * H


@dataclass(frozen=True)
class OmegaGrid:
    """
    Evaluation points omega_{i,j} = g^phi(i) * g^(rev(j) (q-1)/Z).

    Attributes:
        ctx: Field context (g is its generator)
        P: Radix
        H: Depth, Z = P^H
        M: Number of grid rows, K = M Z
        phi: Row exponents, injective into [0, (q-1)/Z)
    """
    ctx: FieldCtx
    P: int
    H: int
    M: int
    phi: Tuple[int, ...]

    def __post_init__(self):
        if self.P < 2 or self.H < 0 or self.M < 1:
            raise BadShapeError(f"invalid grid P={self.P}, H={self.H}, M={self.M}")
        if self.ctx.order % self.Z:
            raise OrderNotDividingError(f"Z={self.Z} does not divide q-1={self.ctx.order}")
        if len(self.phi) != self.M:
            raise ShapeMismatchError(f"phi has {len(self.phi)} entries for M={self.M}")
        bound = self.ctx.order // self.Z
        for i, e in enumerate(self.phi):
            if not 0 <= e < bound:
                raise PhiOutOfRangeError(f"phi({i})={e} outside [0, {bound})")
        if len(set(self.phi)) != self.M:
            raise PhiNotInjectiveError(f"phi {self.phi} is not injective")
        if len(set(self.points)) != self.K:
            raise DuplicatePointsError("grid points are not distinct")

    @property
    def Z(self) -> int:
        return self.P ** self.H

    @property
    def K(self) -> int:
        return self.M * self.Z

    @cached_property
    def alphas(self) -> Tuple[int, ...]:
        return tuple(pow(self.ctx.g, e, self.ctx.q) for e in self.phi)

    @cached_property
    def betas(self) -> Tuple[int, ...]:
        step = self.ctx.order // self.Z
        return tuple(pow(self.ctx.g, j * step, self.ctx.q) for j in range(self.Z))

    @cached_property
    def points(self) -> Tuple[int, ...]:
        """Grid points in processor order k = i Z + j"""
        q = self.ctx.q
        rev = [digit_reverse(j, self.P, self.H) for j in range(self.Z)]
        return tuple(
            (alpha * self.betas[rev[j]]) % q
            for alpha in self.alphas
            for j in range(self.Z)
        )


def _grid_depth(K: int, q: int, P: int) -> int:
    common = gcd(K, q - 1)
    H = 0
    while common % P ** (H + 1) == 0:
        H += 1
    return H


def make_omega_grid(
    ctx: FieldCtx,
    K: int,
    P: int,
    phi: Optional[Sequence[int]] = None,
) -> OmegaGrid:
    """
    Omega grid of K points with the largest Z = P^H dividing K and q-1.

    Args:
        phi: Row exponents (defaults to the identity map)

    Raises:
        PhiNotInjectiveError, PhiOutOfRangeError: invalid phi
    """
    if P < 2:
        raise BadShapeError(f"radix must be >= 2, got {P}")
    if not 1 <= K <= ctx.order:
        raise OutOfRangeError(f"K={K} outside [1, q-1={ctx.order}]")
    H = _grid_depth(K, ctx.q, P)
    M = K // P ** H
    phi = tuple(range(M)) if phi is None else tuple(int(e) for e in phi)
    grid = OmegaGrid(ctx=ctx, P=P, H=H, M=M, phi=phi)
    logger.debug(
        "Omega grid built",
        extra={"event": "omega_grid_built", "K": K, "P": P, "H": H, "M": M}
    )
    return grid


def choose_radix(K: int, q: int, p: int) -> int:
    """Radix p+1 if it yields H >= 1, otherwise the radix with the largest Z."""
    if _grid_depth(K, q, p + 1) >= 1:
        return p + 1
    best, best_Z = p + 1, 1
    for P in range(2, max(MAX_RADIX, p + 1) + 1):
        Z = P ** _grid_depth(K, q, P)
        if Z > best_Z:
            best, best_Z = P, Z
    return best


def _order_routes(members: Sequence[int], order: Sequence[int], inverse: bool) -> dict:
    if inverse:
        return {members[k]: members[g] for k, g in enumerate(order)}
    return {members[g]: members[k] for k, g in enumerate(order)}


def _is_identity(order: Optional[Sequence[int]]) -> bool:
    return order is None or all(k == g for k, g in enumerate(order))


def draw_and_loose_program(
    grid: OmegaGrid,
    p: int,
    inverse: bool = False,
    members: Optional[Sequence[int]] = None,
    order: Optional[Sequence[int]] = None,
) -> Program:
    """
    Encode with the Vandermonde matrix on ``grid.points`` (or its inverse).

    With H = 0 this is prepare-and-shoot on the full Vandermonde matrix.
    ``order[k]`` is the grid position of the point owned by ``members[k]``;
    a non-identity order adds one permutation round that delivers each
    evaluation to its owner (or, for the inverse, collects them first).
    """
    ctx = grid.ctx
    GF = ctx.GF
    K, Z, M = grid.K, grid.Z, grid.M
    members = _resolve_members(members, K)
    q = ctx.q
    if order is not None and sorted(order) != list(range(K)):
        raise ShapeMismatchError(f"order is not a permutation of 0..{K - 1}")

    V_M = build_vandermonde(ctx, [pow(a, Z, q) for a in grid.alphas], M)
    if inverse:
        V_M = mat_oracle(ctx, V_M, OracleOp.INVERSE)

    scale = {}
    for i, alpha in enumerate(grid.alphas):
        for j in range(Z):
            value = pow(alpha, j, q)
            scale[members[i * Z + j]] = GF(pow(value, -1, q) if inverse else value)

    draw = Parallel([
        PrepareAndShoot(V_M, p, [members[i * Z + j] for i in range(M)])
        for j in range(Z)
    ])
    scaling = ScaleMap(scale)
    loose = Parallel([
        permuted_dft_program(ctx, Z, grid.P, grid.H, p, inverse, members[i * Z:(i + 1) * Z])
        for i in range(M)
    ])

    stages = [loose, scaling, draw] if inverse else [draw, scaling, loose]
    if not _is_identity(order):
        route = Permute(_order_routes(members, order, inverse))
        stages = [route] + stages if inverse else stages + [route]
    return Sequential(stages)


def predicted_profile_draw_and_loose(
    grid: OmegaGrid,
    p: int,
    W: int = 1,
    order: Optional[Sequence[int]] = None,
) -> List[int]:
    """Per-round m_t: universal profile of M, then H copies of the P-point profile."""
    draw = predicted_profile_universal(grid.M, p, W)
    loose = predicted_profile_dft(grid.Z, grid.P, grid.H, p, W)
    route = [] if _is_identity(order) else [W]
    return draw + loose + route


def predicted_cost_structured(
    grid: OmegaGrid,
    p: int,
    params: NetParams,
    order: Optional[Sequence[int]] = None,
) -> Tuple[int, int, float]:
    """(C1, C2, cost) of draw-and-loose on ``grid`` (same for the inverse)."""
    profile = predicted_profile_draw_and_loose(grid, p, params.W, order)
    C1, C2 = len(profile), sum(profile)
    return C1, C2, cost_from_counts(C1, C2, params)


def _discrete_log(ctx: FieldCtx, value: int) -> int:
    return int(ctx.GF(value).log())


@dataclass(frozen=True)
class GridMatch:
    """
    An omega grid whose point multiset equals a given point list.

    Attributes:
        grid: The matching grid
        order: order[k] is the grid position of the k-th listed point
    """
    grid: OmegaGrid
    order: Tuple[int, ...]

    @property
    def in_order(self) -> bool:
        """True when the list is already in grid order"""
        return _is_identity(self.order)

    def grid_members(self, members: Sequence[int]) -> Tuple[int, ...]:
        """Owners of ``members`` rearranged into grid order"""
        out = [0] * len(self.order)
        for k, g in enumerate(self.order):
            out[g] = members[k]
        return tuple(out)


def _coset_rows(logs: Sequence[int], bound: int, Z: int) -> Optional[Tuple[int, ...]]:
    # rows keyed by the smallest exponent of each coset, in order of first appearance
    counts = {}
    for e in logs:
        counts[e % bound] = counts.get(e % bound, 0) + 1
    if any(count != Z for count in counts.values()):
        return None
    return tuple(counts)


def detect_omega_grid(points: Sequence[int], ctx: FieldCtx, p: int) -> Optional[GridMatch]:
    """
    Find an omega grid with the same point multiset as ``points``.

    Tries radix p+1 first, then 2..MAX_RADIX, each with H from maximal
    down to 1. Points are grouped into cosets of the Z-th roots of unity;
    a grid exists when every coset is complete, and its rows are the
    cosets in order of first appearance. A single point is the trivial
    grid. Returns None when no grid with H >= 1 matches.
    """
    pts = [int(x) for x in points]
    K = len(pts)
    if K == 0 or K > ctx.order or 0 in pts or len(set(pts)) != K:
        return None
    if K == 1:
        grid = OmegaGrid(ctx=ctx, P=2, H=0, M=1, phi=(_discrete_log(ctx, pts[0]),))
        return GridMatch(grid=grid, order=(0,))

    logs = [_discrete_log(ctx, x) for x in pts]
    radices = [p + 1] + [P for P in range(2, MAX_RADIX + 1) if P != p + 1]
    for P in radices:
        for H in range(_grid_depth(K, ctx.q, P), 0, -1):
            Z = P ** H
            phi = _coset_rows(logs, ctx.order // Z, Z)
            if phi is None:
                continue
            grid = OmegaGrid(ctx=ctx, P=P, H=H, M=K // Z, phi=phi)
            position = {x: g for g, x in enumerate(grid.points)}
            return GridMatch(grid=grid, order=tuple(position[x] for x in pts))
    return None
