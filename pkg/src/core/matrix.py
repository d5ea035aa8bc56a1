"""
Dense matrices over GF(q)

Builders for the structured matrices used by the encoders (Vandermonde,
permuted DFT, Cauchy-like, systematic GRS) and an exact linear algebra
oracle that serves as ground truth for every simulated collective.

A ``Mat`` is a 2-D ``galois`` FieldArray. Data symbols follow the row
vector convention: encoding x with A yields x.A, and a block of W-wide
symbols is stored as a (K, W) array with one symbol per row.
"""

import logging
from enum import Enum
from typing import Optional, Sequence

import galois
import numpy as np

from src.core.field import FieldCtx, digit_reverse, root_of_unity

logger = logging.getLogger(__name__)

Mat = galois.FieldArray


class MatrixError(ValueError):
    """Base error for matrix construction and oracle calls"""


class DuplicatePointsError(MatrixError):
    """Evaluation points are not pairwise distinct"""


class ZeroScalarError(MatrixError):
    """A column or row multiplier is zero"""


class SingularMatrixError(MatrixError):
    """Inverse or solve requested for a singular matrix"""


class ShapeMismatchError(MatrixError):
    """Operand dimensions are incompatible"""


class BadShapeError(MatrixError):
    """Requested matrix dimensions are invalid"""


class OracleOp(str, Enum):
    """Operations offered by the elimination oracle"""
    MATMUL = "matmul"
    MATVEC = "matvec"
    INVERSE = "inverse"
    SOLVE = "solve"


def _check_distinct(values: Sequence[int]) -> None:
    seen = set()
    for v in values:
        v = int(v)
        if v in seen:
            raise DuplicatePointsError(f"point {v} appears more than once")
        seen.add(v)


def _check_nonzero(values: Sequence[int], name: str) -> None:
    for i, v in enumerate(values):
        if int(v) == 0:
            raise ZeroScalarError(f"{name}[{i}] is zero")


def build_vandermonde(ctx: FieldCtx, points: Sequence[int], rows: int) -> Mat:
    """
    Vandermonde matrix with entry (i, j) = points[j]^i.

    Args:
        ctx: Field context
        points: Pairwise distinct evaluation points (one per column)
        rows: Number of rows (powers 0..rows-1)

    Raises:
        DuplicatePointsError: points repeat
        BadShapeError: rows < 1 or no points
    """
    if rows < 1 or len(points) < 1:
        raise BadShapeError(f"Vandermonde needs rows >= 1 and points, got rows={rows}")
    _check_distinct(points)

    pts = ctx.array(points)
    V = ctx.GF.Ones((rows, len(points)))
    for i in range(1, rows):
        V[i] = V[i - 1] * pts
    return V


def build_permuted_dft(ctx: FieldCtx, K: int, P: int, H: int) -> Mat:
    """
    DFT matrix of size K = P^H with digit-reversed columns.

    Column j is column digit_reverse(j) of D_K, where D_K(i, j) = beta^(ij).

    Raises:
        BadShapeError: K != P^H
        OrderNotDividingError: K does not divide q-1
    """
    if P < 2 or H < 0 or P ** H != K:
        raise BadShapeError(f"K={K} is not {P}^{H}")
    beta = root_of_unity(ctx, K)
    points = [pow(beta, digit_reverse(j, P, H), ctx.q) for j in range(K)]
    return build_vandermonde(ctx, points, K)


def _check_grs_inputs(alphas, betas, u, v) -> None:
    if len(alphas) < 1 or len(betas) < 1:
        raise BadShapeError("need at least one alpha and one beta")
    if len(u) != len(alphas) or len(v) != len(betas):
        raise ShapeMismatchError(
            f"|u|={len(u)} vs |alphas|={len(alphas)}, |v|={len(v)} vs |betas|={len(betas)}"
        )
    _check_distinct(list(alphas) + list(betas))
    _check_nonzero(u, "u")
    _check_nonzero(v, "v")


def build_cauchy_like(
    ctx: FieldCtx,
    alphas: Sequence[int],
    betas: Sequence[int],
    u: Sequence[int],
    v: Sequence[int],
) -> Mat:
    """
    Cauchy-like matrix A(k, r) = c_k d_r / (beta_r - alpha_k).

    c_k = u_k^-1 / prod_{t != k}(alpha_k - alpha_t)
    d_r = v_r prod_k (beta_r - alpha_k)

    This is the parity block of the systematic GRS generator [I | A]
    and, with unit scalars, the Lagrange encoding matrix.
    """
    _check_grs_inputs(alphas, betas, u, v)
    GF = ctx.GF
    a = ctx.array(alphas)
    b = ctx.array(betas)

    alpha_diff = a[:, np.newaxis] - a[np.newaxis, :]
    alpha_diff[np.diag_indices(len(a))] = GF(1)
    c = np.reciprocal(ctx.array(u) * np.multiply.reduce(alpha_diff, axis=1))

    cross = b[np.newaxis, :] - a[:, np.newaxis]
    d = ctx.array(v) * np.multiply.reduce(cross, axis=0)

    return c[:, np.newaxis] * d[np.newaxis, :] / cross


def systematic_grs_A(
    ctx: FieldCtx,
    alphas: Sequence[int],
    betas: Sequence[int],
    u: Sequence[int],
    v: Sequence[int],
) -> Mat:
    """
    Parity block A = (V_alpha diag(u))^-1 V_beta diag(v) by explicit inversion.

    V_alpha is K x K on the alphas and V_beta is K x R on the betas.
    """
    _check_grs_inputs(alphas, betas, u, v)
    K = len(alphas)
    left = build_vandermonde(ctx, alphas, K) * ctx.array(u)[np.newaxis, :]
    right = build_vandermonde(ctx, betas, K) * ctx.array(v)[np.newaxis, :]
    return mat_oracle(ctx, left, OracleOp.INVERSE) @ right


def mat_oracle(ctx: FieldCtx, A: Mat, op: OracleOp, operand: Optional[Mat] = None):
    """
    Exact dense linear algebra over GF(q).

    Operations:
        MATMUL: A @ operand
        MATVEC: operand . A for a row vector (K,) or a (K, W) symbol block,
            returning shape (R,) or (R, W)
        INVERSE: A^-1
        SOLVE: y with A @ y = operand

    Raises:
        ShapeMismatchError: incompatible dimensions
        SingularMatrixError: INVERSE or SOLVE on a singular matrix
    """
    op = OracleOp(op)
    A = ctx.array(A)
    if A.ndim != 2:
        raise ShapeMismatchError(f"expected a 2-D matrix, got shape {A.shape}")

    if op is OracleOp.MATMUL:
        B = ctx.array(operand)
        if B.ndim != 2 or A.shape[1] != B.shape[0]:
            raise ShapeMismatchError(f"cannot multiply {A.shape} by {B.shape}")
        return A @ B

    if op is OracleOp.MATVEC:
        x = ctx.array(operand)
        if x.ndim not in (1, 2) or x.shape[0] != A.shape[0]:
            raise ShapeMismatchError(f"cannot encode {x.shape} with {A.shape}")
        if x.ndim == 1:
            return x @ A
        return A.T @ x

    n = A.shape[0]
    if A.shape[1] != n:
        raise ShapeMismatchError(f"{op.value} needs a square matrix, got {A.shape}")
    if np.linalg.matrix_rank(A) < n:
        raise SingularMatrixError(f"{n}x{n} matrix is singular")

    if op is OracleOp.INVERSE:
        return np.linalg.inv(A)

    b = ctx.array(operand)
    if b.shape[0] != n:
        raise ShapeMismatchError(f"right-hand side {b.shape} does not match {A.shape}")
    return np.linalg.solve(A, b)


def concat_rows(parts: Sequence[Mat]) -> Mat:
    """Stack field arrays of one field along the first axis."""
    field_cls = type(parts[0])
    raw = [np.asarray(part) for part in parts]
    return np.concatenate(raw, axis=0).view(field_cls)
