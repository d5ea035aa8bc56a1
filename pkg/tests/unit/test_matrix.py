"""
Matrix Builders and Oracle Tests

Tests Vandermonde, permuted DFT, Cauchy-like and systematic GRS builders
plus the exact linear algebra oracle.
"""

import numpy as np
import pytest

from src.core.field import OrderNotDividingError, get_field
from src.core.matrix import (
    BadShapeError,
    DuplicatePointsError,
    OracleOp,
    ShapeMismatchError,
    SingularMatrixError,
    ZeroScalarError,
    build_cauchy_like,
    build_permuted_dft,
    build_vandermonde,
    concat_rows,
    mat_oracle,
    systematic_grs_A,
)


def _distinct_points(ctx, count, rng):
    values = rng.choice(np.arange(1, ctx.q), size=count, replace=False)
    return [int(v) for v in values]


# ============================================
# BUILDER TESTS
# ============================================

class TestVandermonde:
    """Vandermonde construction"""

    def test_small_example(self):
        ctx = get_field(5)
        V = build_vandermonde(ctx, [1, 2, 4, 3], 4)
        expected = [[1, 1, 1, 1], [1, 2, 4, 3], [1, 4, 1, 4], [1, 3, 4, 2]]
        assert np.array_equal(V, ctx.GF(expected))

    def test_single_row(self, gf13):
        assert np.array_equal(build_vandermonde(gf13, [7], 1), gf13.GF([[1]]))

    def test_duplicate_points(self, gf13):
        with pytest.raises(DuplicatePointsError):
            build_vandermonde(gf13, [1, 1], 2)

    def test_bad_rows(self, gf13):
        with pytest.raises(BadShapeError):
            build_vandermonde(gf13, [1, 2], 0)

    def test_distinct_points_are_invertible(self, gf257, rng):
        points = _distinct_points(gf257, 8, rng)
        V = build_vandermonde(gf257, points, 8)
        V_inv = mat_oracle(gf257, V, OracleOp.INVERSE)
        assert np.array_equal(V_inv @ V, gf257.GF.Identity(8))


class TestPermutedDFT:
    """Digit-reversed DFT matrices"""

    def test_columns_are_digit_reversed(self):
        ctx = get_field(5)
        D = build_permuted_dft(ctx, 4, 2, 2)
        plain = build_vandermonde(ctx, [1, 2, 4, 3], 4)
        assert np.array_equal(D, plain[:, [0, 2, 1, 3]])

    def test_size_one(self, gf13):
        assert np.array_equal(build_permuted_dft(gf13, 1, 2, 0), gf13.GF([[1]]))

    def test_order_must_divide(self, gf13):
        with pytest.raises(OrderNotDividingError):
            build_permuted_dft(gf13, 9, 3, 2)

    def test_size_must_be_power(self, gf13):
        with pytest.raises(BadShapeError):
            build_permuted_dft(gf13, 6, 2, 2)


class TestCauchyLike:
    """Cauchy-like and systematic GRS parity blocks"""

    def test_hand_example(self, gf13):
        A = build_cauchy_like(gf13, [1, 2], [3, 4], [1, 1], [1, 1])
        assert np.array_equal(A, gf13.GF([[12, 11], [2, 3]]))

    def test_systematic_hand_example(self, gf13):
        A = systematic_grs_A(gf13, [1, 2], [3, 4], [1, 1], [1, 1])
        assert np.array_equal(A, gf13.GF([[12, 11], [2, 3]]))

    def test_empty_products(self, gf13):
        A = build_cauchy_like(gf13, [0], [1], [1], [1])
        assert np.array_equal(A, gf13.GF([[1]]))

    def test_single_alpha_interpolation_is_constant(self, gf13):
        A = systematic_grs_A(gf13, [5], [1, 2, 3], [1], [1, 1, 1])
        assert np.array_equal(A, gf13.GF([[1, 1, 1]]))

    def test_zero_scalar(self, gf13):
        with pytest.raises(ZeroScalarError):
            build_cauchy_like(gf13, [1, 2], [3, 4], [0, 1], [1, 1])

    def test_overlapping_points(self, gf13):
        with pytest.raises(DuplicatePointsError):
            systematic_grs_A(gf13, [1, 2], [2, 4], [1, 1], [1, 1])

    def test_scalar_length_mismatch(self, gf13):
        with pytest.raises(ShapeMismatchError):
            build_cauchy_like(gf13, [1, 2], [3, 4], [1], [1, 1])

    @pytest.mark.parametrize("trial", range(50))
    def test_closed_form_matches_inversion(self, gf257, trial):
        rng = np.random.default_rng(trial)
        K, R = int(rng.integers(1, 7)), int(rng.integers(1, 7))
        points = _distinct_points(gf257, K + R, rng)
        u = [int(x) for x in rng.integers(1, 257, size=K)]
        v = [int(x) for x in rng.integers(1, 257, size=R)]
        alphas, betas = points[:K], points[K:]
        assert np.array_equal(
            build_cauchy_like(gf257, alphas, betas, u, v),
            systematic_grs_A(gf257, alphas, betas, u, v),
        )


# ============================================
# ORACLE TESTS
# ============================================

class TestOracle:
    """Exact linear algebra"""

    def test_inverse_example(self, gf13):
        inv = mat_oracle(gf13, gf13.GF([[1, 1], [1, 2]]), OracleOp.INVERSE)
        assert np.array_equal(inv, gf13.GF([[2, 12], [12, 1]]))

    def test_matvec_identity(self, gf13):
        x = gf13.GF([3, 7, 11])
        assert np.array_equal(mat_oracle(gf13, gf13.GF.Identity(3), OracleOp.MATVEC, x), x)

    def test_matvec_row_vector_convention(self, gf13):
        A = gf13.GF([[1, 2], [3, 4], [5, 6]])
        x = gf13.GF([1, 1, 1])
        assert np.array_equal(mat_oracle(gf13, A, OracleOp.MATVEC, x), gf13.GF([9, 12]))

    def test_matvec_symbol_block(self, gf13, random_symbols):
        A = gf13.GF([[1, 2], [3, 4], [5, 6]])
        X = random_symbols(gf13, 3, W=4)
        Y = mat_oracle(gf13, A, OracleOp.MATVEC, X)
        assert Y.shape == (2, 4)
        for w in range(4):
            assert np.array_equal(Y[:, w], X[:, w] @ A)

    def test_matmul_shape_mismatch(self, gf13):
        with pytest.raises(ShapeMismatchError):
            mat_oracle(gf13, gf13.GF.Identity(2), OracleOp.MATMUL, gf13.GF.Identity(3))

    def test_singular_inverse(self, gf13):
        V = gf13.GF([[1, 1], [2, 2]])
        with pytest.raises(SingularMatrixError):
            mat_oracle(gf13, V, OracleOp.INVERSE)

    def test_solve(self, gf13):
        A = gf13.GF([[1, 1], [1, 2]])
        b = gf13.GF([5, 7])
        y = mat_oracle(gf13, A, OracleOp.SOLVE, b)
        assert np.array_equal(A @ y, b)

    def test_random_inverse(self, gf257, rng):
        for _ in range(5):
            A = gf257.GF.Random((6, 6), seed=rng)
            if np.linalg.matrix_rank(A) < 6:
                continue
            assert np.array_equal(mat_oracle(gf257, A, OracleOp.INVERSE) @ A, gf257.GF.Identity(6))

    def test_concat_rows_keeps_field(self, gf13):
        out = concat_rows([gf13.GF([[1, 2]]), gf13.GF([[3, 4]])])
        assert type(out) is gf13.GF
        assert np.array_equal(out, gf13.GF([[1, 2], [3, 4]]))
