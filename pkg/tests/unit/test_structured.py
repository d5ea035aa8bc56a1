"""
Structured All-to-All Encode Tests

Tests the element tree, the permuted DFT program, omega grids,
draw-and-loose and grid detection.
"""

import numpy as np
import pytest

from src.core.field import get_field
from src.core.matrix import ShapeMismatchError, build_permuted_dft, build_vandermonde
from src.services.all_to_all import (
    ElementTree,
    PhiNotInjectiveError,
    PhiOutOfRangeError,
    PrepareAndShoot,
    choose_radix,
    detect_omega_grid,
    draw_and_loose_program,
    make_omega_grid,
    permuted_dft_program,
    polynomial_tree_exponents,
    predicted_cost_structured,
    predicted_profile_dft,
    predicted_profile_draw_and_loose,
)
from src.services.netsim import NetParams, Sequential, run


def _run(ctx, program, X, p, N=None):
    N = X.shape[0] if N is None else N
    return run(program, NetParams(N=N, p=p, q=ctx.q, W=X.shape[1]), X)


def _assert_encodes(report, X, matrix, members=None):
    members = range(matrix.shape[1]) if members is None else members
    expected = matrix.T @ X
    for i, pid in enumerate(members):
        assert np.array_equal(report.outputs[pid], expected[i])


@pytest.fixture
def grid6(gf13):
    """K=6 omega grid over GF(13) with P=3: points (1, 3, 9, 2, 6, 5)"""
    return make_omega_grid(gf13, 6, 3)


# ============================================
# ELEMENT TREE TESTS
# ============================================

class TestElementTree:
    """Roots of unity tree"""

    def test_levels(self, gf13):
        tree = ElementTree(gf13, 2, 2)
        assert tree.levels == ((1,), (1, 12), (1, 8, 12, 5))
        assert tree.gamma(2, 1) == 8
        assert tree.K == 4

    def test_children_are_pth_roots(self):
        ctx = get_field(73)
        tree = ElementTree(ctx, 2, 3)
        for h in range(3):
            for e, parent in enumerate(tree.levels[h]):
                for rho in range(2):
                    assert pow(tree.gamma(h + 1, e + rho * 2 ** h), 2, 73) == parent

    @pytest.mark.parametrize("P,H", [(2, 3), (3, 2), (5, 1), (2, 0)])
    def test_polynomial_tree_is_horner_consistent(self, P, H):
        assert polynomial_tree_exponents(P, H) == tuple(range(P ** H))


# ============================================
# PERMUTED DFT TESTS
# ============================================

class TestPermutedDFT:
    """Permuted DFT program"""

    @pytest.mark.parametrize("q,K,P,H,p", [
        (13, 4, 2, 2, 1),
        (19, 9, 3, 2, 2),
        (73, 8, 2, 3, 1),
    ])
    def test_radix_matching_ports(self, q, K, P, H, p):
        ctx = get_field(q)
        X = ctx.GF.Random((K, 2), seed=q)
        report = _run(ctx, permuted_dft_program(ctx, K, P, H, p), X, p)
        _assert_encodes(report, X, build_permuted_dft(ctx, K, P, H))
        assert report.C1 == H
        assert report.C2 == 2 * H
        assert report.profile == predicted_profile_dft(K, P, H, p, W=2)

    def test_radix_above_ports(self):
        ctx = get_field(73)
        X = ctx.GF.Random((8, 1), seed=5)
        report = _run(ctx, permuted_dft_program(ctx, 8, 2, 3, 3), X, 3)
        _assert_encodes(report, X, build_permuted_dft(ctx, 8, 2, 3))
        assert report.C1 == 3

    @pytest.mark.parametrize("q,K,P,H,p", [(13, 4, 2, 2, 1), (19, 9, 3, 2, 2), (257, 16, 4, 2, 3)])
    def test_inverse_round_trip(self, q, K, P, H, p):
        ctx = get_field(q)
        X = ctx.GF.Random((K, 1), seed=K)
        forward = permuted_dft_program(ctx, K, P, H, p)
        inverse = permuted_dft_program(ctx, K, P, H, p, inverse=True)
        report = _run(ctx, Sequential([forward, inverse]), X, p)
        for k in range(K):
            assert np.array_equal(report.outputs[k], X[k])
        assert inverse.rounds == forward.rounds
        inv_report = _run(ctx, inverse, X, p)
        fwd_report = _run(ctx, forward, X, p)
        assert (inv_report.C1, inv_report.C2) == (fwd_report.C1, fwd_report.C2)

    def test_size_one_is_identity(self, gf13):
        X = gf13.GF([[7]])
        report = _run(gf13, permuted_dft_program(gf13, 1, 2, 0, 1), X, 1)
        assert report.C1 == 0
        assert int(report.outputs[0][0]) == 7


# ============================================
# OMEGA GRID TESTS
# ============================================

class TestOmegaGrid:
    """Grid construction and validation"""

    def test_points(self, grid6):
        assert (grid6.P, grid6.H, grid6.M, grid6.Z) == (3, 1, 2, 3)
        assert grid6.alphas == (1, 2)
        assert grid6.betas == (1, 3, 9)
        assert grid6.points == (1, 3, 9, 2, 6, 5)

    def test_phi_not_injective(self, gf13):
        with pytest.raises(PhiNotInjectiveError):
            make_omega_grid(gf13, 6, 3, phi=(0, 0))

    def test_phi_out_of_range(self, gf13):
        with pytest.raises(PhiOutOfRangeError):
            make_omega_grid(gf13, 6, 3, phi=(0, 4))

    def test_custom_phi(self, gf13):
        grid = make_omega_grid(gf13, 6, 3, phi=(1, 3))
        assert grid.alphas == (2, 8)
        assert len(set(grid.points)) == 6

    def test_depth_zero_grid(self, gf13):
        grid = make_omega_grid(gf13, 5, 2)
        assert (grid.H, grid.M) == (0, 5)
        assert grid.points == (1, 2, 4, 8, 3)

    @pytest.mark.parametrize("K,q,p,P", [(6, 13, 2, 3), (8, 13, 1, 2), (5, 13, 1, 2), (9, 19, 1, 3)])
    def test_choose_radix(self, K, q, p, P):
        assert choose_radix(K, q, p) == P


# ============================================
# DRAW-AND-LOOSE TESTS
# ============================================

class TestDrawAndLoose:
    """Vandermonde encode on omega grids"""

    def test_six_point_grid_beats_universal(self, gf13, grid6, random_symbols):
        X = random_symbols(gf13, 6, W=1)
        V = build_vandermonde(gf13, grid6.points, 6)

        structured = _run(gf13, draw_and_loose_program(grid6, 2), X, 2)
        universal = _run(gf13, PrepareAndShoot(V, 2), X, 2)

        _assert_encodes(structured, X, V)
        _assert_encodes(universal, X, V)
        assert (structured.C1, structured.C2) == (2, 2)
        assert (universal.C1, universal.C2) == (2, 4)

    def test_prediction(self, gf13, grid6):
        params = NetParams(N=6, p=2, alpha=1.0, beta=1.0, q=13)
        assert predicted_cost_structured(grid6, 2, params) == (2, 2, pytest.approx(10.0))
        assert predicted_profile_draw_and_loose(grid6, 2) == [1, 1]

    def test_inverse_round_trip(self, gf13, grid6, random_symbols):
        X = random_symbols(gf13, 6, W=2)
        forward = draw_and_loose_program(grid6, 2)
        inverse = draw_and_loose_program(grid6, 2, inverse=True)
        report = _run(gf13, Sequential([forward, inverse]), X, 2)
        for k in range(6):
            assert np.array_equal(report.outputs[k], X[k])
        assert inverse.rounds == forward.rounds

    def test_inverse_encodes_inverse_matrix(self, gf13, grid6, random_symbols):
        X = random_symbols(gf13, 6)
        V = build_vandermonde(gf13, grid6.points, 6)
        report = _run(gf13, draw_and_loose_program(grid6, 2, inverse=True), X, 2)
        _assert_encodes(report, X, np.linalg.inv(V))

    def test_larger_grid_on_global_members(self, gf257):
        grid = make_omega_grid(gf257, 12, 2)
        assert (grid.Z, grid.M) == (4, 3)
        members = list(range(20, 8, -1))
        X = gf257.GF.Random((21, 3), seed=11)
        report = _run(gf257, draw_and_loose_program(grid, 1, members=members), X, 1)
        V = build_vandermonde(gf257, grid.points, 12)
        _assert_encodes(report, X[members], V, members)
        assert report.profile == predicted_profile_draw_and_loose(grid, 1, W=3)

    def test_depth_zero_grid_is_universal(self, gf13, random_symbols):
        grid = make_omega_grid(gf13, 5, 2)
        X = random_symbols(gf13, 5)
        report = _run(gf13, draw_and_loose_program(grid, 1), X, 1)
        _assert_encodes(report, X, build_vandermonde(gf13, grid.points, 5))


# ============================================
# GRID DETECTION TESTS
# ============================================

class TestDetectOmegaGrid:
    """Recovering grids from point lists"""

    def test_detects_constructed_grid(self, gf13, grid6):
        found = detect_omega_grid(grid6.points, gf13, 2)
        assert found is not None
        assert found.grid.points == grid6.points
        assert (found.grid.P, found.grid.H) == (3, 1)
        assert found.in_order

    def test_detects_dft_points(self, gf13):
        found = detect_omega_grid(make_omega_grid(gf13, 4, 2).points, gf13, 1)
        assert found is not None
        assert (found.grid.P, found.grid.H, found.grid.M) == (2, 2, 1)
        assert found.order == (0, 1, 2, 3)

    def test_shuffled_points(self, gf13):
        found = detect_omega_grid([1, 9, 3, 2, 5, 6], gf13, 2)
        assert found is not None
        assert found.grid.points == (1, 3, 9, 2, 6, 5)
        assert found.order == (0, 2, 1, 3, 5, 4)
        assert not found.in_order

    def test_rows_follow_first_appearance(self, gf13):
        found = detect_omega_grid([2, 6, 5, 1, 3, 9], gf13, 2)
        assert found.grid.phi == (1, 0)
        assert found.in_order

    def test_coset_with_large_exponent(self, gf13):
        # 6 = g^5 lies in the coset of g^1 = 2
        found = detect_omega_grid([6, 5, 2], gf13, 2)
        assert found is not None
        assert found.grid.phi == (1,)
        assert found.order == (1, 2, 0)

    def test_grid_members(self, gf13):
        found = detect_omega_grid([1, 9, 3, 2, 5, 6], gf13, 2)
        assert found.grid_members([10, 11, 12, 13, 14, 15]) == (10, 12, 11, 13, 15, 14)

    def test_rejects_unstructured_points(self, gf13):
        assert detect_omega_grid([1, 2, 3, 4, 5, 6], gf13, 2) is None

    def test_rejects_zero_and_duplicates(self, gf13):
        assert detect_omega_grid([0, 1], gf13, 1) is None
        assert detect_omega_grid([3, 3], gf13, 1) is None

    def test_single_point(self, gf13):
        found = detect_omega_grid([5], gf13, 1)
        assert found is not None
        assert found.grid.points == (5,)
        assert found.order == (0,)


class TestReorderedDrawAndLoose:
    """Draw-and-loose on points listed out of grid order"""

    POINTS = [1, 9, 3, 2, 5, 6]

    def test_encodes_in_listed_order(self, gf13, random_symbols):
        found = detect_omega_grid(self.POINTS, gf13, 2)
        X = random_symbols(gf13, 6, W=2)
        report = _run(gf13, draw_and_loose_program(found.grid, 2, order=found.order), X, 2)
        _assert_encodes(report, X, build_vandermonde(gf13, self.POINTS, 6))
        assert (report.C1, report.C2) == (3, 6)
        assert report.profile == predicted_profile_draw_and_loose(found.grid, 2, W=2, order=found.order)

    def test_global_members(self, gf13):
        found = detect_omega_grid(self.POINTS, gf13, 2)
        members = [7, 3, 9, 1, 4, 8]
        X = gf13.GF.Random((10, 1), seed=2)
        program = draw_and_loose_program(found.grid, 2, members=members, order=found.order)
        report = _run(gf13, program, X, 2)
        _assert_encodes(report, X[members], build_vandermonde(gf13, self.POINTS, 6), members)

    def test_inverse_round_trip(self, gf13, random_symbols):
        found = detect_omega_grid(self.POINTS, gf13, 2)
        X = random_symbols(gf13, 6)
        forward = draw_and_loose_program(found.grid, 2, order=found.order)
        inverse = draw_and_loose_program(found.grid, 2, inverse=True, order=found.order)
        report = _run(gf13, Sequential([forward, inverse]), X, 2)
        for k in range(6):
            assert np.array_equal(report.outputs[k], X[k])

    def test_identity_order_adds_no_round(self, gf13, grid6):
        program = draw_and_loose_program(grid6, 2, order=range(6))
        assert program.rounds == 2
        assert predicted_cost_structured(grid6, 2, NetParams(N=6, p=2, q=13), order=range(6))[:2] == (2, 2)

    def test_bad_order(self, gf13, grid6):
        with pytest.raises(ShapeMismatchError):
            draw_and_loose_program(grid6, 2, order=(0, 0, 1, 2, 3, 4))
