import numpy as np
import pytest

from koszulkit.ell2 import (
    identity_op,
    make_catalog_operator,
    zero_op,
)
from koszulkit.errors import (
    IndexSignError,
    IndexZeroError,
    NonCommuting,
    NotStabilized,
    PreconditionError,
)
from koszulkit.linalg import Mat
from koszulkit.randgen import get_rng, random_invertible_pair
from koszulkit.tower import (
    augmented_pair_cohomology,
    commutant_blocks,
    growth_table,
    kernel_restriction_check,
    kernel_tower,
    obstruction_certificate,
)


# -- kernel towers ------------------------------------------------------------


def test_backward_shift_tower(backward_shift):
    tw = kernel_tower(backward_shift, 12)
    assert tw.layer_dims() == (1,) * 12
    assert tw.kernel_dims == tuple(range(1, 13))
    assert tw.n0 == 2
    for n in range(2, 13):
        A = tw.level(n).a_block
        assert A.shape == (1, 1)
        assert abs(A[0, 0] - 1.0) <= 1e-9


def test_squared_shift_tower(backward_shift):
    tw = kernel_tower(backward_shift.power(2), 8)
    assert tw.layer_dims() == (2,) * 8


def test_tower_needs_positive_index(forward_shift):
    with pytest.raises(IndexSignError):
        kernel_tower(forward_shift, 6)
    with pytest.raises(IndexSignError):
        kernel_tower(identity_op(), 6)


def test_tower_orthogonality(backward_shift):
    tw = kernel_tower(backward_shift.power(2), 6)
    allb = np.hstack([lv.h_basis for lv in tw.levels])
    gram = allb.conj().T @ allb
    assert float(np.abs(gram - np.eye(gram.shape[0])).max()) <= 1e-10


def test_tower_layer_dims_nonincreasing(backward_shift):
    # mixed operator: (S*)^2 with a finite-rank patch still stabilizes
    from koszulkit.ell2 import BandedOperator

    patch = Mat.from_rows([[1, 0], [0, 0]])
    T = backward_shift.power(2) + BandedOperator.build([], patch=patch)
    tw = kernel_tower(T, 8)
    dims = tw.layer_dims()
    for n in range(2, len(dims)):
        assert dims[n - 1] >= dims[n]


def test_shallow_tower_not_stabilized(backward_shift):
    with pytest.raises(NotStabilized):
        kernel_tower(backward_shift, 3)


def test_tower_with_shrinking_layers():
    # adjoint of a weighted shift with one dead weight: ker has dim 2 at
    # level 1, then the layers settle to dim 1, so the plateau detector
    # must skip the non-square compression at level 2
    W = make_catalog_operator("weighted_shift", prefix=[0, 2], period=[1])
    Wa = W.adjoint()
    tw = kernel_tower(Wa, 8)
    assert tw.layer_dims() == (2, 1, 1, 1, 1, 1, 1, 1)
    assert tw.n0 == 3


def test_two_dimensional_layers_obstruction(backward_shift):
    # T = (backward shift)^2 has index 2; K = 2I + backward shift commutes
    # and compresses to [[2, 0], [1, 2]] blocks on the 2-dim layers
    T2 = backward_shift.power(2)
    K = identity_op().scale(2) + backward_shift
    cert = obstruction_certificate(T2, K, 10)
    assert cert.layer_dims == (2,) * 10
    assert cert.verdict == "obstructed"
    assert cert.r == pytest.approx(2.0, abs=1e-8)
    tw = kernel_tower(T2, 10)
    blocks = commutant_blocks(T2, K, tw)
    x = blocks.level(4).x_block
    assert np.allclose(np.sort(np.abs([x[0, 0], x[1, 1]])), [2.0, 2.0], atol=1e-8)
    assert blocks.similarity_certified


def test_tower_block_decomposition_reconstructs_the_operator(backward_shift):
    # on ker T^n = H_n + ker T^(n-1), the action of T is
    # [[A_n, 0], [B_n, C_n]] into H_(n-1) + ker T^(n-2)
    T = backward_shift.power(2)
    tw = kernel_tower(T, 6)
    for n in (3, 4, 5):
        lv = tw.level(n)
        H_n = lv.h_basis
        H_prev = tw.level(n - 1).h_basis
        Q_nm1 = np.hstack([tw.level(k).h_basis for k in range(1, n)])
        Q_nm2 = np.hstack([tw.level(k).h_basis for k in range(1, n - 1)])
        L = H_n.shape[0]
        sec = T.section(L, L)
        img = sec @ H_n
        recon = H_prev @ lv.a_block + Q_nm2 @ lv.b_block
        assert np.allclose(img, recon, atol=1e-9)
        img_q = sec @ Q_nm1
        recon_q = Q_nm2 @ lv.c_block  # zero block above C_n
        assert np.allclose(img_q, recon_q, atol=1e-9)


# -- commutant blocks -----------------------------------------------------------


def test_identity_commutant(backward_shift):
    tw = kernel_tower(backward_shift, 8)
    blocks = commutant_blocks(backward_shift, identity_op(), tw)
    for lv in blocks.levels:
        assert np.allclose(lv.x_block, np.eye(lv.x_block.shape[0]), atol=1e-10)
    assert blocks.similarity_certified


def test_shifted_identity_commutant(backward_shift):
    tw = kernel_tower(backward_shift, 12)
    S = identity_op().scale(2) + backward_shift
    blocks = commutant_blocks(backward_shift, S, tw)
    for lv in blocks.levels:
        assert lv.x_block.shape == (1, 1)
        assert abs(lv.x_block[0, 0] - 2.0) <= 1e-9
        if lv.n >= 2:
            assert lv.intertwine_residual <= 1e-9
    assert blocks.similarity_certified


def test_backward_shift_self_commutant(backward_shift):
    tw = kernel_tower(backward_shift, 8)
    blocks = commutant_blocks(backward_shift, backward_shift, tw)
    for lv in blocks.levels:
        assert abs(lv.x_block[0, 0]) <= 1e-10


def test_commutant_rejects_noncommuting(backward_shift, forward_shift):
    tw = kernel_tower(backward_shift, 6)
    with pytest.raises(NonCommuting):
        commutant_blocks(backward_shift, forward_shift, tw)


def test_similarity_chain_for_polynomials(backward_shift):
    tw = kernel_tower(backward_shift, 12)
    rng = get_rng(5)
    for _ in range(6):
        coeffs = [rng.randint(-3, 3) for _ in range(4)]
        S = backward_shift.poly(coeffs)
        blocks = commutant_blocks(backward_shift, S, tw)
        ref = blocks.charpoly_reference
        for n, diff in blocks.charpoly_max_diff.items():
            assert diff <= 1e-8
        assert blocks.similarity_certified


# -- matrix-pair kernel restriction ----------------------------------------------


def test_restriction_vacuous_for_invertible():
    T = Mat.from_rows([[2, 0], [0, 3]])
    assert kernel_restriction_check(T, Mat.identity(2), 3)


def test_restriction_unipotent_pair():
    N = Mat.from_rows([[0, 1], [0, 0]])
    S = Mat.identity(2) + N
    for n in (1, 2):
        assert kernel_restriction_check(N, S, n)


def test_restriction_rejects_noninvertible_pair():
    N = Mat.from_rows([[0, 1], [0, 0]])
    with pytest.raises(PreconditionError):
        kernel_restriction_check(N, N, 1)


def test_restriction_on_random_invertible_pairs(rng):
    for _ in range(20):
        T, S = random_invertible_pair(rng, rng.randint(2, 4))
        for n in (1, 2, 3):
            assert kernel_restriction_check(T, S, n)


# -- obstruction certificates ------------------------------------------------------


def test_obstruction_for_shifted_identity(backward_shift):
    K = identity_op().scale(2) + backward_shift
    cert = obstruction_certificate(backward_shift, K, 12)
    assert cert.verdict == "obstructed"
    assert cert.r == pytest.approx(2.0, abs=1e-8)
    assert cert.n0 <= 3
    for n in range(1, 13):
        assert cert.norms[n] >= 2.0 - 1e-8


def test_obstruction_inconclusive_for_shift_itself(backward_shift):
    cert = obstruction_certificate(backward_shift, backward_shift, 10)
    assert cert.verdict == "inconclusive"
    assert cert.r <= 1e-8


def test_obstruction_inconclusive_for_zero(backward_shift):
    cert = obstruction_certificate(backward_shift, zero_op(), 8)
    assert cert.verdict == "inconclusive"
    assert cert.r == 0.0


def test_obstruction_monotone_in_depth(backward_shift):
    K = identity_op().scale(2) + backward_shift
    shallow = obstruction_certificate(backward_shift, K, 6)
    deep = obstruction_certificate(backward_shift, K, 12)
    assert shallow.verdict == "obstructed"
    assert deep.verdict == "obstructed"


# -- growth tables ---------------------------------------------------------------


def test_growth_table_backward_shift(backward_shift):
    table = growth_table(backward_shift, range(1, 11), 4)
    for row in table.rows:
        assert row.dim_ker == row.m
        assert row.dim_coker == 0
        assert row.index == row.m * table.base_index
        assert row.exceeds == (row.m >= 5)


def test_growth_table_toeplitz_square():
    T = make_catalog_operator("toeplitz", symbol={2: 1})
    table = growth_table(T, range(1, 6), 4)
    for row in table.rows:
        assert row.dim_coker == 2 * row.m
        assert row.dim_ker == 0
        assert row.index == -2 * row.m


def test_growth_table_rejects_index_zero():
    with pytest.raises(IndexZeroError):
        growth_table(identity_op(), [1, 2], 4)


# -- augmented pair cohomology ------------------------------------------------------


def test_pair_cohomology_linear(backward_shift):
    rep = augmented_pair_cohomology(backward_shift, [0, 1])
    assert rep.dims == (1, 1, 0)
    assert rep.index == 0


def test_pair_cohomology_square(backward_shift):
    rep = augmented_pair_cohomology(backward_shift, [0, 0, 1])
    assert rep.dims == (1, 1, 0)
    assert rep.index == 0


def test_pair_cohomology_zero_polynomial(backward_shift):
    T2 = make_catalog_operator("toeplitz", symbol={2: 1}).adjoint()
    for T in (backward_shift, T2):
        k = kernel_tower(T, 5).kernel_dims[0]
        rep = augmented_pair_cohomology(T, [0])
        assert rep.dims == (k, k, 0)
        assert rep.index == 0


def test_pair_cohomology_needs_vanishing_constant(backward_shift):
    from koszulkit.errors import FormatError

    with pytest.raises(FormatError):
        augmented_pair_cohomology(backward_shift, [1, 1])


def test_pair_cohomology_with_cokernel():
    # T = toeplitz(z)* has ker = e0-span and trivial cokernel; its adjoint
    # (the forward shift) flips the roles
    T = make_catalog_operator("toeplitz", symbol={1: 1})
    rep = augmented_pair_cohomology(T, [0, 1])
    assert rep.index == 0
    assert rep.dims == (0, 1, 1)
