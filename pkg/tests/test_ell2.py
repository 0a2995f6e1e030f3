from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from koszulkit.ell2 import (
    BandedOperator,
    Diagonal,
    TruncationWindow,
    fredholm_index_banded,
    identity_op,
    kernel_of_power,
    make_catalog_operator,
    restricted_norm,
    zero_op,
)
from koszulkit.errors import FormatError, PreconditionError
from koszulkit.linalg import Mat
from koszulkit.scalars import GR_ONE, GaussianRational

from oracles import oracle_winding


@st.composite
def banded_ops(draw, max_bw=2, max_prefix=3, max_period=2):
    diags = []
    for o in range(-max_bw, max_bw + 1):
        if not draw(st.booleans()):
            continue
        pre = draw(st.lists(st.integers(-2, 2), max_size=max_prefix))
        per = draw(st.lists(st.integers(-2, 2), min_size=1, max_size=max_period))
        diags.append(
            Diagonal(
                o,
                tuple(GaussianRational(v) for v in pre),
                tuple(GaussianRational(v) for v in per),
            )
        )
    patch = None
    if draw(st.booleans()):
        p = draw(st.integers(1, 2))
        ent = draw(st.lists(st.integers(-2, 2), min_size=p * p, max_size=p * p))
        patch = Mat.from_rows(
            [[ent[i * p + j] for j in range(p)] for i in range(p)]
        )
    return BandedOperator.build(diags, patch=patch)


# -- catalog ----------------------------------------------------------------


def test_adjoint_shift_entries(backward_shift):
    for i in range(4):
        assert backward_shift.entry(i, i + 1) == GR_ONE
        assert backward_shift.entry(i, i).is_zero()
        assert backward_shift.entry(i + 1, i).is_zero()


def test_toeplitz_z_is_forward_shift(forward_shift):
    T = make_catalog_operator("toeplitz", symbol={1: 1})
    assert T.diagonals == forward_shift.diagonals


def test_decaying_diagonal_is_compact_candidate():
    from koszulkit.ell2 import decay_diagonal

    D = decay_diagonal(lambda k: Fraction(1, k + 1), 12)
    assert D.is_compact_candidate()
    assert D.entry(3, 3) == GaussianRational(Fraction(1, 4))
    assert D.entry(20, 20).is_zero()
    assert not D.fredholm


def test_unknown_kind_rejected():
    with pytest.raises(FormatError):
        make_catalog_operator("hankel")
    with pytest.raises(FormatError):
        make_catalog_operator("toeplitz", symbol={})


# -- algebra ----------------------------------------------------------------


def test_adjoint_involution(backward_shift):
    assert backward_shift.adjoint().adjoint() == backward_shift


def test_shift_relations(forward_shift, backward_shift):
    assert backward_shift * forward_shift == identity_op().scale(1) or (
        (backward_shift * forward_shift).diagonals == identity_op().diagonals
    )
    SSt = forward_shift * backward_shift
    # I minus the projection onto the first coordinate
    assert SSt.entry(0, 0).is_zero()
    for k in range(1, 6):
        assert SSt.entry(k, k) == GR_ONE
    sec = SSt.section(8, 8)
    expect = np.eye(8)
    expect[0, 0] = 0.0
    assert np.allclose(sec, expect)


def test_adjoint_is_conjugate_transpose_on_sections(backward_shift):
    K = backward_shift + identity_op().scale(GaussianRational(1, 2))
    A = K.section(10, 10)
    B = K.adjoint().section(10, 10)
    assert np.allclose(B, A.conj().T)


@settings(max_examples=30, deadline=None)
@given(banded_ops(), banded_ops())
def test_product_sections_match_matrix_product(a, b):
    n = 8
    wa, wb = a.bandwidth, b.bandwidth
    pa, pb = a.patch_size, b.patch_size
    k = max(n + wa, pa, pb, n + wb) + wa + wb + 1
    left = a.section(n, k) @ b.section(k, n)
    prod = (a * b).section(n, n)
    assert np.allclose(prod, left, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(banded_ops(), banded_ops())
def test_sum_sections_match(a, b):
    s = (a + b).section(9, 9)
    assert np.allclose(s, a.section(9, 9) + b.section(9, 9), atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(banded_ops())
def test_adjoint_involution_property(a):
    assert a.adjoint().adjoint() == a


def test_poly_matches_repeated_products(backward_shift):
    p = backward_shift.poly([0, 2, 0, 1])  # 2T + T^3
    direct = backward_shift.scale(2) + backward_shift.power(3)
    assert p == direct


def test_tail_normalization_canonicalizes():
    d1 = BandedOperator.build([Diagonal(0, (GR_ONE,), (GR_ONE,))])
    d2 = BandedOperator.build([Diagonal(0, (), (GR_ONE, GR_ONE))])
    assert d1 == d2 == identity_op().scale(1)


# -- certified kernels --------------------------------------------------------


def test_backward_shift_kernel_power(backward_shift):
    sub = kernel_of_power(backward_shift, 5)
    assert sub.dim == 5 and sub.certified
    P = sub.basis @ sub.basis.conj().T
    assert np.allclose(P[:5, :5], np.eye(5), atol=1e-9)
    assert float(np.abs(sub.basis[5:, :]).max()) <= 1e-9


def test_forward_shift_is_injective(forward_shift):
    for m in (1, 3, 5):
        assert kernel_of_power(forward_shift, m).dim == 0


def test_toeplitz_square_adjoint_kernel():
    T = make_catalog_operator("toeplitz", symbol={2: 1})
    assert kernel_of_power(T.adjoint(), 1).dim == 2


def test_kernel_dims_nondecreasing_with_stable_growth(backward_shift):
    T2 = make_catalog_operator("toeplitz", symbol={2: 1}).adjoint()
    for T, step in ((backward_shift, 1), (T2, 2)):
        dims = [kernel_of_power(T, m).dim for m in range(1, 9)]
        assert all(b >= a for a, b in zip(dims, dims[1:]))
        diffs = [b - a for a, b in zip(dims, dims[1:])]
        assert all(d == step for d in diffs[2:])


def test_certified_subspace_reverifies_at_double_window(backward_shift):
    sub = kernel_of_power(backward_shift, 4)
    again = kernel_of_power(
        backward_shift, 4, TruncationWindow(2 * sub.window.N, sub.window.G)
    )
    assert again.dim == sub.dim and again.certified


def test_small_guard_rejected(backward_shift):
    with pytest.raises(FormatError):
        kernel_of_power(backward_shift, 8, TruncationWindow(64, 4))


# -- index -------------------------------------------------------------------


def test_index_examples(backward_shift):
    assert fredholm_index_banded(backward_shift).index == 1
    assert fredholm_index_banded(identity_op()).index == 0
    for k in (1, 2, 3):
        T = make_catalog_operator("toeplitz", symbol={k: 1})
        assert fredholm_index_banded(T).index == -k


def test_index_matches_winding_oracle():
    symbols = [
        {1: GaussianRational(1)},
        {2: GaussianRational(1)},
        {-1: GaussianRational(1)},
        {1: GaussianRational(1), 0: GaussianRational(3)},  # 3 + z: no winding
        {2: GaussianRational(1), 0: GaussianRational(Fraction(1, 4))},
        {1: GaussianRational(1), 2: GaussianRational(2)},  # roots 0, -1/2
    ]
    for sym in symbols:
        T = make_catalog_operator("toeplitz", symbol=sym)
        assert T.fredholm
        assert fredholm_index_banded(T).index == -oracle_winding(sym)


def test_index_requires_fredholm_flag():
    D = make_catalog_operator("diagonal", values=[1])
    with pytest.raises(PreconditionError):
        fredholm_index_banded(D)


def test_index_multiplicativity(backward_shift):
    T2 = make_catalog_operator("toeplitz", symbol={2: 1})
    for T, base in ((backward_shift, 1), (T2, -2)):
        for m in range(1, 9):
            assert fredholm_index_banded(T.power(m)).index == m * base


def test_index_invariant_under_finite_rank_patch(backward_shift):
    patch = Mat.from_rows([[2, 1], [0, -1]])
    pert = backward_shift + BandedOperator.build([], patch=patch)
    assert pert.fredholm
    assert fredholm_index_banded(pert).index == 1


def test_index_invariant_under_small_compact_diagonal(backward_shift):
    small = make_catalog_operator(
        "diagonal", values=[Fraction(1, 2000 + k) for k in range(24)]
    )
    pert = backward_shift + small
    assert pert.fredholm
    assert fredholm_index_banded(pert).index == 1


# -- restricted norms ----------------------------------------------------------


def test_restricted_norm_identity_and_zero():
    basis = np.zeros((4, 2), dtype=complex)
    basis[0, 0] = 1.0
    basis[2, 1] = 1.0
    assert restricted_norm(identity_op(), basis) == pytest.approx(1.0)
    assert restricted_norm(zero_op(), basis) == 0.0


def test_restricted_norm_shifted_column(forward_shift):
    K = identity_op().scale(2) + forward_shift
    e5 = np.zeros((6, 1), dtype=complex)
    e5[5, 0] = 1.0
    assert restricted_norm(K, e5) == pytest.approx(np.sqrt(5.0), abs=1e-9)


# -- serialization round trip ---------------------------------------------------


def test_catalog_round_trip():
    from koszulkit.jsonio import operator_from_json, operator_to_json

    ops = [
        make_catalog_operator("shift"),
        make_catalog_operator("adjoint_shift"),
        make_catalog_operator("weighted_shift", prefix=[0], period=[1, 2]),
        make_catalog_operator("toeplitz", symbol={-1: Fraction(1, 2), 2: 1}),
        make_catalog_operator("diagonal", values=[Fraction(1, k + 1) for k in range(6)]),
        make_catalog_operator("shift") + BandedOperator.build([], patch=Mat.from_rows([[1]])),
    ]
    for op in ops:
        again = operator_from_json(operator_to_json(op))
        assert again == op
        assert again.fredholm == op.fredholm
        assert np.allclose(again.section(12, 12), op.section(12, 12))
