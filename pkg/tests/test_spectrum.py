import numpy as np
import pytest

from koszulkit.errors import DeflationFailure, PreconditionError
from koszulkit.koszul import validate_tuple
from koszulkit.linalg import Mat, mat_power
from koszulkit.polymap import Polynomial, PolyMap
from koszulkit.randgen import random_commuting_tuple, random_poly_map
from koszulkit.scalars import EXACT, GaussianRational
from koszulkit.spectrum import (
    apply_poly_map,
    joint_spectrum,
    point_in_spectrum,
    poly_map_invertibility_check,
    spectral_mapping_check,
)


def diag(*vals):
    d = len(vals)
    return Mat.from_rows(
        [[vals[i] if i == j else 0 for j in range(d)] for i in range(d)]
    )


def p1(terms, nvars=1):
    return Polynomial.from_terms(nvars, terms, EXACT)


# -- joint spectrum ---------------------------------------------------------


def test_diagonal_tuple_spectrum():
    T = validate_tuple([diag(1, 2), diag(3, 4)])
    s = joint_spectrum(T)
    assert s.distinct() == (((1 + 0j), (3 + 0j)), ((2 + 0j), (4 + 0j)))
    assert all(p.multiplicity == 1 for p in s.points)


def test_identity_pair_spectrum():
    s = joint_spectrum(validate_tuple([Mat.identity(2), Mat.identity(2)]))
    assert len(s.points) == 1
    assert s.points[0].multiplicity == 2
    assert s.points[0].as_complex() == ((1 + 0j), (1 + 0j))


def test_nilpotent_tuple_spectrum_is_origin():
    N = Mat.from_rows([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    T = validate_tuple([N, mat_power(N, 2)])
    s = joint_spectrum(T)
    assert s.distinct() == ((0j, 0j),)
    assert s.points[0].multiplicity == 3
    assert point_in_spectrum(T, [0, 0])
    assert not point_in_spectrum(T, [1, 0])


def test_spectrum_points_verify_against_cohomology(rng):
    for _ in range(5):
        T = random_commuting_tuple(rng, 3, 2, scheme="diag")
        s = joint_spectrum(T)
        for p in s.points:
            assert point_in_spectrum(T, p.point)
        for _ in range(10):
            z = [GaussianRational(rng.randint(5, 9), 1) for _ in range(T.n)]
            assert not point_in_spectrum(T, z)


def test_spectrum_multiplicities_sum_to_dimension(rng):
    for _ in range(5):
        T = random_commuting_tuple(rng, 4, 2, scheme="poly")
        try:
            s = joint_spectrum(T)
        except DeflationFailure:
            continue  # irrational eigenvalues are a documented exact-mode limit
        assert sum(p.multiplicity for p in s.points) == 4


def test_spectrum_permutation_covariance(rng):
    T = random_commuting_tuple(rng, 3, 3, scheme="diag")
    s = joint_spectrum(T)
    perm = [2, 0, 1]
    Tp = validate_tuple([T.matrices[i] for i in perm])
    sp = joint_spectrum(Tp)
    expect = {tuple(pt.as_complex()[i] for i in perm) for pt in s.points}
    assert expect == set(sp.distinct())


def test_float_mode_spectrum():
    T = validate_tuple(
        [Mat.from_numpy(np.array([[1.0, 1.0], [0.0, 2.0]], dtype=complex))]
    )
    s = joint_spectrum(T)
    vals = sorted(z[0].real for z in s.distinct())
    assert vals == pytest.approx([1.0, 2.0])


def test_deflation_failure_on_irrational_eigenvalues():
    # eigenvalues +-sqrt(2) are not Gaussian rational
    T = validate_tuple([Mat.from_rows([[0, 2], [1, 0]])])
    with pytest.raises(DeflationFailure):
        joint_spectrum(T)


# -- polynomial calculus -----------------------------------------------------


def test_apply_identity_map_returns_same_matrices():
    T = validate_tuple([diag(1, 2), diag(3, 4)])
    out = apply_poly_map(PolyMap.identity(2), T)
    assert out.matrices == T.matrices


def test_apply_power_map_kills_nilpotent():
    N = Mat.from_rows([[0, 1], [0, 0]])
    T = validate_tuple([N, Mat.zeros(2, 2)])
    f = PolyMap.from_components(
        [p1([((2, 0), 1)], 2), p1([((0, 1), 1)], 2)]
    )
    out = apply_poly_map(f, T)
    assert out.matrices[0].is_zero() and out.matrices[1].is_zero()


def test_apply_square_on_diagonal():
    T = validate_tuple([diag(1, 2)])
    out = apply_poly_map(PolyMap.from_components([p1([((2,), 1)])]), T)
    assert out.matrices[0] == diag(1, 4)


def test_poly_map_composition_property(rng):
    for _ in range(10):
        T = random_commuting_tuple(rng, 3, 2)
        g = random_poly_map(rng, 2, 2, max_degree=2)
        f = random_poly_map(rng, 2, 2, max_degree=2)
        via_matrices = apply_poly_map(f, apply_poly_map(g, T))
        composed = apply_poly_map(f.compose(g), T)
        assert via_matrices.matrices == composed.matrices


# -- spectral mapping ---------------------------------------------------------


def test_spectral_mapping_identity_always_true():
    T = validate_tuple([diag(1, 2), diag(3, 4)])
    assert spectral_mapping_check(PolyMap.identity(2), T, 1e-6)


def test_spectral_mapping_square():
    T = validate_tuple([diag(1, 2)])
    f = PolyMap.from_components([p1([((2,), 1)])])
    assert spectral_mapping_check(f, T, 1e-6)
    assert joint_spectrum(apply_poly_map(f, T)).distinct() == (
        ((1 + 0j),),
        ((4 + 0j),),
    )


def test_spectral_mapping_nilpotent_shear():
    N = Mat.from_rows([[0, 1], [0, 0]])
    T = validate_tuple([N, Mat.zeros(2, 2)])
    f = PolyMap.from_components(
        [p1([((1, 0), 1)], 2), p1([((0, 1), 1), ((1, 0), -1)], 2)]
    )
    assert spectral_mapping_check(f, T, 1e-6)


# -- invertibility under origin-only-vanishing maps ---------------------------


def test_invertibility_check_trivial():
    T = validate_tuple([Mat.identity(2)])
    f = PolyMap.identity(1)
    assert poly_map_invertibility_check(T, f)


def test_invertibility_check_power_map():
    # scaled identities: applying (z1^m, z2) must stay invertible
    T = validate_tuple([Mat.identity(2).scale(2), Mat.identity(2).scale(3)])
    for m in (1, 2, 3, 5):
        f = PolyMap.from_components(
            [p1([((m, 0), 1)], 2), p1([((0, 1), 1)], 2)]
        )
        assert poly_map_invertibility_check(T, f)


def test_invertibility_check_shear():
    # f(z1,z2) = (z1, z2 - z1 + 1): joint eigenvalues avoid 0 on both sides
    T = validate_tuple([diag(1, 2), diag(1, 3)])
    f = PolyMap.from_components(
        [
            p1([((1, 0), 1)], 2),
            p1([((0, 1), 1), ((1, 0), -1), ((0, 0), 1)], 2),
        ]
    )
    assert poly_map_invertibility_check(T, f)


def test_invertibility_check_rejects_noninvertible_tuple():
    N = Mat.from_rows([[0, 1], [0, 0]])
    with pytest.raises(PreconditionError):
        poly_map_invertibility_check(validate_tuple([N]), PolyMap.identity(1))


def test_spotcheck_flags_vanishing_on_the_spectrum(rng):
    # f(z) = z^2 - z vanishes at 1, which lies in the spectrum of I
    T = validate_tuple([Mat.identity(2)])
    f = PolyMap.from_components([p1([((2,), 1), ((1,), -1)])])
    with pytest.raises(PreconditionError):
        poly_map_invertibility_check(T, f, rng=rng)


def test_spotcheck_tolerates_vanishing_off_the_spectrum(rng):
    # same f, but the spectrum {3} avoids its zero set {0, 1}
    T = validate_tuple([Mat.identity(2).scale(3)])
    f = PolyMap.from_components([p1([((2,), 1), ((1,), -1)])])
    assert poly_map_invertibility_check(T, f, rng=rng)
