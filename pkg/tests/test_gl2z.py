"""
GL2(Z) tests: classification, primitive roots, reversers, square roots,
conjugacy and the torus bundle homeomorphism test.
"""

import pytest

from app.errors import NotAnosov, NotAReverser, NotUnimodular, DegenerateInput
from app.gl2z import (
    ExceptionalKind,
    Family,
    classify,
    conjugacy_test,
    family_membership,
    find_reverser,
    homeo_test_torus_bundles,
    homeo_witness,
    is_reverser,
    power_log,
    primitive_root,
    reidemeister_finite_flag,
    sqrt_matrices,
)
from app.intmat import IDENTITY, Mat2, inverse, mul, power


# ----- classify -----

def test_classify_anosov(golden):
    cls = classify(golden)
    assert cls.anosov
    assert cls.to_dict() == {"tag": "Anosov"}


@pytest.mark.parametrize("A, kind, parameter", [
    (Mat2(0, -1, 1, 0), ExceptionalKind.ORDER4, None),
    (Mat2(1, -1, 1, 0), ExceptionalKind.ORDER6, None),
    (Mat2(1, 3, 0, 1), ExceptionalKind.PARABOLIC_PLUS, 3),
    (Mat2(-1, 0, 0, -1), ExceptionalKind.MINUS_IDENTITY, 0),
    (Mat2(1, 0, 0, -1), ExceptionalKind.REFLECTION, None),
    (Mat2(0, 1, 1, 0), ExceptionalKind.GLIDE, None),
])
def test_classify_exceptional(A, kind, parameter):
    cls = classify(A)
    assert not cls.anosov
    assert cls.kind == kind
    assert cls.parameter == parameter


def test_classify_rejects_non_unimodular():
    with pytest.raises(NotUnimodular):
        classify(Mat2(1, 0, 0, 2))


# ----- primitive roots -----

def test_primitive_root_of_golden_square(golden):
    root = primitive_root(golden)
    assert root.M0 == Mat2(1, 1, 1, 0)
    assert root.ell == 2
    assert root.eps == 1


def test_primitive_root_of_primitive_matrix():
    root = primitive_root(Mat2(1, 1, 1, 0))
    assert root.M0 == Mat2(1, 1, 1, 0)
    assert root.ell == 1


def test_primitive_root_fourth_power():
    """(17,24;12,17) = (1,2;1,1)^4."""
    theta = Mat2(17, 24, 12, 17)
    root = primitive_root(theta)
    assert root.M0 == Mat2(1, 2, 1, 1)
    assert root.ell == 4
    assert power(root.M0, root.ell) * root.eps == theta


def test_primitive_root_requires_anosov():
    with pytest.raises(NotAnosov):
        primitive_root(Mat2(1, 1, 0, 1))


def test_power_log():
    M = Mat2(1, 1, 1, 0)
    assert power_log(M, power(M, 3)) == (1, 3)
    assert power_log(M, -power(M, -2)) == (-1, -2)
    assert power_log(M, Mat2(1, 1, 0, 1)) is None


# ----- reversers -----

def test_find_reverser_symmetric(golden):
    data = find_reverser(golden)
    assert data.exists
    assert data.witness == Mat2(0, -1, 1, 0)
    assert data.square_sign == -1
    assert data.families == (Family.F1, Family.F3)
    for B in data.family_witnesses.values():
        assert is_reverser(golden, B)


def test_find_reverser_third_family_only():
    A = Mat2(2, 5, 1, 3)
    data = find_reverser(A)
    assert data.exists
    assert data.families == (Family.F3,)
    assert mul(mul(data.witness, A), inverse(data.witness)) == inverse(A)


def test_family_membership_equal_diagonal():
    A = Mat2(3, 2, 4, 3)
    assert Family.F2 in family_membership(A)
    assert is_reverser(A, Mat2(1, 0, 0, -1))


def test_reidemeister_flag(golden):
    assert reidemeister_finite_flag(golden, Mat2(0, -1, 1, 0)) is True


def test_reidemeister_flag_rejects_non_reverser(golden):
    with pytest.raises(NotAReverser):
        reidemeister_finite_flag(golden, IDENTITY)


# ----- square roots -----

def test_sqrt_matrices(golden):
    assert sqrt_matrices(golden) == [Mat2(-1, -1, -1, 0), Mat2(1, 1, 1, 0)]


def test_sqrt_matrices_none():
    assert sqrt_matrices(Mat2(1, 1, 1, 0)) == []


def test_sqrt_matrices_scalar_is_degenerate():
    with pytest.raises(DegenerateInput):
        sqrt_matrices(-IDENTITY)
    with pytest.raises(DegenerateInput):
        sqrt_matrices(IDENTITY)


def test_sqrt_matrices_other_scalars_not_unimodular():
    """Only +-I are degenerate; 2I fails the determinant check like any other input."""
    with pytest.raises(NotUnimodular):
        sqrt_matrices(Mat2.scalar(2))
    with pytest.raises(NotUnimodular):
        sqrt_matrices(Mat2(1, 0, 0, 4))


# ----- conjugacy and homeomorphism -----

def test_conjugacy_test_finds_conjugator(golden):
    B = Mat2(1, 1, 1, 2)
    P = conjugacy_test(golden, B)
    assert P is not None
    assert mul(mul(P, golden), inverse(P)) == B


def test_conjugacy_test_trace_mismatch(golden):
    assert conjugacy_test(golden, Mat2(3, 2, 4, 3)) is None


def test_homeo_trace_mismatch(golden):
    assert homeo_test_torus_bundles(golden, Mat2(3, 2, 4, 3)) is False


def test_homeo_inverse(golden):
    homeomorphic, P, _ = homeo_witness(golden, inverse(golden))
    assert homeomorphic
    assert P is not None


def test_homeo_conjugate():
    A = Mat2(2, 5, 1, 3)
    P = Mat2(1, 2, 0, 1)
    assert homeo_test_torus_bundles(A, mul(mul(P, A), inverse(P)))
