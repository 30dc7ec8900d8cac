"""
Binary quadratic form tests: reduction, cycles and proper equivalence.
"""

import pytest

from app.errors import DegenerateInput
from app.forms import BinaryForm, is_reduced, proper_equivalence, reduce_form, reduced_cycle
from app.intmat import Mat2, det


def test_discriminant_and_compose():
    f = BinaryForm(1, 1, -1)
    assert f.discriminant == 5
    g = f.compose(Mat2(2, 1, 1, 1))
    assert g == BinaryForm(5, 5, 1)
    assert g.discriminant == 5


def test_reduce_form_returns_verified_transform():
    f = BinaryForm(5, 5, 1)
    g, T = reduce_form(f)
    assert is_reduced(g)
    assert det(T) == 1
    assert f.compose(T) == g


def test_reduced_cycle_transforms():
    f, _ = reduce_form(BinaryForm(1, 0, -3))
    cycle = reduced_cycle(f)
    assert cycle[0][0] == f
    for g, C in cycle:
        assert f.compose(C) == g


def test_proper_equivalence_finds_transform():
    f = BinaryForm(1, 1, -1)
    g = f.compose(Mat2(2, 1, 1, 1))
    T = proper_equivalence(f, g)
    assert T is not None
    assert det(T) == 1
    assert f.compose(T) == g


def test_proper_equivalence_rejects_other_discriminant():
    assert proper_equivalence(BinaryForm(1, 1, -1), BinaryForm(1, 0, -3)) is None


def test_proper_equivalence_separates_narrow_classes():
    """x^2 - 3y^2 never takes the value -1, so it is not equivalent to its negative."""
    assert proper_equivalence(BinaryForm(1, 0, -3), BinaryForm(-1, 0, 3)) is None


def test_square_discriminant_is_degenerate():
    with pytest.raises(DegenerateInput):
        reduce_form(BinaryForm(1, 0, -1))
