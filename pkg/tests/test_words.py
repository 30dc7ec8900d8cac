"""
Word engine tests: group laws in normal form and automorphisms given by
generator images.
"""

import pytest

from app.errors import GroupMismatch, VerificationError
from app.intmat import IDENTITY, Mat2, Vec2
from app.words import (
    SapElement,
    SapGroup,
    TBElement,
    TBGroup,
    apply,
    automorphism_power,
    check_endomorphism,
    compose,
    equal_mod_inner,
    identity_automorphism,
    inner,
    invert,
    is_identity,
    sapphire_theta,
    tb_automorphism,
)


@pytest.fixture
def E(golden):
    return TBGroup(golden)


# ----- Torus bundle group -----

def test_tb_conjugation_by_v(E):
    d, v = E.generator("d"), E.generator("v")
    assert E.mul(E.mul(v, d), E.inv(v)) == TBElement(2, 1, 0)


def test_tb_inverse(E):
    g = TBElement(3, -1, 2)
    assert E.mul(g, E.inv(g)) == E.identity()
    assert E.mul(E.inv(g), g) == E.identity()


def test_tb_identity_satisfies_relators(E):
    images = {n: E.generator(n) for n in E.generator_names}
    assert check_endomorphism(E, images).ok


def test_tb_rejects_non_endomorphism(E):
    with pytest.raises(VerificationError):
        tb_automorphism(E, Mat2(2, 0, 0, 1), 1, Vec2(0, 0))


def test_tb_automorphism_images(E):
    alpha = tb_automorphism(E, IDENTITY, 1, Vec2(1, 0), "alpha")
    assert alpha.image("v") == TBElement(1, 0, 1)
    assert alpha.restriction == IDENTITY
    assert alpha.sigma == 1
    assert alpha.translation == Vec2(1, 0)


def test_inner_automorphism(E):
    kappa = inner(E, E.generator("v"))
    assert kappa.image("d") == TBElement(2, 1, 0)
    assert kappa.restriction == Mat2(2, 1, 1, 1)


def test_compose_with_inverse_is_identity(E):
    gamma = tb_automorphism(E, Mat2(1, 1, 1, 0), 1, Vec2(0, 0), "gamma_plus")
    assert is_identity(compose(gamma, invert(gamma)))
    assert is_identity(compose(invert(gamma), gamma))
    assert automorphism_power(gamma, 2).restriction == Mat2(2, 1, 1, 1)


def test_apply_follows_normal_form(E):
    gamma = tb_automorphism(E, -IDENTITY, 1, Vec2(0, 0))
    assert apply(gamma, TBElement(2, -3, 1)) == TBElement(-2, 3, 1)


def test_equal_mod_inner(E):
    one = identity_automorphism(E)
    assert equal_mod_inner(inner(E, E.generator("v")), one) == TBElement(0, 0, 1)
    gamma_minus = tb_automorphism(E, -IDENTITY, 1, Vec2(0, 0))
    assert equal_mod_inner(compose(gamma_minus, gamma_minus), one) == E.identity()
    gamma_plus = tb_automorphism(E, Mat2(1, 1, 1, 0), 1, Vec2(0, 0))
    assert equal_mod_inner(gamma_plus, one) is None


def test_mixed_groups_rejected(E):
    with pytest.raises(GroupMismatch):
        E.mul(E.identity(), SapElement(0, 0, 0, 0))


# ----- Sapphire group -----

def test_sapphire_theta():
    assert sapphire_theta(Mat2(2, 1, 1, 1)) == Mat2(3, -4, -2, 3)
    assert sapphire_theta(Mat2(1, 2, 1, 1)) == Mat2(3, -2, -4, 3)
    assert sapphire_theta(Mat2(3, -2, -4, 3)) == Mat2(17, 24, 12, 17)


def test_sapphire_a_squared_is_d():
    S = SapGroup(Mat2(2, 1, 1, 1))
    a = S.generator("a")
    assert S.mul(a, a) == S.generator("d")


def test_sapphire_a_inverts_b():
    S = SapGroup(Mat2(2, 1, 1, 1))
    a, b = S.generator("a"), S.generator("b")
    assert S.mul(S.mul(a, b), S.inv(a)) == SapElement(0, -1, 0, 0)


def test_sapphire_identity_satisfies_relators():
    S = SapGroup(Mat2(3, -2, -4, 3))
    images = {n: S.generator(n) for n in S.generator_names}
    assert check_endomorphism(S, images).ok
    assert is_identity(identity_automorphism(S))
