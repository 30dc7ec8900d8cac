"""
Sapphire tests: construction errors, the Aut_0^1 decision, named
automorphisms, normal forms and Out(E).
"""

import pytest

from app import sapphire
from app.errors import DetMinusOne, NotUnimodular, TorusBundleDegenerate, VerificationError
from app.intmat import IDENTITY, REFLECTION, Mat2
from app.selftest import sap_filter, sap_identities
from app.structgrp import isomorphic, out_bruteforce, realize, word
from app.words import compose, inner, invert, is_identity, same_map


@pytest.fixture
def case_one():
    """B = (2,1;1,1): theta = (3,-4;-2,3) has a root of determinant -1, Aut_0^1 is empty."""
    return sapphire.build(Mat2(2, 1, 1, 1))


@pytest.fixture
def equal_diagonal():
    """B = (3,-2;-4,3): theta = (17,24;12,17) = (1,2;1,1)^4."""
    return sapphire.build(Mat2(3, -2, -4, 3))


@pytest.fixture
def opposite_diagonal():
    """B = (1,-2;1,-1): theta = (-3,-2;-4,-3) = -(1,1;2,1)^2."""
    return sapphire.build(Mat2(1, -2, 1, -1))


# ----- build -----

def test_det_minus_one_rejected():
    with pytest.raises(DetMinusOne):
        sapphire.build(Mat2(1, 2, 1, 1))


def test_zero_entry_is_torus_bundle():
    with pytest.raises(TorusBundleDegenerate):
        sapphire.build(Mat2(1, 1, 0, 1))


def test_non_unimodular_rejected():
    with pytest.raises(NotUnimodular):
        sapphire.build(Mat2(2, 1, 1, 2))


def test_build_root(case_one):
    assert case_one.theta == Mat2(3, -4, -2, 3)
    assert case_one.root.M0 == Mat2(1, -2, -1, 1)
    assert case_one.root.ell == 2
    assert case_one.root.eps == 1


# ----- Aut_0^1 -----

def test_fundamental_condition(case_one):
    assert sapphire.fundamental_condition(case_one, 0, 0)
    assert sapphire.fundamental_condition(case_one, 2, 2)
    assert not sapphire.fundamental_condition(case_one, 1, 1)
    assert not sapphire.fundamental_condition(case_one, 1, 2)


def test_case_one(case_one):
    assert not case_one.aut01.nonempty
    assert not case_one.aut01.filter_passed
    assert case_one.case == "I"
    assert case_one.omega_grade == 2
    assert not case_one.generic_shape
    assert not sapphire.extension_problem(case_one, 1).solvable


def test_filter_agrees_with_unrestricted_solver(case_one):
    assert sap_filter(case_one) is None


def test_equal_diagonal_case(equal_diagonal):
    G = equal_diagonal
    assert G.root.M0 == Mat2(1, 2, 1, 1)
    assert G.aut01.nonempty
    assert G.case == "II"
    assert G.omega_grade == 1
    assert G.named["omega"].restriction == Mat2(3, 4, 2, 3)


def test_opposite_diagonal_case():
    G = sapphire.build(Mat2(1, -2, 1, -1))
    assert G.theta == Mat2(-3, -2, -4, -3)
    assert G.root.eps == -1
    assert G.aut01.nonempty
    assert G.case == "III"
    assert not G.generic_shape


def test_solve_extension_grade_zero_is_identity(case_one):
    assert is_identity(sapphire.solve_extension(case_one, 0))
    flipped = sapphire.solve_extension(case_one, 0, -1)
    assert flipped.restriction == -IDENTITY


# ----- named automorphisms -----

def test_involutions(case_one):
    named = case_one.named
    assert is_identity(compose(named["rho"], named["rho"]))
    assert is_identity(compose(named["zeta"], named["zeta"]))


def test_case_one_identities(case_one):
    assert sap_identities(case_one) is None


def test_kappa_words(case_one):
    kappas = sapphire.kappa_identities(case_one)
    assert kappas["b"].word() == word(("alpha", 2))
    assert kappas["d"].word() == word(("beta", -2))
    assert kappas["a"].word() == word(("beta", -1), ("zeta", 1))


def test_omega_conjugation_equal_diagonal(equal_diagonal):
    """omega alpha omega^-1 = alpha^3 beta^8 and omega beta omega^-1 = alpha beta^3."""
    G = equal_diagonal
    named = G.named
    omega = named["omega"]
    conj_alpha = compose(compose(omega, named["alpha"]), invert(omega))
    conj_beta = compose(compose(omega, named["beta"]), invert(omega))
    assert same_map(conj_alpha, sapphire.evaluate_tree_word(G, word(("alpha", 3), ("beta", 8))))
    assert same_map(conj_beta, sapphire.evaluate_tree_word(G, word(("alpha", 1), ("beta", 3))))


def test_zeta_family_members_are_automorphisms(case_one):
    for lam in (-2, 0, 3):
        phi = sapphire.zeta_family(case_one, lam)
        assert phi.sigma == -1


# ----- normal form -----

def test_decompose(case_one):
    named = case_one.named
    assert sapphire.decompose(case_one, named["zeta"]).word() == (("zeta", 1),)
    dec = sapphire.decompose(case_one, compose(named["alpha"], named["omega"]))
    assert (dec.n, dec.c, dec.e, dec.j, dec.f) == (1, 0, 0, 1, 0)


def test_decompose_inner(case_one):
    E = case_one.words_group
    dec = sapphire.decompose(case_one, inner(E, E.generator("b")))
    assert str(dec) == "alpha^2"


# ----- Out(E) -----

@pytest.mark.parametrize("B, order, case", [
    (Mat2(2, 1, 1, 1), 8, "I"),
    (Mat2(3, -2, -4, 3), 32, "II"),
    (Mat2(1, -2, 1, -1), 32, "III"),
])
def test_out_order(B, order, case):
    G = sapphire.build(B)
    out = sapphire.out_structure(G)
    assert out.order == order
    assert out.case == case


def test_out_relators_case_one(case_one):
    out = sapphire.out_structure(case_one)
    assert sapphire.verify_out_relators(case_one, out).ok
    assert sapphire.verify_aut_relators(case_one).ok


def test_out_matches_bruteforce_case_one(case_one):
    out = sapphire.out_structure(case_one)
    table = out_bruteforce(case_one)
    assert table.order == 8
    assert isomorphic(realize(out.tree), table.realization())


@pytest.mark.parametrize("B", [Mat2(3, -2, -4, 3), Mat2(1, -2, 1, -1)])
def test_out_matches_bruteforce_nonempty_cases(B):
    G = sapphire.build(B)
    out = sapphire.out_structure(G)
    table = out_bruteforce(G)
    assert table.order == 32
    assert isomorphic(realize(out.tree), table.realization())


def test_bruteforce_catches_missing_omega(equal_diagonal):
    """Without omega the closure has 16 classes; the solved grade 1 candidates fall outside it."""
    G = equal_diagonal
    seeds = {name: phi for name, phi in G.named.items() if name != "omega"}
    G.out_seeds = lambda: seeds
    with pytest.raises(VerificationError):
        out_bruteforce(G)


def test_out_candidates_span_signs_and_grades(equal_diagonal, case_one):
    candidates = equal_diagonal.out_candidates()
    assert {phi.sigma for phi in candidates} == {1, -1}
    assert {phi.a_grade % 2 for phi in candidates} == {0, 1}
    assert {phi.a_grade % 2 for phi in case_one.out_candidates()} == {0}


def test_extension_problem_reversing_sign(case_one):
    """A v-inverting system with the reflection restriction is solvable: zeta is one of its solutions."""
    problem = sapphire.extension_problem(case_one, 0, REFLECTION, -1)
    assert problem.solvable
    assert len(problem.kernel) == 2


# ----- case II and III identities -----

@pytest.mark.parametrize("B", [Mat2(3, -2, -4, 3), Mat2(1, -2, 1, -1)])
def test_nonempty_case_identities(B):
    assert sap_identities(sapphire.build(B)) is None


def _tree_word(G, *pairs):
    return sapphire.evaluate_tree_word(G, word(*pairs))


def test_equal_diagonal_kappa_v_and_zeta_omega_zeta(equal_diagonal):
    """kappa_v = alpha^2t beta^2rt omega^2 and zeta omega zeta = alpha^t beta^-t(r+1) omega^-1 with (r,t) = (3,-4)."""
    G = equal_diagonal
    named = G.named
    E = G.words_group
    assert same_map(inner(E, E.generator("v")), _tree_word(G, ("alpha", -8), ("beta", -24), ("omega", 2)))
    zwz = compose(compose(named["zeta"], named["omega"]), named["zeta"])
    assert same_map(zwz, _tree_word(G, ("alpha", -4), ("beta", 16), ("omega", -1)))


def test_opposite_diagonal_identities(opposite_diagonal):
    """r = t = 1: omega^2 = beta rho, kappa_v = beta^-1 rho omega^2, zeta omega zeta = alpha beta^-1 rho omega^-1."""
    G = opposite_diagonal
    named = G.named
    E = G.words_group
    omega = named["omega"]
    assert same_map(compose(omega, omega), _tree_word(G, ("beta", 1), ("rho", 1)))
    assert same_map(inner(E, E.generator("v")), _tree_word(G, ("beta", -1), ("rho", 1), ("omega", 2)))
    zwz = compose(compose(named["zeta"], omega), named["zeta"])
    assert same_map(zwz, _tree_word(G, ("alpha", 1), ("beta", -1), ("rho", 1), ("omega", -1)))


def test_omega_conjugation_opposite_diagonal(opposite_diagonal):
    """omega alpha omega^-1 = alpha^r beta^(1+r^2) and omega beta omega^-1 = alpha beta^r."""
    G = opposite_diagonal
    named = G.named
    omega = named["omega"]
    conj_alpha = compose(compose(omega, named["alpha"]), invert(omega))
    conj_beta = compose(compose(omega, named["beta"]), invert(omega))
    assert same_map(conj_alpha, _tree_word(G, ("alpha", 1), ("beta", 2)))
    assert same_map(conj_beta, _tree_word(G, ("alpha", 1), ("beta", 1)))
