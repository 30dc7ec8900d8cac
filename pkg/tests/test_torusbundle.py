"""
Torus bundle tests: case tags, H, Aut(E) and Out(E) trees, and the
brute-force cross-check.
"""

import pytest

from app import torusbundle
from app.errors import NotSol, NotUnimodular
from app.gl2z import Family
from app.intmat import Mat2
from app.selftest import tb_kappa
from app.structgrp import isomorphic, out_bruteforce, realize
from app.torusbundle import AutTag
from app.words import compose, is_identity


def test_build_rejects_exceptional_monodromy():
    with pytest.raises(NotSol):
        torusbundle.build(Mat2(0, -1, 1, 0))


def test_build_rejects_non_unimodular():
    with pytest.raises(NotUnimodular):
        torusbundle.build(Mat2(1, 0, 0, 2))


def test_symmetric_case(golden):
    G = torusbundle.build(golden)
    assert G.root.M0 == Mat2(1, 1, 1, 0)
    assert G.case.aut_tag == AutTag.SYMMETRIC
    assert G.case.out_tag == "III(a)"
    assert G.case.families == (Family.F1, Family.F3)
    assert G.h.order == 1


def test_tree_reverser_switches_to_involution(golden):
    """(0,-1;1,0) sends M0 to -M0^-1, so the tree uses B0 M0 = (-1,0;1,1)."""
    G = torusbundle.build(golden)
    assert G.case_witness == Mat2(0, -1, 1, 0)
    assert G.reverser_sign(G.case_witness) == -1
    assert G.tree_reverser == (Mat2(-1, 0, 1, 1), "involution")


def test_equal_diagonal_case():
    G = torusbundle.build(Mat2(3, 2, 4, 3))
    assert G.case.aut_tag == AutTag.EQUAL_DIAGONAL
    assert G.case.out_tag == "II(a)"
    assert G.h.invariants == (2, 2)


def test_negative_monodromy_subtag():
    G = torusbundle.build(Mat2(-2, -1, -1, -1))
    assert G.root.eps == -1
    assert G.case.out_subtag == "b"
    assert G.h.order == 5


def test_named_automorphisms(golden):
    G = torusbundle.build(golden)
    named = G.named
    assert set(named) == {"alpha", "beta", "gamma_plus", "gamma_minus", "xi"}
    assert is_identity(compose(named["gamma_minus"], named["gamma_minus"]))
    assert tb_kappa(G) is None


def test_aut_structure_shape(golden):
    G = torusbundle.build(golden)
    tree = torusbundle.aut_structure(G)
    assert tree.shape() == "(((Z^2) x| Z) x| Z_2) x| Z_2"
    assert torusbundle.verify_aut_relators(G).ok


@pytest.mark.parametrize("theta, order", [
    (Mat2(2, 1, 1, 1), 8),
    (Mat2(-2, -1, -1, -1), 40),
    (Mat2(3, 2, 4, 3), 64),
])
def test_out_order(theta, order):
    G = torusbundle.build(theta)
    out = torusbundle.out_structure(G)
    assert out.order == order
    assert torusbundle.verify_out_relators(G, out).ok


def test_out_notes_mention_involutive_reverser(golden):
    out = torusbundle.out_structure(torusbundle.build(golden))
    assert any("involutive reverser" in note for note in out.notes)


@pytest.mark.parametrize("theta", [Mat2(2, 1, 1, 1), Mat2(-2, -1, -1, -1)])
def test_out_matches_bruteforce(theta):
    G = torusbundle.build(theta)
    out = torusbundle.out_structure(G)
    table = out_bruteforce(G)
    assert table.order == out.order
    assert isomorphic(realize(out.tree), table.realization())
