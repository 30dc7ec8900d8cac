"""
SolAut Torus Bundle Module
Automorphism and outer automorphism groups of E = (Z+Z) x|_theta Z for an
Anosov theta, with explicit structure trees and presentations.

Every automorphism is determined by (N, sigma, w): the restriction N to
the lattice <d, b>, the sign sigma induced on the quotient Z, and
phi(v) = w v^sigma. Inner automorphisms are (theta^k, +1, (I - theta) x).
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Dict, Hashable, List, Optional, Tuple

from .errors import NotSol, NotUnimodular, VerificationError
from .gl2z import (
    Family,
    PrimitiveRootData,
    ReverserData,
    find_reverser,
    is_anosov,
    power_log,
    primitive_root,
)
from .intmat import (
    IDENTITY,
    Mat2,
    Vec2,
    det,
    inverse,
    mul,
    power,
    smith_decomposition,
    trace,
)
from .structgrp import (
    Cyclic,
    CyclicExtension,
    FiniteQuotient,
    IntegersZ,
    Lattice,
    Presentation,
    PresentationReport,
    SemidirectProduct,
    StructureTree,
    check_relators,
    presentation,
    word,
)
from .words import (
    GroupAutomorphism,
    TBGroup,
    compose,
    equal_mod_inner,
    identity_automorphism,
    invert,
    is_identity,
    tb_automorphism,
)

logger = logging.getLogger(__name__)


class AutTag(str, Enum):
    """Case numbering of the Aut(E) classification."""
    NO_REVERSER = "NoReverser"
    EQUAL_DIAGONAL = "CaseI_equal_diagonal"
    SYMMETRIC = "CaseII_symmetric"
    THIRD_FAMILY = "CaseIII_third_family"


# The Out(E) classification numbers the same situations one step later.
OUT_NUMERAL = {
    AutTag.NO_REVERSER: "I",
    AutTag.EQUAL_DIAGONAL: "II",
    AutTag.SYMMETRIC: "III",
    AutTag.THIRD_FAMILY: "IV",
}

FAMILY_TAG = {
    Family.F2: AutTag.EQUAL_DIAGONAL,
    Family.F1: AutTag.SYMMETRIC,
    Family.F3: AutTag.THIRD_FAMILY,
}

# reporting precedence when theta lies in several families
FAMILY_PRECEDENCE = (Family.F2, Family.F1, Family.F3)


@dataclass(frozen=True)
class AutCase:
    aut_tag: AutTag
    out_numeral: str
    out_subtag: str
    families: Tuple[Family, ...] = ()

    @property
    def out_tag(self) -> str:
        return f"{self.out_numeral}({self.out_subtag})"

    def to_dict(self) -> dict:
        return {
            "aut": self.aut_tag.value,
            "out": self.out_tag,
            "families": [f.value for f in self.families],
        }


@dataclass(frozen=True)
class HGroup:
    """H = Z^2 / (I - theta) Z^2 with the action of M0 in Smith coordinates."""
    invariants: Tuple[int, int]
    U: Tuple[Tuple[int, int], Tuple[int, int]]
    M0_action: Tuple[Tuple[int, int], Tuple[int, int]]

    @property
    def order(self) -> int:
        return self.invariants[0] * self.invariants[1]

    def residue(self, w: Vec2) -> Tuple[int, int]:
        (u00, u01), (u10, u11) = self.U
        n0, n1 = self.invariants
        return ((u00 * w.x + u01 * w.y) % n0, (u10 * w.x + u11 * w.y) % n1)

    def to_dict(self) -> dict:
        return {
            "invariants": [str(n) for n in self.invariants],
            "order": str(self.order),
            "M0_action": [[str(x) for x in row] for row in self.M0_action],
        }


def h_group(theta: Mat2, M0: Mat2) -> HGroup:
    snf = smith_decomposition((IDENTITY - theta).rows())
    n0, n1 = abs(snf.S[0][0]), abs(snf.S[1][1])
    U = Mat2(snf.U[0][0], snf.U[0][1], snf.U[1][0], snf.U[1][1])
    action = mul(mul(U, M0), inverse(U))
    if n0 * n1 != abs(det(IDENTITY - theta)):
        raise VerificationError(f"|H| = {n0 * n1} disagrees with |det(I - theta)| for {theta}")
    return HGroup(
        invariants=(n0, n1),
        U=((U.a, U.b), (U.c, U.d)),
        M0_action=((action.a % n0, action.b % n0), (action.c % n1, action.d % n1)),
    )


def vector_word(w: Vec2, labels: Tuple[str, str] = ("alpha", "beta")):
    return word((labels[0], w.x), (labels[1], w.y))


@dataclass
class OutStructure:
    tree: StructureTree
    presentation: Presentation
    order: int
    case: AutCase
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "case": self.case.to_dict(),
            "shape": self.tree.shape(),
            "tree": self.tree.to_dict(),
            "presentation": self.presentation.to_dict(),
            "order": str(self.order),
            "notes": self.notes,
        }


@dataclass
class TorusBundleGroup:
    theta: Mat2
    root: PrimitiveRootData
    reverser: ReverserData

    @property
    def words_group(self) -> TBGroup:
        return TBGroup(self.theta)

    @property
    def case(self) -> AutCase:
        subtag = "a" if self.root.eps == 1 else "b"
        if not self.reverser.exists:
            return AutCase(AutTag.NO_REVERSER, OUT_NUMERAL[AutTag.NO_REVERSER], subtag)
        fam = next(f for f in FAMILY_PRECEDENCE if f in self.reverser.families)
        tag = FAMILY_TAG[fam]
        return AutCase(tag, OUT_NUMERAL[tag], subtag, self.reverser.families)

    @property
    def case_witness(self) -> Optional[Mat2]:
        if not self.reverser.exists:
            return None
        fam = next(f for f in FAMILY_PRECEDENCE if f in self.reverser.families)
        return self.reverser.family_witnesses[fam]

    @cached_property
    def h(self) -> HGroup:
        return h_group(self.theta, self.root.M0)

    def reverser_sign(self, B: Mat2) -> int:
        """+1 when B M0 B^-1 = M0^-1, -1 when it equals -M0^-1."""
        conj = mul(mul(B, self.root.M0), inverse(B))
        Mi = inverse(self.root.M0)
        if conj == Mi:
            return 1
        if conj == -Mi:
            return -1
        raise VerificationError(f"{B} does not invert M0 = {self.root.M0} up to sign")

    @cached_property
    def tree_reverser(self) -> Optional[Tuple[Mat2, str]]:
        """Reverser used for the xi level of the trees and the shape it leads to."""
        B = self.case_witness
        if B is None:
            return None
        square = mul(B, B)
        if square == IDENTITY:
            return B, "involution"
        if self.reverser_sign(B) == 1:
            return B, "order4"
        B = mul(B, self.root.M0)
        if mul(B, B) != IDENTITY:
            raise VerificationError(f"{B} was expected to be an involutive reverser")
        return B, "involution"

    @cached_property
    def named(self) -> Dict[str, GroupAutomorphism]:
        return named_automorphisms(self)

    def tree_generators(self) -> Dict[str, GroupAutomorphism]:
        """Automorphisms standing behind the labels of the structure trees."""
        gens = {k: v for k, v in self.named.items() if k != "xi"}
        if self.tree_reverser is not None:
            B, _ = self.tree_reverser
            gens["xi"] = tb_automorphism(self.words_group, B, -1, Vec2(0, 0), "xi")
        return gens

    # ----- brute-force protocol -----

    def out_seeds(self) -> Dict[str, GroupAutomorphism]:
        return self.tree_generators()

    def out_key(self, phi: GroupAutomorphism) -> Hashable:
        N = phi.restriction
        if phi.sigma == -1:
            if self.tree_reverser is None:
                return (-1, None, self.h.residue(phi.translation))
            N = mul(N, inverse(self.tree_reverser[0]))
        found = power_log(self.root.M0, N)
        cls = None
        if found is not None:
            s, j = found
            ell, eps = self.root.ell, self.root.eps
            j_mod = j % ell
            m = (j_mod - j) // ell
            cls = (s * eps ** (m % 2), j_mod)
        return (phi.sigma, cls, self.h.residue(phi.translation))

    def out_candidates(self) -> List[GroupAutomorphism]:
        """One automorphism per induced-data class, built without the named generators."""
        G = self.words_group
        snf = smith_decomposition((IDENTITY - self.theta).rows())
        U_inv = inverse(Mat2(snf.U[0][0], snf.U[0][1], snf.U[1][0], snf.U[1][1]))
        n0, n1 = self.h.invariants
        translations = [U_inv.apply(Vec2(i, j)) for i in range(n0) for j in range(n1)]
        span = self.root.ell * (1 if self.root.eps == 1 else 2)
        restrictions = [(power(self.root.M0, j) * s, 1) for j in range(span) for s in (1, -1)]
        if self.tree_reverser is not None:
            B = self.tree_reverser[0]
            restrictions += [(mul(N, B), -1) for N, _ in list(restrictions)]
        out = []
        for N, sigma in restrictions:
            for w in translations:
                out.append(tb_automorphism(G, N, sigma, w, f"({N},{sigma},{w})"))
        return out

    def to_dict(self) -> dict:
        return {
            "theta": str(self.theta),
            "root": self.root.to_dict(),
            "reverser": self.reverser.to_dict(),
            "case": self.case.to_dict(),
            "H": self.h.to_dict(),
        }


def build(theta: Mat2) -> TorusBundleGroup:
    """Torus bundle group for an Anosov monodromy; exceptional monodromy is not Sol."""
    d = det(theta)
    if d not in (1, -1):
        raise NotUnimodular(f"{theta} has determinant {d}", {"matrix": str(theta), "det": d})
    if not is_anosov(theta):
        raise NotSol(f"{theta} is not Anosov (det {d}, trace {trace(theta)})", {"matrix": str(theta)})
    root = primitive_root(theta)
    reverser = find_reverser(theta)
    G = TorusBundleGroup(theta=theta, root=root, reverser=reverser)
    logger.info(f"built torus bundle group for {theta}: M0={root.M0} ell={root.ell} eps={root.eps} case={G.case.out_tag}")
    return G


def named_automorphisms(G: TorusBundleGroup) -> Dict[str, GroupAutomorphism]:
    E = G.words_group
    zero = Vec2(0, 0)
    named = {
        "alpha": tb_automorphism(E, IDENTITY, 1, Vec2(1, 0), "alpha"),
        "beta": tb_automorphism(E, IDENTITY, 1, Vec2(0, 1), "beta"),
        "gamma_plus": tb_automorphism(E, G.root.M0, 1, zero, "gamma_plus"),
        "gamma_minus": tb_automorphism(E, -IDENTITY, 1, zero, "gamma_minus"),
    }
    if G.reverser.exists:
        named["xi"] = tb_automorphism(E, G.case_witness, -1, zero, "xi")
    return named


def _xi_gamma_image(G: TorusBundleGroup, B: Mat2, out: bool):
    """Image of gamma_plus under conjugation by the reverser automorphism with restriction B."""
    if G.reverser_sign(B) == 1:
        return word(("gamma_plus", -1))
    if out and G.root.eps == -1:
        return word(("gamma_plus", G.root.ell - 1))
    return word(("gamma_minus", 1), ("gamma_plus", -1))


def _lattice_action(G: TorusBundleGroup, B: Mat2) -> Tuple[Tuple[str, tuple], ...]:
    """Conjugation by a type II automorphism sends the translation by x to the translation by -theta B x."""
    A = mul(G.theta, B) * -1
    return (("alpha", vector_word(A.column(0))), ("beta", vector_word(A.column(1))))


def _gamma_plus_action(M0: Mat2) -> Tuple[Tuple[str, tuple], ...]:
    return (("alpha", vector_word(M0.column(0))), ("beta", vector_word(M0.column(1))))


def _aut0_core(G: TorusBundleGroup) -> SemidirectProduct:
    return SemidirectProduct(Lattice(), IntegersZ("gamma_plus"), _gamma_plus_action(G.root.M0))


def _negate_action(labels: Tuple[str, ...], fixed: Tuple[str, ...] = ()):
    return tuple((x, word((x, -1))) for x in labels) + tuple((x, word((x, 1))) for x in fixed)


def aut_structure(G: TorusBundleGroup) -> StructureTree:
    core = _aut0_core(G)
    aut0 = SemidirectProduct(core, Cyclic(2, "gamma_minus"), _negate_action(("alpha", "beta"), ("gamma_plus",)))
    if G.tree_reverser is None:
        return aut0
    B, shape = G.tree_reverser
    action = _lattice_action(G, B)
    if shape == "order4":
        return SemidirectProduct(core, Cyclic(4, "xi"), action + (("gamma_plus", word(("gamma_plus", -1))),))
    action += (("gamma_plus", _xi_gamma_image(G, B, out=False)), ("gamma_minus", word(("gamma_minus", 1))))
    return SemidirectProduct(aut0, Cyclic(2, "xi"), action)


def out_structure(G: TorusBundleGroup) -> OutStructure:
    theta, root = G.theta, G.root
    notes: List[str] = []
    H = FiniteQuotient(((IDENTITY - theta).column(0).as_tuple(), (IDENTITY - theta).column(1).as_tuple()))
    cyclic_order = root.ell if root.eps == 1 else 2 * root.ell
    level1 = SemidirectProduct(H, Cyclic(cyclic_order, "gamma_plus"), _gamma_plus_action(root.M0))
    if root.eps == 1:
        level2 = SemidirectProduct(level1, Cyclic(2, "gamma_minus"), _negate_action(("alpha", "beta"), ("gamma_plus",)))
    else:
        level2 = level1
        notes.append(f"gamma_minus coincides with gamma_plus^{root.ell} modulo inner automorphisms")

    if G.tree_reverser is None:
        tree = level2
    else:
        B, shape = G.tree_reverser
        action = _lattice_action(G, B)
        if B != G.case_witness:
            notes.append(f"xi acts through the involutive reverser {B} = B0 M0")
            logger.warning(f"reverser {G.case_witness} of {theta} squares to -I, using {B} for xi")
        if shape == "involution":
            action += (("gamma_plus", _xi_gamma_image(G, B, out=True)),)
            if root.eps == 1:
                action += (("gamma_minus", word(("gamma_minus", 1))),)
            tree = SemidirectProduct(level2, Cyclic(2, "xi"), action)
        elif root.eps == 1:
            action += (("gamma_plus", word(("gamma_plus", -1))),)
            tree = SemidirectProduct(level1, Cyclic(4, "xi"), action)
            notes.append(
                "the extension by xi is cyclic of order 4 with xi^2 = gamma_minus; "
                "the induced Z_2 action reads here as conjugation by xi"
            )
        else:
            action += (("gamma_plus", word(("gamma_plus", -1))),)
            tree = CyclicExtension(level1, "xi", 2, action, word(("gamma_plus", root.ell)))

    pres = presentation(tree)
    pres.notes.extend(notes)
    order = tree.size()
    expected = G.h.order * 2 * root.ell * (2 if G.reverser.exists else 1)
    if order != expected:
        raise VerificationError(f"Out(E) tree order {order} != |H| 2 ell (2) = {expected} for {theta}")
    return OutStructure(tree, pres, order, G.case, notes)


def _aut_ops(G: TorusBundleGroup):
    return compose, invert, identity_automorphism(G.words_group)


def verify_aut_relators(G: TorusBundleGroup) -> PresentationReport:
    """Every relator of the Aut(E) tree holds exactly as an automorphism identity."""
    mul_, inv_, one = _aut_ops(G)
    return check_relators(presentation(aut_structure(G)), G.tree_generators(), mul_, inv_, one, is_identity)


def verify_out_relators(G: TorusBundleGroup, out: Optional[OutStructure] = None) -> PresentationReport:
    """Every relator of the Out(E) presentation evaluates to an inner automorphism."""
    out = out or out_structure(G)
    mul_, inv_, one = _aut_ops(G)
    return check_relators(
        out.presentation, G.tree_generators(), mul_, inv_, one,
        lambda phi: equal_mod_inner(phi, one) is not None,
    )
