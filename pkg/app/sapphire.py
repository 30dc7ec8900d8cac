"""
SolAut Sapphire Module
Automorphisms of sapphire groups

    E = < d, b, v, a | db = bd, v (d, b) v^-1 = theta (d, b), a^2 = d,
          ab = b^-1 a, ava^-1 = d^(r-ru-st) b^(s-2su) v^-1 >

for a gluing matrix B = (r, s; t, u) with det B = 1 and rstu != 0. The
index-two subgroup <d, b, v> is the torus bundle with monodromy
theta = (ru+st, -2rt; -2su, ru+st).

Aut_0^k(E) is the set of automorphisms with phi(v) = w v and
phi(a) = d^m b^n v^k a. Every automorphism factors uniquely as

    alpha^n beta^c rho^e omega^j zeta^f

where omega generates the grading (k = 1 when Aut_0^1(E) is nonempty,
k = 2 otherwise).
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Hashable, List, Optional, Tuple

from .errors import (
    DegenerateInput,
    DetMinusOne,
    NotInvertible,
    NotSol,
    NotUnimodular,
    TorusBundleDegenerate,
    VerificationError,
)
from .gl2z import PrimitiveRootData, is_anosov, primitive_root, sqrt_matrices
from .intmat import (
    IDENTITY,
    REFLECTION,
    Mat2,
    Vec2,
    det,
    mod2,
    mul,
    power,
    solve_system,
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
    Word,
    check_relators,
    evaluate_word,
    format_word,
    presentation,
    word,
)
from .words import (
    GroupAutomorphism,
    SapGroup,
    automorphism_power,
    compose,
    equal_mod_inner,
    evaluate,
    identity_automorphism,
    inner,
    invert,
    is_identity,
    same_map,
    sap_automorphism,
    sapphire_theta,
)

logger = logging.getLogger(__name__)


@dataclass
class SapphireGroup:
    B: Mat2
    theta: Mat2
    root: PrimitiveRootData

    @property
    def entries(self) -> Tuple[int, int, int, int]:
        return self.B.entries()

    @property
    def words_group(self) -> SapGroup:
        return SapGroup(self.B)

    @property
    def equal_diagonal(self) -> bool:
        return self.B.a == self.B.d

    @property
    def opposite_diagonal(self) -> bool:
        return self.B.d == -self.B.a

    @cached_property
    def aut01(self) -> "Aut01Certificate":
        return aut01_nonempty(self)

    @property
    def omega_grade(self) -> int:
        return 1 if self.aut01.nonempty else 2

    @property
    def case(self) -> str:
        if not self.aut01.nonempty:
            return "I"
        return "II" if self.root.eps == 1 else "III"

    @property
    def generic_shape(self) -> bool:
        """Aut_0^1(E) is nonempty although B has neither diagonal shape with a closed-form omega."""
        return self.aut01.nonempty and not (self.equal_diagonal or self.opposite_diagonal)

    @cached_property
    def named(self) -> Dict[str, GroupAutomorphism]:
        return named_automorphisms(self)

    # ----- brute-force protocol -----

    def out_seeds(self) -> Dict[str, GroupAutomorphism]:
        return dict(self.named)

    def out_key(self, phi: GroupAutomorphism) -> Hashable:
        # theta and J are both congruent to I mod 2; the a-grade changes by +-k and even amounts
        return mod2(phi.restriction).entries(), phi.a_grade % 2

    def out_candidates(self) -> List[GroupAutomorphism]:
        """
        Automorphisms solved directly from the relators, one per restriction,
        v-sign and a-grade, plus the translation kernel of each system.
        Built without the named generators.

        Conjugation by v moves the a-grade by 2 and the restriction by theta,
        conjugation by a flips the v-sign, so grades -1..1 and restrictions
        +-M0^j J^i with |j| <= ell0 meet every class.
        """
        E = self.words_group
        M0, ell0 = self.root.M0, self.root.ell
        out: List[GroupAutomorphism] = []
        for sigma, base in ((1, IDENTITY), (-1, REFLECTION)):
            for j in range(-ell0, ell0 + 1):
                for sign in (1, -1):
                    N = mul(power(M0, j), base) * sign
                    for k in (-1, 0, 1):
                        problem = extension_problem(self, k, N, sigma)
                        if not problem.solvable:
                            continue
                        points = [problem.solution]
                        points += [[x + y for x, y in zip(problem.solution, v)] for v in problem.kernel]
                        for z in points:
                            images = _trial_images(E, N, k, tuple(z), sigma)
                            label = f"({N},{sigma},k={k},{tuple(z)})"
                            try:
                                out.append(sap_automorphism(E, N, images["v"], images["a"], label))
                            except (NotInvertible, VerificationError):
                                logger.debug(f"candidate {label} for B={self.B} is not an automorphism")
        return out

    def to_dict(self) -> dict:
        return {
            "B": str(self.B),
            "theta": str(self.theta),
            "root": self.root.to_dict(),
            "aut01": self.aut01.to_dict(),
            "case": self.case,
            "generic_shape": self.generic_shape,
        }


def build(B: Mat2) -> SapphireGroup:
    d = det(B)
    if d == -1:
        raise DetMinusOne(
            f"{B} has determinant -1; normalize the gluing to det 1 first",
            {"matrix": str(B)},
        )
    if d != 1:
        raise NotUnimodular(f"{B} has determinant {d}", {"matrix": str(B), "det": d})
    r, s, t, u = B.entries()
    if r * s * t * u == 0:
        raise TorusBundleDegenerate(f"{B} has a zero entry; the quotient is a torus bundle", {"matrix": str(B)})
    theta = sapphire_theta(B)
    if not is_anosov(theta):
        raise NotSol(f"gluing monodromy {theta} of {B} is not Anosov", {"matrix": str(B), "theta": str(theta)})
    G = SapphireGroup(B=B, theta=theta, root=primitive_root(theta))
    logger.info(f"built sapphire group for B={B}: theta={theta} M0={G.root.M0} ell0={G.root.ell} eps={G.root.eps}")
    return G


def fundamental_condition(G: SapphireGroup, k: int, ell: int) -> bool:
    """2 ell = k ell0 and eps^k det(M0)^ell = 1."""
    if 2 * ell != k * G.root.ell:
        return False
    sign = G.root.eps ** (k % 2)
    if ell % 2:
        sign *= det(G.root.M0)
    return sign == 1


# ----- Aut_0^0 -----

def xi_family(G: SapphireGroup, n: int, c: int, name: str = "") -> GroupAutomorphism:
    """Aut_0^0 member a -> b^n a, v -> d^(nrt+ct) b^(-nst-cu) v on the identity lattice map."""
    r, s, t, u = G.entries
    E = G.words_group
    v_image = E.make(Vec2(n * r * t + c * t, -n * s * t - c * u), 1)
    a_image = E.make(Vec2(0, n), 0, 1)
    return sap_automorphism(E, IDENTITY, v_image, a_image, name or f"xi({n},{c})")


@dataclass(frozen=True)
class Aut00Family:
    """The lattice-fixing part of Aut_0^0(E), parametrized by (n, c)."""
    B: Mat2

    def member(self, G: SapphireGroup, n: int, c: int) -> GroupAutomorphism:
        return xi_family(G, n, c)

    def canonical(self, G: SapphireGroup) -> GroupAutomorphism:
        return identity_automorphism(G.words_group)

    def to_dict(self) -> dict:
        r, s, t, u = self.B.entries()
        return {
            "a": "b^n a",
            "v": f"d^({r * t}n + {t}c) b^({-s * t}n + {-u}c) v",
            "parameters": ["n", "c"],
            "canonical": {"n": "0", "c": "0"},
        }


def rho(G: SapphireGroup) -> GroupAutomorphism:
    r, s, t, u = G.entries
    E = G.words_group
    return sap_automorphism(
        E, -IDENTITY, E.make(Vec2(r * (u - 1), s * (1 - u)), 1), E.make(Vec2(-1, 0), 0, 1), "rho",
    )


def zeta_family(G: SapphireGroup, lam: int, name: str = "") -> GroupAutomorphism:
    """v -> d^(r-(ru+st)+lam t) b^((s-2su)+lam u) v^-1 on the reflection lattice map, a fixed."""
    r, s, t, u = G.entries
    E = G.words_group
    P = r * u + s * t
    v_image = E.make(Vec2(r - P + lam * t, s - 2 * s * u + lam * u), -1)
    return sap_automorphism(E, REFLECTION, v_image, E.generator("a"), name or f"zeta[{lam}]")


def zeta(G: SapphireGroup) -> GroupAutomorphism:
    return zeta_family(G, G.entries[1], "zeta")


# ----- Extension problems -----

@dataclass
class ExtensionProblem:
    """Unknowns (p, q, m, n) with phi(v) = d^p b^q v and phi(a) = d^m b^n v^k a."""
    k: int
    delta: int
    ell: int
    N: Mat2
    coefficients: List[List[int]] = field(default_factory=list)
    rhs: List[int] = field(default_factory=list)
    solution: Optional[List[int]] = None
    kernel: List[List[int]] = field(default_factory=list)
    reason: str = ""

    @property
    def solvable(self) -> bool:
        return self.solution is not None

    def to_dict(self) -> dict:
        data = {
            "k": str(self.k),
            "delta": str(self.delta),
            "ell": str(self.ell),
            "N": str(self.N),
            "coefficients": [[str(x) for x in row] for row in self.coefficients],
            "rhs": [str(x) for x in self.rhs],
            "solvable": self.solvable,
        }
        if self.solution is not None:
            data["solution"] = dict(zip(("p", "q", "m", "n"), (str(x) for x in self.solution)))
        if self.reason:
            data["reason"] = self.reason
        return data


def _trial_images(E: SapGroup, N: Mat2, k: int, z: Tuple[int, int, int, int], sigma: int = 1):
    p, q, m, n = z
    return {
        "d": E.lattice(N.column(0)),
        "b": E.lattice(N.column(1)),
        "v": E.make(Vec2(p, q), sigma),
        "a": E.make(Vec2(m, n), k, 1),
    }


def extension_problem(G: SapphireGroup, k: int, N: Optional[Mat2] = None, sigma: int = 1) -> ExtensionProblem:
    """
    Linear system on (p, q, m, n) for the delta = +1 extension of grade k.
    An explicit restriction N skips the power and sign conditions on M0;
    sigma = -1 asks for phi(v) = d^p b^q v^-1 and needs an explicit N.

    With the exponents of v and a fixed, the lattice part of every relator
    evaluated on the trial images is affine in the unknowns, so four
    unit evaluations determine it.
    """
    if N is not None:
        problem = ExtensionProblem(k, 1, 0, N)
    elif sigma != 1:
        raise DegenerateInput("sigma = -1 needs an explicit restriction")
    elif (k * G.root.ell) % 2:
        return ExtensionProblem(k, 1, 0, IDENTITY, reason=f"k ell0 = {k * G.root.ell} is odd")
    else:
        ell = k * G.root.ell // 2
        problem = ExtensionProblem(k, 1, ell, power(G.root.M0, ell))
        if not fundamental_condition(G, k, ell):
            problem.reason = "eps^k det(M0)^ell != 1"
            return problem
    N = problem.N

    E = G.words_group
    relators = E.relators()

    def residuals(z):
        images = _trial_images(E, N, k, z, sigma)
        return [evaluate(E, rel.word, images) for rel in relators]

    base = residuals((0, 0, 0, 0))
    for rel, g in zip(relators, base):
        if g.k or g.e:
            problem.reason = f"relator {rel.name} leaves v^{g.k} a^{g.e}"
            return problem
    units = [residuals(tuple(int(i == j) for j in range(4))) for i in range(4)]
    rows, rhs = [], []
    for idx in range(len(relators)):
        for coord in ("x", "y"):
            rows.append([getattr(units[i][idx], coord) - getattr(base[idx], coord) for i in range(4)])
            rhs.append(-getattr(base[idx], coord))
    problem.coefficients, problem.rhs = rows, rhs
    sol = solve_system(rows, rhs)
    if sol is None:
        problem.reason = "no integer solution"
        return problem
    problem.solution = sol.point([])
    problem.kernel = sol.kernel
    return problem


def solve_extension(G: SapphireGroup, k: int, delta: int = 1) -> Optional[GroupAutomorphism]:
    """A verified automorphism in Aut_0^k(E) with restriction delta M0^(k ell0 / 2), or None."""
    if k == 0:
        base = identity_automorphism(G.words_group)
    else:
        problem = extension_problem(G, k)
        if not problem.solvable:
            logger.debug(f"no grade {k} extension for B={G.B}: {problem.reason}")
            return None
        images = _trial_images(G.words_group, problem.N, k, tuple(problem.solution))
        base = sap_automorphism(G.words_group, problem.N, images["v"], images["a"], f"phi[k={k}]")
    if delta == -1:
        return compose(base, rho(G), f"phi[k={k},delta=-1]")
    return base


@dataclass
class Aut01Certificate:
    nonempty: bool
    filter_passed: bool
    certificate: Optional[GroupAutomorphism] = None
    reason: str = ""

    def to_dict(self) -> dict:
        data = {"nonempty": self.nonempty, "filter_passed": self.filter_passed, "reason": self.reason}
        if self.certificate is not None:
            data["certificate"] = self.certificate.to_dict()
        return data


def aut01_nonempty(G: SapphireGroup) -> Aut01Certificate:
    """Square-root filter first (a negative answer is final), then the exact solver."""
    roots = sqrt_matrices(G.theta) + sqrt_matrices(-G.theta)
    if not roots:
        return Aut01Certificate(False, False, reason="neither theta nor -theta has a square root")
    if G.root.ell % 2 or not fundamental_condition(G, 1, G.root.ell // 2):
        return Aut01Certificate(False, False, reason="square root of the wrong determinant sign")
    phi = solve_extension(G, 1, 1)
    if phi is None:
        return Aut01Certificate(False, True, reason="extension system has no integer solution")
    return Aut01Certificate(True, True, phi, reason="extension system solved")


# ----- Named automorphisms -----

def _closed_form_omega(G: SapphireGroup, nonempty: bool) -> Optional[GroupAutomorphism]:
    r, s, t, u = G.entries
    E = G.words_group
    P = r * u + s * t
    if not nonempty:
        N = G.theta
        v_image = E.make(Vec2(4 * r * s * t, 2 * s - 4 * r * s * u), 1)
        a_image = E.make(Vec2(P - r, s - 2 * s * u), 2, 1)
    elif G.equal_diagonal:
        N = Mat2(r, -t, -s, r)
        v_image = E.make(Vec2(r * r - r + s * t, -s * (2 * r - 1)), 1)
        a_image = E.make(Vec2(0, 0), 1, 1)
    elif G.opposite_diagonal:
        N = Mat2(r, t, -s, r)
        v_image = E.make(Vec2(-r, s), 1)
        a_image = E.make(Vec2(0, 0), 1, 1)
    else:
        return None
    try:
        return sap_automorphism(E, N, v_image, a_image, "omega")
    except VerificationError as e:
        logger.warning(f"closed-form omega rejected for B={G.B}: {e}")
        return None


def named_automorphisms(G: SapphireGroup) -> Dict[str, GroupAutomorphism]:
    nonempty = G.aut01.nonempty
    omega = _closed_form_omega(G, nonempty)
    if omega is None:
        omega = solve_extension(G, G.omega_grade, 1)
        if omega is None:
            raise VerificationError(f"no grade {G.omega_grade} automorphism found for B={G.B}")
        omega = omega.with_name("omega")
    return {
        "alpha": xi_family(G, 1, 0, "alpha"),
        "beta": xi_family(G, 0, 1, "beta"),
        "rho": rho(G),
        "omega": omega,
        "zeta": zeta(G),
    }


# ----- Normal form -----

@dataclass(frozen=True)
class Decomposition:
    """phi = alpha^n beta^c rho^e omega^j zeta^f"""
    n: int
    c: int
    e: int
    j: int
    f: int

    def word(self) -> Word:
        return word(("alpha", self.n), ("beta", self.c), ("rho", self.e), ("omega", self.j), ("zeta", self.f))

    def __str__(self) -> str:
        return format_word(self.word())


def decompose(G: SapphireGroup, phi: GroupAutomorphism) -> Decomposition:
    named = G.named
    X = compose(phi, named["zeta"]) if phi.sigma == -1 else phi
    f = 1 if phi.sigma == -1 else 0
    grade = X.a_grade
    if grade % G.omega_grade:
        raise VerificationError(f"{phi.name} has a-grade {grade}, not a multiple of {G.omega_grade}")
    j = grade // G.omega_grade
    Y = compose(X, automorphism_power(named["omega"], -j)) if j else X
    if Y.restriction == IDENTITY:
        e, Z = 0, Y
    elif Y.restriction == -IDENTITY:
        e, Z = 1, compose(Y, named["rho"])
    else:
        raise VerificationError(f"{phi.name} leaves lattice part {Y.restriction} after removing omega^{j}")

    r, s, t, u = G.entries
    za = Z.image("a")
    if za.x != 0 or za.k != 0:
        raise VerificationError(f"{phi.name} reduces to a non-standard a-image {za}")
    n = za.y
    x = Z.image("v").x - n * r * t
    if x % t:
        raise VerificationError(f"{phi.name} reduces to a v-image off the (n, c) family")
    result = Decomposition(n, x // t, e, j, f)
    if not same_map(evaluate_tree_word(G, result.word()), phi):
        raise VerificationError(f"normal form {result} does not recompose {phi.name}")
    return result


def evaluate_tree_word(G: SapphireGroup, w: Word) -> GroupAutomorphism:
    return evaluate_word(w, G.named, compose, invert, identity_automorphism(G.words_group))


# ----- Conjugation identities -----

@dataclass
class OmegaRhoCheck:
    candidates: Dict[str, str]
    verified: Optional[str]

    def to_dict(self) -> dict:
        return {"candidates": self.candidates, "verified": self.verified}


def omega_rho_identity(G: SapphireGroup) -> Optional[OmegaRhoCheck]:
    """
    Two candidate forms of omega rho omega^-1 for the equal-diagonal family
    differ by a sign; both are evaluated and the one that holds is reported.
    """
    if not (G.aut01.nonempty and G.equal_diagonal):
        return None
    R, S, _, _ = G.entries
    candidates = {
        "minus": word(("alpha", S), ("beta", S * (R + 1)), ("rho", 1)),
        "plus": word(("alpha", -S), ("beta", -S * (R + 1)), ("rho", 1)),
    }
    omega = G.named["omega"]
    actual = compose(compose(omega, G.named["rho"]), invert(omega))
    verified = None
    for key, w in candidates.items():
        if same_map(actual, evaluate_tree_word(G, w)):
            verified = key
    if verified != "minus":
        logger.info(f"omega rho omega^-1 for B={G.B} matches the '{verified}' form")
    return OmegaRhoCheck({k: format_word(w) for k, w in candidates.items()}, verified)


def kappa_identities(G: SapphireGroup) -> Dict[str, Decomposition]:
    """Inner automorphisms by the generators written in the normal form."""
    E = G.words_group
    return {name: decompose(G, inner(E, E.generator(name))) for name in E.generator_names}


# ----- Structure -----

def _conjugation_action(G: SapphireGroup, actor: str, targets: Tuple[str, ...], reduce=None):
    named = G.named
    a = named[actor]
    a_inv = invert(a)
    action = []
    for x in targets:
        dec = decompose(G, compose(compose(a, named[x]), a_inv))
        action.append((x, reduce(dec) if reduce else dec.word()))
    return tuple(action)


def aut_structure(G: SapphireGroup) -> StructureTree:
    aut00 = SemidirectProduct(Lattice(), Cyclic(2, "rho"), _conjugation_action(G, "rho", ("alpha", "beta")))
    aut0 = SemidirectProduct(aut00, IntegersZ("omega"), _conjugation_action(G, "omega", ("alpha", "beta", "rho")))
    return SemidirectProduct(aut0, Cyclic(2, "zeta"), _conjugation_action(G, "zeta", ("alpha", "beta", "rho", "omega")))


@dataclass
class SapphireOutStructure:
    tree: StructureTree
    presentation: Presentation
    order: int
    case: str
    generic_shape: bool
    omega_grade: int
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "case": self.case,
            "generic_shape": self.generic_shape,
            "omega_grade": str(self.omega_grade),
            "shape": self.tree.shape(),
            "tree": self.tree.to_dict(),
            "presentation": self.presentation.to_dict(),
            "order": str(self.order),
            "notes": self.notes,
        }


def out_structure(G: SapphireGroup) -> SapphireOutStructure:
    s = G.entries[1]
    beta_order = 2 * abs(s)

    def reduce(dec: Decomposition) -> Word:
        if dec.j or dec.f:
            raise VerificationError(f"{dec} leaves the lattice-rho part")
        return word(("alpha", dec.n % 2), ("beta", dec.c % beta_order), ("rho", dec.e))

    kappas = kappa_identities(G)
    notes = [f"kappa_{g} = {dec}" for g, dec in kappas.items()]

    H = FiniteQuotient(((2, 0), (0, -2 * s)))
    level = SemidirectProduct(H, Cyclic(2, "rho"), _conjugation_action(G, "rho", ("alpha", "beta"), reduce))
    if G.aut01.nonempty:
        action = _conjugation_action(G, "omega", ("alpha", "beta", "rho"), reduce)
        E = G.words_group
        omega_sq = automorphism_power(G.named["omega"], 2)
        lift = reduce(decompose(G, compose(omega_sq, invert(inner(E, E.generator("v"))))))
        if lift:
            tree = CyclicExtension(level, "omega", 2, action, lift)
        else:
            tree = SemidirectProduct(level, Cyclic(2, "omega"), action)
        check = omega_rho_identity(G)
        if check is not None:
            notes.append(f"omega rho omega^-1: verified form '{check.verified}'")
    else:
        tree = level
        notes.append("omega and zeta are congruent to lattice automorphisms modulo inner automorphisms")
    if G.generic_shape:
        logger.warning(f"B={G.B} has neither diagonal shape, omega from the extension solver")
        notes.append("B has neither diagonal shape; omega comes from the extension solver")

    pres = presentation(tree)
    pres.notes.extend(notes)
    order = tree.size()
    expected = 8 * abs(s) * (2 if G.aut01.nonempty else 1)
    if order != expected:
        raise VerificationError(f"Out(E) tree order {order} != {expected} for B={G.B}")
    logger.info(f"Out(E) for B={G.B}: case {G.case}, order {order}")
    return SapphireOutStructure(tree, pres, order, G.case, G.generic_shape, G.omega_grade, notes)


def _aut_ops(G: SapphireGroup):
    return compose, invert, identity_automorphism(G.words_group)


def verify_aut_relators(G: SapphireGroup) -> PresentationReport:
    mul_, inv_, one = _aut_ops(G)
    return check_relators(presentation(aut_structure(G)), G.named, mul_, inv_, one, is_identity)


def verify_out_relators(G: SapphireGroup, out: Optional[SapphireOutStructure] = None) -> PresentationReport:
    out = out or out_structure(G)
    mul_, inv_, one = _aut_ops(G)
    return check_relators(
        out.presentation, G.named, mul_, inv_, one,
        lambda phi: equal_mod_inner(phi, one) is not None,
    )
