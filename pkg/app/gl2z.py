"""
SolAut GL2(Z) Module
Anosov classification, centralizers and primitive roots, reversers,
square roots, conjugacy and the three reverser families.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

from sympy import integer_nthroot

from .config import get_settings
from .errors import (
    DegenerateInput,
    NoReverser,
    NotAnosov,
    NotAReverser,
    NotUnimodular,
    RootSearchExhausted,
    VerificationError,
)
from .forms import BinaryForm, primitive_representation, proper_equivalence
from .intmat import (
    IDENTITY,
    REFLECTION,
    Mat2,
    content,
    det,
    inverse,
    mod2,
    mul,
    power,
    smith_decomposition,
    trace,
)

logger = logging.getLogger(__name__)


class ExceptionalKind(str, Enum):
    IDENTITY = "identity"
    MINUS_IDENTITY = "minus_identity"
    ORDER4 = "order4"
    ORDER6 = "order6"
    ORDER3 = "order3"
    PARABOLIC_PLUS = "parabolic_plus"
    PARABOLIC_MINUS = "parabolic_minus"
    REFLECTION = "reflection"
    GLIDE = "glide"


class Family(str, Enum):
    F1 = "F1"  # reverser conjugate to the rotation (0,-1;1,0)
    F2 = "F2"  # reverser conjugate to diag(1,-1)
    F3 = "F3"  # reverser conjugate to (1,1;0,-1)


@dataclass(frozen=True)
class MatrixClass:
    anosov: bool
    kind: Optional[ExceptionalKind] = None
    parameter: Optional[int] = None
    representative: Optional[Mat2] = None

    @property
    def tag(self) -> str:
        return "Anosov" if self.anosov else "Exceptional"

    def to_dict(self) -> dict:
        data = {"tag": self.tag}
        if not self.anosov:
            data["subtag"] = self.kind.value
            if self.parameter is not None:
                data["parameter"] = self.parameter
            data["representative"] = str(self.representative)
        return data


@dataclass(frozen=True)
class PrimitiveRootData:
    """A = eps * M0^ell with M0 generating the infinite part of C(A)."""
    M0: Mat2
    ell: int
    eps: int

    def to_dict(self) -> dict:
        return {"M0": str(self.M0), "ell": self.ell, "eps": self.eps}


@dataclass(frozen=True)
class ReverserData:
    exists: bool
    witness: Optional[Mat2] = None
    families: Tuple[Family, ...] = ()
    square_sign: Optional[int] = None
    family_witnesses: Dict[Family, Mat2] = field(default_factory=dict, compare=False, hash=False)

    def to_dict(self) -> dict:
        data = {"exists": self.exists}
        if self.exists:
            data["witness"] = str(self.witness)
            data["square_sign"] = self.square_sign
            data["families"] = [f.value for f in self.families]
            data["family_witnesses"] = {f.value: str(m) for f, m in sorted(self.family_witnesses.items())}
        return data


def _require_unimodular(A: Mat2) -> int:
    d = det(A)
    if d not in (1, -1):
        raise NotUnimodular(f"{A} has determinant {d}", {"matrix": str(A), "det": d})
    return d


# ----- Classification -----

def is_anosov(A: Mat2) -> bool:
    d, t = det(A), trace(A)
    if d == 1:
        return abs(t) > 2
    if d == -1:
        return t != 0
    return False


def classify(A: Mat2) -> MatrixClass:
    """Anosov verdict, or the exceptional conjugacy representative A belongs to."""
    d = _require_unimodular(A)
    t = trace(A)
    if is_anosov(A):
        return MatrixClass(anosov=True)

    if d == -1:
        if mod2(A) == IDENTITY:
            return MatrixClass(False, ExceptionalKind.REFLECTION, representative=REFLECTION)
        return MatrixClass(False, ExceptionalKind.GLIDE, representative=Mat2(0, 1, 1, 0))

    if t == 0:
        return MatrixClass(False, ExceptionalKind.ORDER4, representative=Mat2(0, -1, 1, 0))
    if t == 1:
        return MatrixClass(False, ExceptionalKind.ORDER6, representative=Mat2(1, -1, 1, 0))
    if t == -1:
        return MatrixClass(False, ExceptionalKind.ORDER3, representative=Mat2(0, -1, 1, -1))
    if t == 2:
        n = content(*(A - IDENTITY).entries())
        if n == 0:
            return MatrixClass(False, ExceptionalKind.IDENTITY, 0, IDENTITY)
        return MatrixClass(False, ExceptionalKind.PARABOLIC_PLUS, n, Mat2(1, n, 0, 1))
    n = content(*(A + IDENTITY).entries())
    if n == 0:
        return MatrixClass(False, ExceptionalKind.MINUS_IDENTITY, 0, -IDENTITY)
    return MatrixClass(False, ExceptionalKind.PARABOLIC_MINUS, n, Mat2(-1, n, 0, -1))


def require_anosov(A: Mat2) -> None:
    _require_unimodular(A)
    if not is_anosov(A):
        raise NotAnosov(f"{A} is not Anosov", {"matrix": str(A)})


# ----- Centralizers and primitive roots -----

def power_log(base: Mat2, X: Mat2, signs: Tuple[int, ...] = (1, -1)) -> Optional[Tuple[int, int]]:
    """
    (sign, j) with X = sign * base^j for an Anosov base, or None.

    Traces of base^j grow in absolute value once |j| >= 1, so the walk
    stops as soon as they pass |tr X|.
    """
    if det(X) not in (1, -1):
        return None
    bound = abs(trace(X)) + 2
    for direction in (base, inverse(base)):
        P = IDENTITY
        j = 0
        while True:
            for sign in signs:
                if P * sign == X:
                    return sign, (j if direction is base else -j)
            j += 1
            P = mul(P, direction)
            if j >= 2 and abs(trace(P)) > bound:
                break
    return None


def centralizer_generator(A: Mat2) -> Mat2:
    """A' = (A - a11 I) / g, so that the integral centralizer lattice is Z I + Z A'."""
    g = content(A.b, A.c, A.a - A.d)
    if g == 0:
        raise DegenerateInput(f"{A} is scalar")
    return Mat2(0, A.b // g, A.c // g, (A.d - A.a) // g)


def _units_at(beta: int, t: int, d: int) -> List[Tuple[int, int]]:
    """All (alpha, beta) with det(alpha I + beta A') = +-1, where tr A' = t, det A' = d."""
    disc_base = beta * beta * (t * t - 4 * d)
    found = []
    for target in (1, -1):
        disc = disc_base + 4 * target
        if disc < 0:
            continue
        w, exact = integer_nthroot(disc, 2)
        if not exact:
            continue
        for root in {w, -w}:
            num = -beta * t + root
            if num % 2 == 0:
                found.append((num // 2, beta))
    return found


def primitive_root(A: Mat2) -> PrimitiveRootData:
    """
    Generator M0 of C(A)/{+-I} with A = eps * M0^ell, ell > 0 and tr M0 > 0.

    Units of the lattice Z I + Z A' are scanned by increasing positive
    coefficient of A'; the first coefficient carrying a unit belongs to
    +-M0^{+-1}, and minimal |trace| picks a root among those units.
    """
    require_anosov(A)
    Ap = centralizer_generator(A)
    t, d = trace(Ap), det(Ap)
    cap = get_settings().max_beta

    beta = 0
    units: List[Tuple[int, int]] = []
    while not units:
        beta += 1
        if beta > cap:
            raise RootSearchExhausted(
                f"no unit in the centralizer of {A} with coefficient <= {cap}",
                {"matrix": str(A), "max_beta": cap},
            )
        units = _units_at(beta, t, d)

    candidates = sorted(
        (Mat2.scalar(alpha) + Ap * b for alpha, b in units),
        key=lambda X: (abs(trace(X)), X.entries()),
    )
    X = candidates[0]
    logger.debug(f"centralizer unit {X} found at coefficient {beta} for {A}")

    found = power_log(X, A)
    if found is None:
        raise VerificationError(f"{A} is not a power of its centralizer unit {X}")
    eps, ell = found
    if ell < 0:
        X, ell = inverse(X), -ell
    if trace(X) < 0:
        X = -X
        eps = eps * (-1) ** ell
    if power(X, ell) * eps != A:
        raise VerificationError(f"primitive root {X}^{ell} does not reproduce {A}")
    return PrimitiveRootData(M0=X, ell=ell, eps=eps)


def centralizer_contains(A: Mat2, X: Mat2) -> bool:
    """Membership of X in C(A); the commutation test and the +-M0^j test must agree."""
    require_anosov(A)
    if det(X) not in (1, -1):
        return False
    commutes = mul(X, A) == mul(A, X)
    root = primitive_root(A)
    in_powers = power_log(root.M0, X) is not None
    if commutes != in_powers:
        raise VerificationError(f"centralizer tests disagree for {A} and {X}")
    return commutes


# ----- Reversers -----

def _vec_to_mat(v: List[int]) -> Mat2:
    return Mat2(v[0], v[1], v[2], v[3])


def reverser_lattice(A: Mat2) -> List[Mat2]:
    """Z-basis of {B in M2(Z) : B A = A^-1 B}."""
    Ai = inverse(A)
    units = [Mat2(1, 0, 0, 0), Mat2(0, 1, 0, 0), Mat2(0, 0, 1, 0), Mat2(0, 0, 0, 1)]
    images = [(mul(E, A) - mul(Ai, E)).entries() for E in units]
    system = [[images[j][i] for j in range(4)] for i in range(4)]
    snf = smith_decomposition(system)
    return [_vec_to_mat([snf.V[i][k] for i in range(4)]) for k in range(snf.rank, 4)]


def _det_form(B1: Mat2, B2: Mat2) -> BinaryForm:
    """q(x, y) = det(x B1 + y B2)."""
    middle = B1.a * B2.d + B1.d * B2.a - B1.b * B2.c - B1.c * B2.b
    return BinaryForm(det(B1), middle, det(B2))


def is_reverser(A: Mat2, B: Mat2) -> bool:
    return det(B) in (1, -1) and mul(mul(B, A), inverse(B)) == inverse(A)


def _reverser_key(B: Mat2) -> tuple:
    """Smallest entries first, then det +1, then a positive leading entry."""
    return (max(abs(e) for e in B.entries()), 0 if det(B) == 1 else 1, -B.a, B.b, B.c, B.d)


def _reverser_window(B0: Mat2, M0: Mat2, span: int) -> List[Mat2]:
    out = []
    for j in range(-span, span + 1):
        P = mul(B0, power(M0, j))
        out.extend((P, -P))
    return out


def _find_any_reverser(A: Mat2) -> Optional[Mat2]:
    if det(A) != 1:
        return None
    basis = reverser_lattice(A)
    if len(basis) != 2:
        raise VerificationError(f"reverser lattice of {A} has rank {len(basis)}, expected 2")
    B1, B2 = basis
    q = _det_form(B1, B2)
    if q.content != 1:
        logger.debug(f"determinant form {q} of {A} is imprimitive, no reverser")
        return None
    hit = primitive_representation(q, (1, -1))
    if hit is None:
        return None
    v, _ = hit
    return B1 * v.x + B2 * v.y


def find_reverser(A: Mat2) -> ReverserData:
    """Decide R(A) != {} through the determinant form of the reverser lattice."""
    require_anosov(A)
    B = _find_any_reverser(A)
    if B is None:
        return ReverserData(exists=False)
    if not is_reverser(A, B):
        raise VerificationError(f"reverser candidate {B} fails B A B^-1 = A^-1 for {A}")

    root = primitive_root(A)
    window = [P for P in _reverser_window(B, root.M0, 6) if is_reverser(A, P)]
    witness = min(window, key=_reverser_key)
    square = mul(witness, witness)
    if square not in (IDENTITY, -IDENTITY) or witness == -IDENTITY:
        raise VerificationError(f"reverser {witness} squares to {square}")
    families, family_witnesses = _families_from(witness, root.M0)
    return ReverserData(
        exists=True,
        witness=witness,
        families=families,
        square_sign=square.a,
        family_witnesses=family_witnesses,
    )


def reverser_family(B: Mat2) -> Family:
    if det(B) == 1:
        return Family.F1
    return Family.F2 if mod2(B) == IDENTITY else Family.F3


def _families_from(B0: Mat2, M0: Mat2) -> Tuple[Tuple[Family, ...], Dict[Family, Mat2]]:
    # det and the mod-2 class of B0 M0^j are periodic in j with period dividing 6
    witnesses: Dict[Family, Mat2] = {}
    for j in range(6):
        for sign in (1, -1):
            B = mul(B0, power(M0, j)) * sign
            fam = reverser_family(B)
            current = witnesses.get(fam)
            if current is None or _reverser_key(B) < _reverser_key(current):
                witnesses[fam] = B
    families = tuple(sorted(witnesses, key=lambda f: f.value))
    return families, witnesses


def family_membership(A: Mat2) -> Tuple[Family, ...]:
    data = find_reverser(A)
    if not data.exists:
        raise NoReverser(f"{A} admits no reverser", {"matrix": str(A)})
    return data.families


# ----- Square roots -----

def sqrt_matrices(A: Mat2) -> List[Mat2]:
    """
    Every X in M2(Z) with X^2 = A.

    By Cayley-Hamilton X^2 = tX - dI with t = tr X and d = det X, so
    X = (A + dI) / t where d^2 = det A and t^2 = tr A + 2d.
    """
    if A in (IDENTITY, -IDENTITY):
        raise DegenerateInput(f"{A} is scalar; square roots are not isolated", {"matrix": str(A)})
    dA = _require_unimodular(A)
    if dA < 0:
        return []
    delta, exact = integer_nthroot(dA, 2)
    if not exact:
        return []
    roots = set()
    for d in {delta, -delta}:
        t2 = trace(A) + 2 * d
        if t2 <= 0:
            continue
        t, exact = integer_nthroot(t2, 2)
        if not exact:
            continue
        S = A + Mat2.scalar(d)
        if any(e % t for e in S.entries()):
            continue
        for sign in (1, -1):
            X = Mat2(*(sign * e // t for e in S.entries()))
            if mul(X, X) == A:
                roots.add(X)
    return sorted(roots, key=lambda X: X.entries())


# ----- Conjugacy -----

def commutator_form(A: Mat2) -> BinaryForm:
    """f_A(v) = omega(v, A v) = c x^2 + (d - a) x y - b y^2."""
    return BinaryForm(A.c, A.d - A.a, -A.b)


def conjugacy_test(A: Mat2, B: Mat2) -> Optional[Mat2]:
    """
    P in GL2(Z) with P A P^-1 = B, or None.

    Since f_{P A P^-1} = det(P) f_A o P^-1, a determinant +1 conjugator is a
    proper equivalence f_A ~ f_B and a determinant -1 one is a proper
    equivalence between f_A o J and -f_B, with J = diag(1, -1).
    """
    if det(A) != det(B) or trace(A) != trace(B):
        return None
    if A == B:
        return IDENTITY
    if not (is_anosov(A) and is_anosov(B)):
        return None
    fA, fB = commutator_form(A), commutator_form(B)
    if fA.content != fB.content:
        return None

    candidates = []
    Q = proper_equivalence(fA, fB)
    if Q is not None:
        candidates.append(Q)
    Q = proper_equivalence(fA.compose(REFLECTION), -fB)
    if Q is not None:
        candidates.append(mul(REFLECTION, Q))

    for Q in candidates:
        P = inverse(Q)
        if mul(mul(P, A), Q) == B:
            return P
        logger.error(f"conjugator {P} failed to verify for {A} ~ {B}")
    return None


def homeo_test_torus_bundles(A: Mat2, B: Mat2) -> bool:
    require_anosov(A)
    require_anosov(B)
    return conjugacy_test(A, B) is not None or conjugacy_test(A, inverse(B)) is not None


def homeo_witness(A: Mat2, B: Mat2) -> Tuple[bool, Optional[Mat2], bool]:
    """(homeomorphic, conjugator, conjugates onto B^-1 rather than B)."""
    require_anosov(A)
    require_anosov(B)
    P = conjugacy_test(A, B)
    if P is not None:
        return True, P, False
    P = conjugacy_test(A, inverse(B))
    if P is not None:
        return True, P, True
    return False, None, False


def reidemeister_finite_flag(A: Mat2, B: Mat2) -> bool:
    """
    Whether the type II automorphism with restriction B has finite
    Reidemeister number: both I - B and I - BA must be invertible over Q.
    """
    _require_unimodular(A)
    if not is_reverser(A, B):
        raise NotAReverser(f"{B} does not reverse {A}", {"matrix": str(A), "candidate": str(B)})
    return det(IDENTITY - B) != 0 and det(IDENTITY - mul(B, A)) != 0
