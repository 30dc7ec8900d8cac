"""
SolAut Words Module
Normal-form arithmetic in the torus-bundle group (Z+Z) x|_theta Z and in
the sapphire group, plus automorphisms given by generator images.

Torus bundle elements are d^x b^y v^k with
    (w, k) (w', k') = (w + theta^k w', k + k').
Sapphire elements are g a^e with g in the index-two torus-bundle subgroup
and e in {0, 1}; a^2 = d is folded into the lattice part as soon as it
appears, and conjugation by a acts on the subgroup by
    d -> d,  b -> b^-1,  v -> c0 v^-1,   c0 = (r - ru - st, s - 2su).
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .errors import GroupMismatch, NotInvertible, VerificationError
from .gl2z import power_log
from .intmat import (
    IDENTITY,
    REFLECTION,
    ZERO,
    E1,
    Mat2,
    Vec2,
    det,
    inverse,
    mul,
    power,
    solve_linear,
)

logger = logging.getLogger(__name__)

GeneratorWord = Sequence[Tuple[str, int]]


@lru_cache(maxsize=8192)
def _mat_power(A: Mat2, k: int) -> Mat2:
    return power(A, k)


# ----- Elements -----

@dataclass(frozen=True)
class TBElement:
    """d^x b^y v^k"""
    x: int
    y: int
    k: int

    @property
    def lattice(self) -> Vec2:
        return Vec2(self.x, self.y)

    def to_dict(self) -> dict:
        return {"d": self.x, "b": self.y, "v": self.k}

    def __str__(self) -> str:
        return _format_normal_form(self.x, self.y, self.k, 0)


@dataclass(frozen=True)
class SapElement:
    """d^x b^y v^k a^e with e in {0, 1}"""
    x: int
    y: int
    k: int
    e: int

    @property
    def lattice(self) -> Vec2:
        return Vec2(self.x, self.y)

    def to_dict(self) -> dict:
        return {"d": self.x, "b": self.y, "v": self.k, "a": self.e}

    def __str__(self) -> str:
        return _format_normal_form(self.x, self.y, self.k, self.e)


Element = Union[TBElement, SapElement]


def _format_normal_form(x: int, y: int, k: int, e: int) -> str:
    parts = []
    for name, exp in (("d", x), ("b", y), ("v", k), ("a", e)):
        if exp == 1:
            parts.append(name)
        elif exp:
            parts.append(f"{name}^{exp}")
    return "".join(parts) or "1"


@dataclass(frozen=True)
class Relator:
    name: str
    word: Tuple[Tuple[str, int], ...]


# ----- Groups -----

@dataclass(frozen=True)
class TBGroup:
    """(Z+Z) x|_theta Z on generators d, b, v."""
    theta: Mat2

    generator_names = ("d", "b", "v")
    element_type = TBElement

    def identity(self) -> TBElement:
        return TBElement(0, 0, 0)

    def lattice(self, w: Vec2) -> TBElement:
        return TBElement(w.x, w.y, 0)

    def make(self, w: Vec2, k: int, e: int = 0) -> TBElement:
        return TBElement(w.x, w.y, k)

    def generator(self, name: str) -> TBElement:
        return {"d": TBElement(1, 0, 0), "b": TBElement(0, 1, 0), "v": TBElement(0, 0, 1)}[name]

    def _check(self, *elements) -> None:
        for g in elements:
            if not isinstance(g, TBElement):
                raise GroupMismatch(f"{g!r} is not a torus bundle element")

    def mul(self, g: TBElement, h: TBElement) -> TBElement:
        self._check(g, h)
        w = g.lattice + _mat_power(self.theta, g.k).apply(h.lattice)
        return TBElement(w.x, w.y, g.k + h.k)

    def inv(self, g: TBElement) -> TBElement:
        self._check(g)
        w = -_mat_power(self.theta, -g.k).apply(g.lattice)
        return TBElement(w.x, w.y, -g.k)

    def relators(self) -> List[Relator]:
        t = self.theta
        return [
            Relator("db=bd", (("d", 1), ("b", 1), ("d", -1), ("b", -1))),
            Relator("vdv^-1=theta(1,0)", (("v", 1), ("d", 1), ("v", -1), ("b", -t.c), ("d", -t.a))),
            Relator("vbv^-1=theta(0,1)", (("v", 1), ("b", 1), ("v", -1), ("b", -t.d), ("d", -t.b))),
        ]

    def normal_form_word(self, g: TBElement) -> List[Tuple[str, int]]:
        return [("d", g.x), ("b", g.y), ("v", g.k)]

    def __str__(self) -> str:
        return f"E_tb(theta={self.theta})"


def sapphire_theta(B: Mat2) -> Mat2:
    """Gluing monodromy (ru+st, -2rt; -2su, ru+st) of the two-fold torus bundle cover."""
    r, s, t, u = B.entries()
    P = r * u + s * t
    return Mat2(P, -2 * r * t, -2 * s * u, P)


@dataclass(frozen=True)
class SapGroup:
    """Sapphire group on generators d, b, v, a."""
    B: Mat2

    generator_names = ("d", "b", "v", "a")
    element_type = SapElement

    @property
    def theta(self) -> Mat2:
        return sapphire_theta(self.B)

    @property
    def c0(self) -> Vec2:
        r, s, t, u = self.B.entries()
        return Vec2(r - r * u - s * t, s - 2 * s * u)

    def identity(self) -> SapElement:
        return SapElement(0, 0, 0, 0)

    def lattice(self, w: Vec2) -> SapElement:
        return SapElement(w.x, w.y, 0, 0)

    def make(self, w: Vec2, k: int, e: int = 0) -> SapElement:
        return SapElement(w.x, w.y, k, e)

    def generator(self, name: str) -> SapElement:
        return {
            "d": SapElement(1, 0, 0, 0),
            "b": SapElement(0, 1, 0, 0),
            "v": SapElement(0, 0, 1, 0),
            "a": SapElement(0, 0, 0, 1),
        }[name]

    def _check(self, *elements) -> None:
        for g in elements:
            if not isinstance(g, SapElement):
                raise GroupMismatch(f"{g!r} is not a sapphire element")

    # pairs (w, k) are elements of the torus-bundle subgroup
    def _pmul(self, g: Tuple[Vec2, int], h: Tuple[Vec2, int]) -> Tuple[Vec2, int]:
        return g[0] + _mat_power(self.theta, g[1]).apply(h[0]), g[1] + h[1]

    def _pinv(self, g: Tuple[Vec2, int]) -> Tuple[Vec2, int]:
        return -_mat_power(self.theta, -g[1]).apply(g[0]), -g[1]

    def _c0_power(self, k: int) -> Tuple[Vec2, int]:
        return _c0_power_cached(self.theta, self.c0, k)

    def _conj_a(self, g: Tuple[Vec2, int]) -> Tuple[Vec2, int]:
        w, k = g
        return self._pmul((REFLECTION.apply(w), 0), self._c0_power(k))

    def mul(self, g: SapElement, h: SapElement) -> SapElement:
        self._check(g, h)
        gp, hp = (g.lattice, g.k), (h.lattice, h.k)
        if g.e == 0:
            w, k = self._pmul(gp, hp)
            return SapElement(w.x, w.y, k, h.e)
        w, k = self._pmul(gp, self._conj_a(hp))
        if h.e == 0:
            return SapElement(w.x, w.y, k, 1)
        w, k = self._pmul((w, k), (E1, 0))
        return SapElement(w.x, w.y, k, 0)

    def inv(self, g: SapElement) -> SapElement:
        self._check(g)
        w, k = self._pinv((g.lattice, g.k))
        if g.e == 0:
            return SapElement(w.x, w.y, k, 0)
        w, k = self._pmul((-E1, 0), self._conj_a((w, k)))
        return SapElement(w.x, w.y, k, 1)

    def relators(self) -> List[Relator]:
        t = self.theta
        c = self.c0
        return [
            Relator("db=bd", (("d", 1), ("b", 1), ("d", -1), ("b", -1))),
            Relator("vdv^-1=theta(1,0)", (("v", 1), ("d", 1), ("v", -1), ("b", -t.c), ("d", -t.a))),
            Relator("vbv^-1=theta(0,1)", (("v", 1), ("b", 1), ("v", -1), ("b", -t.d), ("d", -t.b))),
            Relator("a^2=d", (("a", 2), ("d", -1))),
            Relator("ab=b^-1a", (("a", 1), ("b", 1), ("a", -1), ("b", 1))),
            Relator(
                "ava^-1=d^(r-ru-st)b^(s-2su)v^-1",
                (("a", 1), ("v", 1), ("a", -1), ("v", 1), ("b", -c.y), ("d", -c.x)),
            ),
        ]

    def normal_form_word(self, g: SapElement) -> List[Tuple[str, int]]:
        return [("d", g.x), ("b", g.y), ("v", g.k), ("a", g.e)]

    def __str__(self) -> str:
        return f"E_sap(B={self.B})"


Group = Union[TBGroup, SapGroup]


@lru_cache(maxsize=4096)
def _c0_power_cached(theta: Mat2, c0: Vec2, k: int) -> Tuple[Vec2, int]:
    """(c0 v^-1)^k as a subgroup pair."""
    def pmul(g, h):
        return g[0] + _mat_power(theta, g[1]).apply(h[0]), g[1] + h[1]

    if k < 0:
        w, n = _c0_power_cached(theta, c0, -k)
        return -_mat_power(theta, -n).apply(w), -n
    result = (ZERO, 0)
    base = (c0, -1)
    while k:
        if k & 1:
            result = pmul(result, base)
        base = pmul(base, base)
        k >>= 1
    return result


def element_power(group: Group, g: Element, n: int) -> Element:
    if n < 0:
        return element_power(group, group.inv(g), -n)
    result = group.identity()
    base = g
    while n:
        if n & 1:
            result = group.mul(result, base)
        base = group.mul(base, base)
        n >>= 1
    return result


def evaluate(group: Group, word: GeneratorWord, images: Dict[str, Element]) -> Element:
    """Product of images[name]^exp over the word."""
    result = group.identity()
    for name, exp in word:
        if exp:
            result = group.mul(result, element_power(group, images[name], exp))
    return result


def from_word(group: Group, word: GeneratorWord) -> Element:
    return evaluate(group, word, {n: group.generator(n) for n in group.generator_names})


def tb_mul(group: TBGroup, g: TBElement, h: TBElement) -> TBElement:
    return group.mul(g, h)


def sap_mul(group: SapGroup, g: SapElement, h: SapElement) -> SapElement:
    return group.mul(g, h)


def tb_inv(group: TBGroup, g: TBElement) -> TBElement:
    return group.inv(g)


def sap_inv(group: SapGroup, g: SapElement) -> SapElement:
    return group.inv(g)


# ----- Automorphisms -----

@dataclass(frozen=True)
class GroupAutomorphism:
    """Automorphism given by the images of the generators, in generator order."""
    group: Group
    images: Tuple[Element, ...]
    name: str = field(default="", compare=False)
    inverse_images: Optional[Tuple[Element, ...]] = field(default=None, compare=False, hash=False, repr=False)

    def image(self, name: str) -> Element:
        return self.images[self.group.generator_names.index(name)]

    def image_map(self) -> Dict[str, Element]:
        return dict(zip(self.group.generator_names, self.images))

    @property
    def restriction(self) -> Mat2:
        """Induced matrix on the lattice <d, b>."""
        return Mat2.from_columns(self.image("d").lattice, self.image("b").lattice)

    @property
    def sigma(self) -> int:
        """Sign induced on the infinite cyclic quotient."""
        return self.image("v").k

    @property
    def translation(self) -> Vec2:
        return self.image("v").lattice

    @property
    def a_grade(self) -> Optional[int]:
        """v-exponent k of phi(a) = d^m b^n v^k a (sapphires only)."""
        if isinstance(self.group, SapGroup):
            return self.image("a").k
        return None

    def with_name(self, name: str) -> "GroupAutomorphism":
        return GroupAutomorphism(self.group, self.images, name, self.inverse_images)

    def to_dict(self) -> dict:
        data = {"name": self.name, "images": {n: str(g) for n, g in self.image_map().items()}}
        data["restriction"] = str(self.restriction)
        data["sigma"] = self.sigma
        return data


@dataclass
class EndomorphismReport:
    ok: bool
    violations: List[str] = field(default_factory=list)
    automorphism: Optional[GroupAutomorphism] = None

    def to_dict(self) -> dict:
        return {"ok": self.ok, "violations": self.violations}


def identity_automorphism(group: Group) -> GroupAutomorphism:
    gens = tuple(group.generator(n) for n in group.generator_names)
    return GroupAutomorphism(group, gens, "id", gens)


def apply(phi: GroupAutomorphism, g: Element) -> Element:
    group = phi.group
    return evaluate(group, group.normal_form_word(g), phi.image_map())


def check_endomorphism(group: Group, images: Dict[str, Element], name: str = "") -> EndomorphismReport:
    """Map every defining relator through the images and compare against the identity."""
    for n in group.generator_names:
        if not isinstance(images.get(n), group.element_type):
            return EndomorphismReport(False, [f"missing or foreign image for {n}"])
    violations = []
    one = group.identity()
    for relator in group.relators():
        if evaluate(group, relator.word, images) != one:
            violations.append(relator.name)
    if violations:
        logger.debug(f"{name or 'map'} on {group} violates {violations}")
        return EndomorphismReport(False, violations)
    phi = GroupAutomorphism(group, tuple(images[n] for n in group.generator_names), name)
    return EndomorphismReport(True, [], phi)


def make_automorphism(group: Group, images: Dict[str, Element], name: str = "") -> GroupAutomorphism:
    """Verified automorphism with a verified two-sided inverse attached."""
    report = check_endomorphism(group, images, name)
    if not report.ok:
        raise VerificationError(f"{name or 'map'} is not an endomorphism of {group}", {"violations": report.violations})
    phi = report.automorphism
    psi = invert(phi)
    return GroupAutomorphism(group, phi.images, name, psi.images)


def compose(phi: GroupAutomorphism, psi: GroupAutomorphism, name: str = "") -> GroupAutomorphism:
    """phi o psi"""
    if phi.group != psi.group:
        raise GroupMismatch(f"cannot compose automorphisms of {phi.group} and {psi.group}")
    images = tuple(apply(phi, g) for g in psi.images)
    inverse_images = None
    if phi.inverse_images is not None and psi.inverse_images is not None:
        psi_inv = GroupAutomorphism(psi.group, psi.inverse_images)
        inverse_images = tuple(apply(psi_inv, g) for g in phi.inverse_images)
    return GroupAutomorphism(phi.group, images, name, inverse_images)


def _preimage(phi: GroupAutomorphism, target: Element, N_inv: Mat2) -> Element:
    group = phi.group
    sigma = phi.sigma
    if isinstance(group, SapGroup):
        e = target.e
        k = sigma * (target.k - e * phi.image("a").k)
        R = group.mul(element_power(group, phi.image("v"), k), element_power(group, phi.image("a"), e))
    else:
        e = 0
        k = sigma * target.k
        R = element_power(group, phi.image("v"), k)
    rest = group.mul(target, group.inv(R))
    if rest.k != 0 or getattr(rest, "e", 0) != 0:
        raise NotInvertible(f"{phi.name or 'map'} misses {target}")
    x = N_inv.apply(rest.lattice)
    return group.make(x, k, e)


def invert(phi: GroupAutomorphism) -> GroupAutomorphism:
    """
    Two-sided inverse, solved generator by generator from the induced data
    and then checked in both composition orders.
    """
    group = phi.group
    if phi.inverse_images is not None:
        return GroupAutomorphism(group, phi.inverse_images, f"{phi.name}^-1" if phi.name else "", phi.images)
    N = phi.restriction
    if det(N) not in (1, -1) or phi.sigma not in (1, -1):
        raise NotInvertible(f"{phi.name or 'map'} has restriction {N} and sign {phi.sigma}")
    N_inv = inverse(N)
    images = tuple(_preimage(phi, group.generator(n), N_inv) for n in group.generator_names)
    psi = GroupAutomorphism(group, images)

    gens = tuple(group.generator(n) for n in group.generator_names)
    if tuple(apply(phi, g) for g in images) != gens or tuple(apply(psi, g) for g in phi.images) != gens:
        raise NotInvertible(f"{phi.name or 'map'} is not bijective")
    return GroupAutomorphism(group, images, f"{phi.name}^-1" if phi.name else "", phi.images)


def automorphism_power(phi: GroupAutomorphism, n: int) -> GroupAutomorphism:
    if n < 0:
        return automorphism_power(invert(phi), -n)
    result = identity_automorphism(phi.group)
    base = phi
    while n:
        if n & 1:
            result = compose(result, base)
        base = compose(base, base)
        n >>= 1
    return result


def inner(group: Group, g: Element) -> GroupAutomorphism:
    """kappa_g(x) = g x g^-1"""
    g_inv = group.inv(g)
    gens = [group.generator(n) for n in group.generator_names]
    images = tuple(group.mul(group.mul(g, x), g_inv) for x in gens)
    inverse_images = tuple(group.mul(group.mul(g_inv, x), g) for x in gens)
    return GroupAutomorphism(group, images, f"kappa[{g}]", inverse_images)


def same_map(phi: GroupAutomorphism, psi: GroupAutomorphism) -> bool:
    return phi.group == psi.group and phi.images == psi.images


def is_identity(phi: GroupAutomorphism) -> bool:
    group = phi.group
    return all(phi.image(n) == group.generator(n) for n in group.generator_names)


def _inner_witness(chi: GroupAutomorphism) -> Optional[Element]:
    group = chi.group
    theta = group.theta
    N = chi.restriction

    if isinstance(group, TBGroup):
        if chi.sigma != 1:
            return None
        found = power_log(theta, N, signs=(1,))
        if found is None:
            return None
        _, k = found
        sol = solve_linear(IDENTITY - theta, chi.translation)
        if sol.kind != "unique":
            return None
        return TBElement(sol.particular.x, sol.particular.y, k)

    if chi.sigma == 1:
        found = power_log(theta, N, signs=(1,))
        e = 0
    else:
        found = power_log(theta, mul(N, REFLECTION), signs=(1,))
        e = 1
    if found is None:
        return None
    _, k = found
    c = SapElement(0, 0, k, e)
    rest = compose(chi, inner(group, group.inv(c)))
    if rest.restriction != IDENTITY or rest.sigma != 1:
        return None
    sol = solve_linear(IDENTITY - theta, rest.translation)
    if sol.kind != "unique":
        return None
    return group.mul(group.lattice(sol.particular), c)


def inner_witness(chi: GroupAutomorphism) -> Optional[Element]:
    """g with chi = kappa_g, solved exactly from the induced data, or None."""
    g = _inner_witness(chi)
    if g is None:
        return None
    if not same_map(inner(chi.group, g), chi):
        return None
    return g


def equal_mod_inner(phi: GroupAutomorphism, psi: GroupAutomorphism) -> Optional[Element]:
    """g with phi = kappa_g o psi, or None when phi and psi differ in Out."""
    if phi.group != psi.group:
        raise GroupMismatch(f"automorphisms of {phi.group} and {psi.group}")
    chi = compose(phi, invert(psi))
    g = inner_witness(chi)
    if g is None:
        return None
    if not same_map(compose(inner(phi.group, g), psi), phi):
        raise VerificationError(f"inner witness {g} does not relate {phi.name} and {psi.name}")
    return g


# ----- Induced-data constructors -----

def tb_automorphism(group: TBGroup, N: Mat2, sigma: int, w: Vec2, name: str = "") -> GroupAutomorphism:
    """d^x b^y -> N(x, y), v -> w v^sigma."""
    images = {
        "d": group.lattice(N.column(0)),
        "b": group.lattice(N.column(1)),
        "v": group.make(w, sigma),
    }
    return make_automorphism(group, images, name)


def sap_automorphism(
    group: SapGroup, N: Mat2, v_image: SapElement, a_image: SapElement, name: str = ""
) -> GroupAutomorphism:
    images = {
        "d": group.lattice(N.column(0)),
        "b": group.lattice(N.column(1)),
        "v": v_image,
        "a": a_image,
    }
    return make_automorphism(group, images, name)


def lattice_vector(group: Group, g: Element) -> Vec2:
    if g.k != 0 or getattr(g, "e", 0) != 0:
        raise VerificationError(f"{g} is not in the lattice <d, b>")
    return g.lattice

