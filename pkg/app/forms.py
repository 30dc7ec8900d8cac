"""
SolAut Binary Forms Module
Indefinite integral binary quadratic forms: reduction, reduced cycles and
proper equivalence with explicit SL2(Z) transforms.

A form (a, b, c) is f(x, y) = a x^2 + b x y + c y^2. Composition with a
matrix T means f o T (v) = f(T v), so (f o X) o Y = f o (X Y).
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

from sympy import integer_nthroot

from .errors import DegenerateInput
from .intmat import IDENTITY, Mat2, Vec2, content, inverse, mul

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BinaryForm:
    a: int
    b: int
    c: int

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    @property
    def content(self) -> int:
        return content(self.a, self.b, self.c)

    def evaluate(self, v: Vec2) -> int:
        return self.a * v.x * v.x + self.b * v.x * v.y + self.c * v.y * v.y

    def compose(self, T: Mat2) -> "BinaryForm":
        """The form f o T."""
        p, q, r, s = T.a, T.b, T.c, T.d
        return BinaryForm(
            self.a * p * p + self.b * p * r + self.c * r * r,
            2 * self.a * p * q + self.b * (p * s + q * r) + 2 * self.c * r * s,
            self.a * q * q + self.b * q * s + self.c * s * s,
        )

    def scaled(self, k: int) -> "BinaryForm":
        return BinaryForm(k * self.a, k * self.b, k * self.c)

    def primitive(self) -> "BinaryForm":
        g = self.content
        return self if g in (0, 1) else BinaryForm(self.a // g, self.b // g, self.c // g)

    def __neg__(self) -> "BinaryForm":
        return self.scaled(-1)

    def __str__(self) -> str:
        return f"[{self.a},{self.b},{self.c}]"


def _root_floor(D: int) -> int:
    return integer_nthroot(D, 2)[0]


def _check_indefinite(f: BinaryForm) -> int:
    D = f.discriminant
    if D <= 0 or integer_nthroot(D, 2)[1]:
        raise DegenerateInput(f"form {f} has discriminant {D}, expected a positive non-square")
    return D


def is_reduced(f: BinaryForm) -> bool:
    """|sqrt(D) - 2|a|| < b < sqrt(D), written with s = floor(sqrt(D))."""
    s = _root_floor(f.discriminant)
    return 0 < f.b <= s and s - f.b + 1 <= 2 * abs(f.a) <= s + f.b


def rho(f: BinaryForm) -> Tuple[BinaryForm, Mat2]:
    """One reduction step; returns (f o T, T) with T = (0,-1;1,k)."""
    D = f.discriminant
    s = _root_floor(D)
    c = f.c
    m = 2 * abs(c)
    if abs(c) > s:
        r = abs(c) - ((abs(c) + f.b) % m)
    else:
        r = s - ((s + f.b) % m)
    k = (r + f.b) // (2 * c)
    T = Mat2(0, -1, 1, k)
    g = BinaryForm(c, r, (r * r - D) // (4 * c))
    return g, T


def reduce_form(f: BinaryForm) -> Tuple[BinaryForm, Mat2]:
    """Reduced form g and T in SL2(Z) with f o T = g."""
    _check_indefinite(f)
    T = IDENTITY
    g = f
    steps = 0
    while not is_reduced(g):
        g, step = rho(g)
        T = mul(T, step)
        steps += 1
    logger.debug(f"reduced {f} to {g} in {steps} steps")
    return g, T


def reduced_cycle(f: BinaryForm) -> List[Tuple[BinaryForm, Mat2]]:
    """
    The rho-cycle of a reduced form, each entry (g_i, C_i) with f o C_i = g_i.
    The first entry is (f, I).
    """
    if not is_reduced(f):
        raise DegenerateInput(f"{f} is not reduced")
    cycle = [(f, IDENTITY)]
    g, C = rho(f)
    while g != f:
        cycle.append((g, C))
        g, step = rho(g)
        C = mul(C, step)
    return cycle


def proper_equivalence(f: BinaryForm, g: BinaryForm) -> Optional[Mat2]:
    """T in SL2(Z) with f o T = g, or None when the forms are not properly equivalent."""
    if f.discriminant != g.discriminant or f.content != g.content:
        return None
    fp, gp = f.primitive(), g.primitive()
    f_red, T_f = reduce_form(fp)
    g_red, T_g = reduce_form(gp)
    for form, C in reduced_cycle(f_red):
        if form == g_red:
            T = mul(mul(T_f, C), inverse(T_g))
            if f.compose(T) != g:
                logger.error(f"equivalence transform failed to verify for {f} ~ {g}")
                return None
            return T
    return None


def primitive_representation(f: BinaryForm, targets: Tuple[int, ...]) -> Optional[Tuple[Vec2, int]]:
    """
    A primitive vector v with f(v) in targets, for small targets (|m| < sqrt(D)/2).

    Such representations always show up as leading coefficients along the
    reduced cycle of f.
    """
    f_red, T = reduce_form(f)
    for form, C in reduced_cycle(f_red):
        if form.a in targets:
            v = mul(T, C).column(0)
            value = f.evaluate(v)
            if value == form.a:
                return v, value
    return None
