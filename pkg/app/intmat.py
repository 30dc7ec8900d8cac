"""
SolAut Integer Matrix Module
Exact 2x2 integer matrices, Smith normal form with transforms, and small
linear Diophantine systems. Every other module computes on top of this one.

Python ints are arbitrary precision, so powers of Anosov matrices never
overflow; nothing here ever touches floating point.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from sympy import igcd

from .errors import NotUnimodular

logger = logging.getLogger(__name__)

IntRows = List[List[int]]


@dataclass(frozen=True)
class Vec2:
    """Column vector (x, y)."""
    x: int
    y: int

    def __add__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x - other.x, self.y - other.y)

    def __neg__(self) -> "Vec2":
        return Vec2(-self.x, -self.y)

    def scale(self, k: int) -> "Vec2":
        return Vec2(k * self.x, k * self.y)

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def as_tuple(self) -> Tuple[int, int]:
        return (self.x, self.y)

    def __str__(self) -> str:
        return f"({self.x},{self.y})"


ZERO = Vec2(0, 0)
E1 = Vec2(1, 0)
E2 = Vec2(0, 1)


@dataclass(frozen=True)
class Mat2:
    """2x2 integer matrix (a, b; c, d), row-major."""
    a: int
    b: int
    c: int
    d: int

    @classmethod
    def identity(cls) -> "Mat2":
        return cls(1, 0, 0, 1)

    @classmethod
    def scalar(cls, k: int) -> "Mat2":
        return cls(k, 0, 0, k)

    @classmethod
    def from_columns(cls, first: Vec2, second: Vec2) -> "Mat2":
        return cls(first.x, second.x, first.y, second.y)

    @classmethod
    def from_tuple(cls, entries: Sequence[int]) -> "Mat2":
        a, b, c, d = (int(e) for e in entries)
        return cls(a, b, c, d)

    def __mul__(self, other):
        if isinstance(other, Mat2):
            return mul(self, other)
        if isinstance(other, Vec2):
            return self.apply(other)
        if isinstance(other, int):
            return Mat2(other * self.a, other * self.b, other * self.c, other * self.d)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, int):
            return self * other
        return NotImplemented

    def __add__(self, other: "Mat2") -> "Mat2":
        return Mat2(self.a + other.a, self.b + other.b, self.c + other.c, self.d + other.d)

    def __sub__(self, other: "Mat2") -> "Mat2":
        return Mat2(self.a - other.a, self.b - other.b, self.c - other.c, self.d - other.d)

    def __neg__(self) -> "Mat2":
        return Mat2(-self.a, -self.b, -self.c, -self.d)

    def apply(self, v: Vec2) -> Vec2:
        return Vec2(self.a * v.x + self.b * v.y, self.c * v.x + self.d * v.y)

    def column(self, index: int) -> Vec2:
        return Vec2(self.a, self.c) if index == 0 else Vec2(self.b, self.d)

    def entries(self) -> Tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def rows(self) -> IntRows:
        return [[self.a, self.b], [self.c, self.d]]

    def is_scalar(self) -> bool:
        return self.b == 0 and self.c == 0 and self.a == self.d

    def is_unimodular(self) -> bool:
        return det(self) in (1, -1)

    def __str__(self) -> str:
        return f"({self.a},{self.b};{self.c},{self.d})"


IDENTITY = Mat2.identity()
REFLECTION = Mat2(1, 0, 0, -1)


def mul(A: Mat2, B: Mat2) -> Mat2:
    return Mat2(
        A.a * B.a + A.b * B.c, A.a * B.b + A.b * B.d,
        A.c * B.a + A.d * B.c, A.c * B.b + A.d * B.d,
    )


def det(A: Mat2) -> int:
    return A.a * A.d - A.b * A.c


def trace(A: Mat2) -> int:
    return A.a + A.d


def adjugate(A: Mat2) -> Mat2:
    return Mat2(A.d, -A.b, -A.c, A.a)


def inverse(A: Mat2) -> Mat2:
    """Exact inverse of a unimodular matrix."""
    dt = det(A)
    if dt not in (1, -1):
        raise NotUnimodular(f"{A} has determinant {dt}", {"matrix": str(A), "det": dt})
    return adjugate(A) * dt


def power(A: Mat2, k: int) -> Mat2:
    """A^k by binary exponentiation; negative k goes through the inverse."""
    if k < 0:
        return power(inverse(A), -k)
    result = IDENTITY
    base = A
    while k:
        if k & 1:
            result = mul(result, base)
        base = mul(base, base)
        k >>= 1
    return result


def mod2(A: Mat2) -> Mat2:
    return Mat2(A.a % 2, A.b % 2, A.c % 2, A.d % 2)


def content(*values: int) -> int:
    """gcd of the given integers (0 when all vanish)."""
    g = 0
    for value in values:
        g = igcd(g, value)
    return g


def commutes(A: Mat2, B: Mat2) -> bool:
    return mul(A, B) == mul(B, A)


# ----- Smith normal form -----

def _identity_rows(n: int) -> IntRows:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _swap_rows(M: IntRows, i: int, j: int) -> None:
    M[i], M[j] = M[j], M[i]


def _swap_cols(M: IntRows, i: int, j: int) -> None:
    for row in M:
        row[i], row[j] = row[j], row[i]


def _add_row(M: IntRows, target: int, source: int, factor: int) -> None:
    """row[target] += factor * row[source]"""
    M[target] = [t + factor * s for t, s in zip(M[target], M[source])]


def _add_col(M: IntRows, target: int, source: int, factor: int) -> None:
    for row in M:
        row[target] += factor * row[source]


def _least_position(S: IntRows, s: int) -> Optional[Tuple[int, int]]:
    """Position of the nonzero entry of least absolute value in the block S[s:, s:]."""
    best = None
    best_abs = 0
    for i in range(s, len(S)):
        for j in range(s, len(S[i])):
            value = S[i][j]
            if value and (best is None or abs(value) < best_abs):
                best, best_abs = (i, j), abs(value)
    return best


@dataclass
class SnfDecomposition:
    """U * A * V = S for a general (small, rectangular) integer matrix."""
    U: IntRows
    S: IntRows
    V: IntRows
    rank: int

    def diagonal(self) -> List[int]:
        return [self.S[i][i] for i in range(min(len(self.S), len(self.S[0]) if self.S else 0))]


def smith_decomposition(A: IntRows) -> SnfDecomposition:
    """
    Smith normal form with unimodular left and right transforms.

    Repeatedly moves the least nonzero entry of the remaining block to the
    pivot, clears its row and column by division with remainder, and folds
    in any entry the pivot does not divide, so the diagonal ends up as a
    divisibility chain of nonnegative integers.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    S = [list(map(int, row)) for row in A]
    U = _identity_rows(m)
    V = _identity_rows(n)
    rank = 0

    for s in range(min(m, n)):
        while True:
            pos = _least_position(S, s)
            if pos is None:
                return SnfDecomposition(U, S, V, rank)
            i, j = pos
            if i != s:
                _swap_rows(S, s, i)
                _swap_rows(U, s, i)
            if j != s:
                _swap_cols(S, s, j)
                _swap_cols(V, s, j)

            pivot = S[s][s]
            cleared = True
            for i in range(s + 1, m):
                q = S[i][s] // pivot
                if q:
                    _add_row(S, i, s, -q)
                    _add_row(U, i, s, -q)
                if S[i][s]:
                    cleared = False
            for j in range(s + 1, n):
                q = S[s][j] // pivot
                if q:
                    _add_col(S, j, s, -q)
                    _add_col(V, j, s, -q)
                if S[s][j]:
                    cleared = False
            if not cleared:
                continue

            offender = next(
                (i for i in range(s + 1, m) for j in range(s + 1, n) if S[i][j] % pivot),
                None,
            )
            if offender is None:
                break
            _add_row(S, s, offender, 1)
            _add_row(U, s, offender, 1)

        if S[s][s] < 0:
            S[s] = [-x for x in S[s]]
            U[s] = [-x for x in U[s]]
        rank += 1

    return SnfDecomposition(U, S, V, rank)


@dataclass(frozen=True)
class SnfResult:
    """Smith normal form of a 2x2 matrix: U * A * V = S."""
    U: Mat2
    S: Mat2
    V: Mat2

    @property
    def invariants(self) -> Tuple[int, int]:
        return (self.S.a, self.S.d)

    def cokernel(self) -> List[int]:
        """Cyclic factor orders of Z^2 / A Z^2; 0 stands for a copy of Z, trivial factors dropped."""
        return [n for n in self.invariants if n != 1]


def smith_normal_form(A: Mat2) -> SnfResult:
    snf = smith_decomposition(A.rows())
    return SnfResult(
        U=Mat2(snf.U[0][0], snf.U[0][1], snf.U[1][0], snf.U[1][1]),
        S=Mat2(snf.S[0][0], snf.S[0][1], snf.S[1][0], snf.S[1][1]),
        V=Mat2(snf.V[0][0], snf.V[0][1], snf.V[1][0], snf.V[1][1]),
    )


# ----- Linear Diophantine systems -----

@dataclass
class IntegerSolution:
    """All integer solutions of A x = b: particular + span_Z(kernel)."""
    particular: List[int]
    kernel: List[List[int]] = field(default_factory=list)

    def point(self, coefficients: Sequence[int]) -> List[int]:
        x = list(self.particular)
        for coef, direction in zip(coefficients, self.kernel):
            x = [xi + coef * di for xi, di in zip(x, direction)]
        return x


def solve_system(A: IntRows, b: Sequence[int]) -> Optional[IntegerSolution]:
    """
    Solve A x = b over the integers for a small m x n system.

    With S = U A V the system becomes S y = U b, x = V y; solvable exactly
    when each pivot divides its entry and the rows past the rank vanish.
    Returns None when there is no integer solution.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    snf = smith_decomposition(A)
    c = [sum(snf.U[i][k] * b[k] for k in range(m)) for i in range(m)]
    r = snf.rank

    if any(c[i] for i in range(r, m)):
        return None
    y = [0] * n
    for i in range(r):
        pivot = snf.S[i][i]
        if c[i] % pivot:
            return None
        y[i] = c[i] // pivot

    particular = [sum(snf.V[i][k] * y[k] for k in range(n)) for i in range(n)]
    kernel = [[snf.V[i][k] for i in range(n)] for k in range(r, n)]
    return IntegerSolution(particular=particular, kernel=kernel)


@dataclass(frozen=True)
class LinearSolution:
    """Solution set of a 2x2 system: empty, a point, or point + Z-span of directions."""
    particular: Optional[Vec2]
    directions: Tuple[Vec2, ...] = ()

    @property
    def kind(self) -> str:
        if self.particular is None:
            return "none"
        if not self.directions:
            return "unique"
        return "family"

    def contains(self, v: Vec2) -> bool:
        if self.particular is None:
            return False
        delta = v - self.particular
        if not self.directions:
            return delta.is_zero()
        cols = [[d.x for d in self.directions], [d.y for d in self.directions]]
        return solve_system(cols, [delta.x, delta.y]) is not None

    def point(self, *coefficients: int) -> Vec2:
        v = self.particular
        for coef, direction in zip(coefficients, self.directions):
            v = v + direction.scale(coef)
        return v


NO_SOLUTION = LinearSolution(particular=None)


def solve_linear(A: Mat2, b: Vec2) -> LinearSolution:
    """All integer solutions of A x = b as a closed-form family."""
    sol = solve_system(A.rows(), [b.x, b.y])
    if sol is None:
        return NO_SOLUTION
    return LinearSolution(
        particular=Vec2(*sol.particular),
        directions=tuple(Vec2(*k) for k in sol.kernel),
    )


def cokernel_orders(A: IntRows) -> List[int]:
    """Nontrivial invariant factors of Z^m / A Z^n (0 meaning Z)."""
    snf = smith_decomposition(A)
    m = len(A)
    diag = [snf.S[i][i] if i < len(snf.S[0]) else 0 for i in range(m)]
    return [abs(d) for d in diag if abs(d) != 1]
