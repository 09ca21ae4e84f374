"""Exact dense linear algebra over the integers and the rationals.

Matrices are tuples of row tuples holding Python ``int`` or
:class:`fractions.Fraction` entries.  ``Fraction`` keeps every entry in lowest
terms with a positive denominator, which is what makes height well defined.
No floating point is used anywhere in this module.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Sequence

from .graph import Graph

IntMatrix = tuple[tuple[int, ...], ...]
RatMatrix = tuple[tuple[Fraction, ...], ...]


class SingularMatrixError(ArithmeticError):
    pass


class DimensionError(ValueError):
    pass


def int_matrix(rows: Sequence[Sequence[int]]) -> IntMatrix:
    m = tuple(tuple(int(x) for x in r) for r in rows)
    if any(len(r) != len(m) for r in m):
        raise DimensionError("matrix must be square")
    return m


def rat_matrix(rows: Sequence[Sequence[Fraction | int | str]]) -> RatMatrix:
    m = tuple(tuple(Fraction(x) for x in r) for r in rows)
    if any(len(r) != len(m) for r in m):
        raise DimensionError("matrix must be square")
    return m


def identity(n: int) -> IntMatrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def transpose(m):
    return tuple(zip(*m)) if m else ()


def matmul(a, b):
    bt = transpose(b)
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def block_diag(*blocks):
    n = sum(len(b) for b in blocks)
    out = [[0] * n for _ in range(n)]
    off = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, x in enumerate(row):
                out[off + i][off + j] = x
        off += len(b)
    return tuple(tuple(r) for r in out)


def adjacency_matrix(g: Graph) -> IntMatrix:
    return tuple(tuple(int(g.has_edge(u, v)) for v in range(g.n)) for u in range(g.n))


@dataclass(frozen=True)
class IntPolynomial:
    """Monic integer polynomial, coefficients from the leading term down."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        if not self.coeffs or self.coeffs[0] != 1:
            raise ValueError("polynomial must be monic")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        acc = 0
        for c in self.coeffs:
            acc = acc * x + c
        return acc

    def __str__(self) -> str:
        terms = []
        d = self.degree
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            k = d - i
            mag = abs(c)
            body = "x" if k == 1 else f"x^{k}" if k else ""
            coef = "" if mag == 1 and k else str(mag)
            sign = "-" if c < 0 else "+"
            terms.append((sign, coef + body))
        if not terms:
            return "0"
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, t in terms[1:]:
            out += f" {sign} {t}"
        return out


def charpoly(m: Sequence[Sequence[int]]) -> IntPolynomial:
    """det(xI - m) by Berkowitz's division-free algorithm."""
    n = len(m)
    if n == 0:
        return IntPolynomial((1,))
    vect = [1, -m[0][0]]
    for k in range(1, n):
        r = m[k][:k]
        c = [m[i][k] for i in range(k)]
        col = [1, -m[k][k]]
        for _ in range(k):
            col.append(-sum(x * y for x, y in zip(r, c)))
            c = [sum(m[i][j] * c[j] for j in range(k)) for i in range(k)]
        vect = [
            sum(col[i - j] * vect[j] for j in range(min(i, k) + 1))
            for i in range(k + 2)
        ]
    return IntPolynomial(tuple(vect))


def _bareiss(rows: list[list[int]]) -> tuple[int, list[list[int]], list[int]]:
    """Fraction-free elimination in place; returns (sign, rows, pivot columns)."""
    n = len(rows)
    width = len(rows[0]) if rows else 0
    sign = 1
    prev = 1
    r = 0
    pivots = []
    for c in range(width):
        if r == n:
            break
        piv = next((i for i in range(r, n) if rows[i][c] != 0), None)
        if piv is None:
            continue
        if piv != r:
            rows[r], rows[piv] = rows[piv], rows[r]
            sign = -sign
        pr = rows[r]
        for i in range(r + 1, n):
            ri = rows[i]
            f = ri[c]
            rows[i] = [(pr[c] * ri[j] - f * pr[j]) // prev for j in range(width)]
        prev = pr[c]
        pivots.append(c)
        r += 1
    return sign, rows, pivots


def det(m: Sequence[Sequence[int]]) -> int:
    """Exact determinant by Bareiss elimination."""
    n = len(m)
    if n == 0:
        return 1
    sign, rows, pivots = _bareiss([list(map(int, r)) for r in m])
    if len(pivots) < n:
        return 0
    return sign * rows[n - 1][n - 1]


def walk_matrix(g: Graph) -> IntMatrix:
    """Column k is A^k e with e the all-ones vector."""
    n = g.n
    cols = [[1] * n]
    nbrs = [g.neighbors(u) for u in range(n)]
    for _ in range(1, n):
        prev = cols[-1]
        cols.append([sum(prev[v] for v in nbrs[u]) for u in range(n)])
    return transpose(cols)


def is_controllable(g: Graph) -> bool:
    return det(walk_matrix(g)) != 0


def rat_inverse(m: Sequence[Sequence[Fraction | int]]) -> RatMatrix:
    """Inverse via fraction-free elimination on the integer-scaled augmented matrix."""
    n = len(m)
    if any(len(r) != n for r in m):
        raise DimensionError("matrix must be square")
    if n == 0:
        return ()
    fr = [[Fraction(x) for x in r] for r in m]
    # clear denominators row by row: scaling row i by d_i gives D m, and
    # (D m)^{-1} = m^{-1} D^{-1}
    scale = [lcm(*(x.denominator for x in r)) for r in fr]
    aug = [
        [int(x * scale[i]) for x in fr[i]] + [int(i == j) for j in range(n)]
        for i in range(n)
    ]
    _, rows, pivots = _bareiss(aug)
    if len(pivots) < n or pivots[n - 1] != n - 1:
        raise SingularMatrixError("matrix is singular")
    # back substitution on the echelon form, now in exact rationals
    x = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n - 1, -1, -1):
        row = rows[i]
        piv = row[i]
        for j in range(n):
            acc = Fraction(row[n + j])
            for k in range(i + 1, n):
                if row[k]:
                    acc -= row[k] * x[k][j]
            x[i][j] = acc / piv
    # undo the row scaling: m^{-1} = (D m)^{-1} D
    return tuple(tuple(x[i][j] * scale[j] for j in range(n)) for i in range(n))


def level_and_height(q: Sequence[Sequence[Fraction | int]]) -> tuple[int, int]:
    """(lcm, max) of the reduced entry denominators."""
    dens = [Fraction(x).denominator for row in q for x in row]
    if not dens:
        return 1, 1
    return lcm(*dens), max(dens)


def height(q) -> int:
    return level_and_height(q)[1]


def level(q) -> int:
    return level_and_height(q)[0]


def is_orthogonal(q) -> bool:
    n = len(q)
    return matmul(transpose(q), q) == identity(n)


def verify_transition(q, a, b) -> bool:
    """True iff q^T q = I and q^T a q = b exactly."""
    n = len(q)
    for m in (q, a, b):
        if len(m) != n or any(len(r) != n for r in m):
            raise DimensionError("q, a and b must be square of the same order")
    qt = transpose(q)
    if matmul(qt, q) != identity(n):
        return False
    return matmul(matmul(qt, a), q) == tuple(tuple(r) for r in b)
