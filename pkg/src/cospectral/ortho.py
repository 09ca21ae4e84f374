"""Bounded-height rational orthogonal matrices: fractional profiles, canonical
block forms, the greedy index selection, and exhaustive enumeration of small
canonical blocks."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, gcd, lcm
from typing import Sequence

import numpy as np

from .linalg import RatMatrix, block_diag, is_orthogonal, level_and_height, matmul, transpose

MAX_ENUM_S = 4
MAX_ENUM_H = 6


class NotOrthogonalError(ValueError):
    pass


def _is_fractional(x) -> bool:
    return Fraction(x).denominator != 1


def _as_rat(q) -> RatMatrix:
    return tuple(tuple(Fraction(x) for x in row) for row in q)


@dataclass(frozen=True)
class OrthoProfile:
    fri: tuple[int, ...]
    fci: tuple[int, ...]
    iri: tuple[int, ...]
    ici: tuple[int, ...]

    @property
    def s(self) -> int:
        return len(self.fri)


def fractional_profile(q: Sequence[Sequence]) -> OrthoProfile:
    q = _as_rat(q)
    if not is_orthogonal(q):
        raise NotOrthogonalError("matrix is not orthogonal")
    n = len(q)
    fri = tuple(i for i in range(n) if any(_is_fractional(x) for x in q[i]))
    fci = tuple(j for j in range(n) if any(_is_fractional(q[i][j]) for i in range(n)))
    prof = OrthoProfile(
        fri, fci,
        tuple(i for i in range(n) if i not in fri),
        tuple(j for j in range(n) if j not in fci),
    )
    assert len(fri) == len(fci), "fractional row and column counts differ"
    return prof


@dataclass(frozen=True)
class CanonicalForm:
    """``p_r^T q p_c = diag(q_s, I)`` with signed permutation matrices."""

    p_r: tuple[tuple[int, ...], ...]
    p_c: tuple[tuple[int, ...], ...]
    q_s: RatMatrix
    n: int
    s: int
    h: int

    def full(self) -> RatMatrix:
        """The canonical matrix diag(q_s, I_{n-s})."""
        ident = tuple(tuple(Fraction(int(i == j)) for j in range(self.n - self.s)) for i in range(self.n - self.s))
        return _as_rat(block_diag(self.q_s, ident))

    def reconstruct(self) -> RatMatrix:
        return matmul(matmul(self.p_r, self.full()), transpose(self.p_c))


def canonicalize(q: Sequence[Sequence]) -> CanonicalForm:
    """Move fractional rows/columns to the front, integral part to +I.

    Rows keep their relative order (fractional rows first); fractional columns
    keep theirs and each integral row ``r`` is matched with the column holding
    its ``±1``, whose sign is absorbed into ``p_c``.
    """
    q = _as_rat(q)
    prof = fractional_profile(q)
    n = len(q)
    row_order = list(prof.fri) + list(prof.iri)
    col_order = list(prof.fci)
    signs = [1] * len(col_order)
    for r in prof.iri:
        c = next(j for j in range(n) if q[r][j] != 0)
        col_order.append(c)
        signs.append(int(q[r][c]))
    p_r = [[0] * n for _ in range(n)]
    p_c = [[0] * n for _ in range(n)]
    for i, r in enumerate(row_order):
        p_r[r][i] = 1
    for j, (c, sg) in enumerate(zip(col_order, signs)):
        p_c[c][j] = sg
    s = prof.s
    q_s = tuple(tuple(q[r][c] for c in prof.fci) for r in prof.fri)
    _, h = level_and_height(q)
    return CanonicalForm(tuple(map(tuple, p_r)), tuple(map(tuple, p_c)), q_s, n, s, h)


def supports_and_overlaps(cf: CanonicalForm) -> tuple[dict[int, frozenset[int]], dict[int, frozenset[int]]]:
    """Row supports K(j) of every column and overlap sets N(i) for i < s."""
    if cf.s < 1:
        raise ValueError("canonical form has no fractional block")
    s, h = cf.s, cf.h
    K = {j: frozenset(i for i in range(s) if cf.q_s[i][j] != 0) for j in range(s)}
    K.update({j: frozenset({j}) for j in range(s, cf.n)})
    N = {i: frozenset(j for j in range(s) if K[j] & K[i]) for i in range(s)}
    for j in range(s):
        assert len(K[j]) <= h * h, f"column {j} has {len(K[j])} > h^2 nonzeros"
    for i in range(s):
        assert len(N[i]) <= h ** 4, f"N({i}) has {len(N[i])} > h^4 elements"
    return K, N


@dataclass(frozen=True)
class SelectionResult:
    i_set: tuple[int, ...]
    j_set: tuple[int, ...]
    supports: dict

    def check(self) -> bool:
        """Both disjointness properties of the selection."""
        chosen = self.i_set + self.j_set
        for a in range(len(chosen)):
            for b in range(a + 1, len(chosen)):
                if self.supports[chosen[a]] & self.supports[chosen[b]]:
                    return False
        seen: set[tuple[int, int]] = set()
        for i in self.i_set:
            for j in self.j_set:
                cells = {(u, v) for u in self.supports[i] for v in self.supports[j]}
                if cells & seen:
                    return False
                seen |= cells
        return True


def greedy_lower_bounds(n: int, s: int, h: int) -> tuple[int, int]:
    t = ceil(Fraction(s, h ** 4))
    return ceil(Fraction(t, 2)), t // 2 + n - s


def greedy_select(cf: CanonicalForm, n: int | None = None) -> SelectionResult:
    """Alternate picks between I and J, always taking the smallest remaining index."""
    n = cf.n if n is None else n
    K, N = supports_and_overlaps(cf)
    remaining = set(range(cf.s))
    picks: list[list[int]] = [[], []]
    turn = 0
    while remaining:
        i = min(remaining)
        picks[turn].append(i)
        remaining -= N[i]
        turn ^= 1
    i_set = tuple(picks[0])
    j_set = tuple(picks[1]) + tuple(range(cf.s, n))
    K.update({j: frozenset({j}) for j in range(cf.s, n)})
    return SelectionResult(i_set, j_set, K)


# ---------------------------------------------------------------------------
# enumeration of canonical blocks
# ---------------------------------------------------------------------------

def _unit_vectors(s: int, h: int, scale: int) -> list[tuple[int, ...]]:
    """Integer vectors x with |x|^2 = scale^2 whose entries x/scale have
    denominators <= h and include at least one non-integer."""
    allowed = sorted(
        {scale * a // b for b in range(1, h + 1) for a in range(0, b + 1) if gcd(a, b) == 1}
        | {0}
    )
    target = scale * scale
    out = []

    def rec(prefix: list[int], rest: int):
        if len(prefix) == s:
            if rest == 0 and any(x % scale for x in prefix):
                out.append(tuple(prefix))
            return
        for a in allowed:
            sq = a * a
            if sq > rest:
                break
            for x in ((a,) if a == 0 else (a, -a)):
                prefix.append(x)
                rec(prefix, rest - sq)
                prefix.pop()

    rec([], target)
    return out


def enumerate_canonical_blocks(s: int, h: int) -> list[RatMatrix]:
    """All s x s rational orthogonal matrices with every column fractional and
    every entry denominator <= h, in lexicographic order of their columns."""
    if not (1 <= s <= MAX_ENUM_S and 1 <= h <= MAX_ENUM_H):
        raise ValueError(f"enumeration guard: need 1 <= s <= {MAX_ENUM_S} and 1 <= h <= {MAX_ENUM_H}")
    scale = lcm(*range(1, h + 1))
    vecs = _unit_vectors(s, h, scale)
    if not vecs:
        return []
    arr = np.array(vecs, dtype=np.int64)
    orth = (arr @ arr.T) == 0
    results: list[tuple[int, ...]] = []

    def rec(cols: list[int], cand: np.ndarray):
        if len(cols) == s:
            results.append(tuple(cols))
            return
        for c in np.flatnonzero(cand):
            cols.append(int(c))
            rec(cols, cand & orth[c])
            cols.pop()

    rec([], np.ones(len(vecs), dtype=bool))
    mats = []
    for cols in results:
        m = tuple(tuple(Fraction(vecs[c][i], scale) for c in cols) for i in range(s))
        mats.append(m)
    return mats


def counting_bound(s: int, h: int) -> int:
    if s < 1 or h < 1:
        raise ValueError("s and h must be positive")
    return (2 * s * h * h) ** (s * h * h)


def signed_permutation(perm: Sequence[int], signs: Sequence[int] | None = None) -> tuple[tuple[int, ...], ...]:
    """Matrix with entry ``signs[j]`` at ``(perm[j], j)``."""
    n = len(perm)
    signs = [1] * n if signs is None else signs
    m = [[0] * n for _ in range(n)]
    for j, (i, sg) in enumerate(zip(perm, signs)):
        m[i][j] = sg
    return tuple(map(tuple, m))


def rotation_345() -> RatMatrix:
    """The 2x2 rotation with entries ±3/5, ±4/5."""
    return ((Fraction(3, 5), Fraction(-4, 5)), (Fraction(4, 5), Fraction(3, 5)))


def embed(block: Sequence[Sequence], n: int, offset: int = 0) -> RatMatrix:
    """``block`` placed on the diagonal at ``offset`` inside I_n."""
    m = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for i, row in enumerate(block):
        for j, x in enumerate(row):
            m[offset + i][offset + j] = Fraction(x)
    return tuple(map(tuple, m))
