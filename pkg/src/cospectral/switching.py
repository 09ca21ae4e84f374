"""Godsil-McKay switching."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .graph import Graph
from .linalg import RatMatrix, adjacency_matrix, charpoly, level_and_height

MAX_SEARCH_ORDER = 12


class PartitionError(ValueError):
    pass


@dataclass(frozen=True)
class GMPartition:
    blocks: tuple[frozenset[int], ...]
    rest: frozenset[int]

    @classmethod
    def of(cls, blocks: Iterable[Iterable[int]], rest: Iterable[int] = ()) -> GMPartition:
        return cls(tuple(frozenset(b) for b in blocks), frozenset(rest))

    @classmethod
    def single(cls, block: Iterable[int], n: int) -> GMPartition:
        b = frozenset(block)
        return cls((b,), frozenset(range(n)) - b)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    def check(self, n: int) -> None:
        seen: set[int] = set()
        for part in (*self.blocks, self.rest):
            if part & seen:
                raise PartitionError("blocks overlap")
            seen |= part
        if seen != set(range(n)):
            raise PartitionError(f"blocks and rest do not cover the vertices 0..{n - 1}")
        for b in self.blocks:
            if not b or len(b) % 2:
                raise PartitionError(f"block {sorted(b)} must have positive even size")


def _count(g: Graph, v: int, block: frozenset[int]) -> int:
    mask = sum(1 << u for u in block)
    return (g.rows[v] & mask).bit_count()


def is_gm_partition(g: Graph, part: GMPartition) -> bool:
    """Equitable among the blocks, and every outside vertex sees 0, half or
    all of each block."""
    part.check(g.n)
    for bi in part.blocks:
        for bj in part.blocks:
            if len({_count(g, v, bj) for v in bi}) > 1:
                return False
    for v in part.rest:
        for b in part.blocks:
            if _count(g, v, b) not in (0, len(b) // 2, len(b)):
                return False
    return True


def gm_switch(g: Graph, part: GMPartition) -> Graph:
    if not is_gm_partition(g, part):
        raise PartitionError("not a Godsil-McKay partition of this graph")
    rows = list(g.rows)
    for v in part.rest:
        for b in part.blocks:
            if _count(g, v, b) == len(b) // 2:
                mask = sum(1 << u for u in b)
                rows[v] ^= mask
                for u in b:
                    rows[u] ^= 1 << v
    out = Graph(g.n, tuple(rows))
    assert charpoly(adjacency_matrix(out)) == charpoly(adjacency_matrix(g)), "switch changed the spectrum"
    return out


def gm_matrix(part: GMPartition, n: int) -> RatMatrix:
    """(2/m)J - I on each block of size m, identity elsewhere, in the original labelling."""
    part.check(n)
    q = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for b in part.blocks:
        w = Fraction(2, len(b))
        for u in b:
            for v in b:
                q[u][v] = w - (u == v)
    return tuple(map(tuple, q))


def find_gm_partitions(g: Graph, max_block: int, multi_block: bool = False) -> list[GMPartition]:
    """All valid single-block partitions with even block size <= max_block.

    With ``multi_block`` also pairs of disjoint blocks are tried.
    """
    if g.n > MAX_SEARCH_ORDER:
        raise ValueError(f"partition search limited to n <= {MAX_SEARCH_ORDER}")
    verts = range(g.n)
    singles = [
        GMPartition.single(c, g.n)
        for size in range(2, min(max_block, g.n) + 1, 2)
        for c in combinations(verts, size)
    ]
    found = [p for p in singles if is_gm_partition(g, p)]
    if multi_block:
        blocks = [p.blocks[0] for p in singles]
        for b1, b2 in combinations(blocks, 2):
            if b1 & b2:
                continue
            p = GMPartition((b1, b2), frozenset(verts) - b1 - b2)
            if is_gm_partition(g, p):
                found.append(p)
    return found


def prime_block_partition(primes: Sequence[int]) -> tuple[GMPartition, int]:
    """Consecutive blocks of sizes 2p for the given p, no outside vertices."""
    blocks = []
    off = 0
    for p in primes:
        blocks.append(range(off, off + 2 * p))
        off += 2 * p
    return GMPartition.of(blocks), off


def first_primes(t: int) -> list[int]:
    out: list[int] = []
    k = 2
    while len(out) < t:
        if all(k % p for p in out):
            out.append(k)
        k += 1
    return out


def prime_block_table(t_max: int) -> list[tuple[int, int, int, int]]:
    """Rows (t, n, level, height) for blocks 2p over the first t primes."""
    rows = []
    for t in range(1, t_max + 1):
        part, n = prime_block_partition(first_primes(t))
        lv, ht = level_and_height(gm_matrix(part, n))
        rows.append((t, n, lv, ht))
    return rows
