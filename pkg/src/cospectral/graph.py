"""Simple graphs on at most 32 vertices, graph6 I/O, canonical labelling and
isomorph-free enumeration."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import _kernels

MAX_ORDER = 32
MAX_ENUM_ORDER = 10


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph; ``rows[u]`` is the neighbourhood bitset of ``u``."""

    n: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if not 1 <= self.n <= MAX_ORDER:
            raise ValueError(f"order {self.n} outside 1..{MAX_ORDER}")
        if len(self.rows) != self.n:
            raise ValueError("need one adjacency row per vertex")
        full = (1 << self.n) - 1
        for u, r in enumerate(self.rows):
            if r & ~full or (r >> u) & 1:
                raise ValueError(f"bad adjacency row for vertex {u}")
            for v in range(self.n):
                if (r >> v) & 1 and not (self.rows[v] >> u) & 1:
                    raise ValueError(f"asymmetric adjacency at {u},{v}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> Graph:
        rows = [0] * n
        for u, v in edges:
            if u == v:
                raise ValueError("loops are not allowed")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, tuple(rows))

    @classmethod
    def empty(cls, n: int) -> Graph:
        return cls(n, (0,) * n)

    @classmethod
    def complete(cls, n: int) -> Graph:
        full = (1 << n) - 1
        return cls(n, tuple(full & ~(1 << u) for u in range(n)))

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self.rows[u] >> v) & 1)

    def neighbors(self, u: int) -> list[int]:
        r = self.rows[u]
        return [v for v in range(self.n) if (r >> v) & 1]

    def degree(self, u: int) -> int:
        return self.rows[u].bit_count()

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u, v in combinations(range(self.n), 2) if self.has_edge(u, v)]

    def num_edges(self) -> int:
        return sum(r.bit_count() for r in self.rows) // 2

    def relabel(self, perm: Sequence[int]) -> Graph:
        """Graph with vertex ``u`` renamed ``perm[u]``."""
        if sorted(perm) != list(range(self.n)):
            raise ValueError("perm must be a permutation of the vertices")
        rows = [0] * self.n
        for u, v in self.edges():
            rows[perm[u]] |= 1 << perm[v]
            rows[perm[v]] |= 1 << perm[u]
        return Graph(self.n, tuple(rows))

    def as_array(self) -> np.ndarray:
        return np.array(self.rows, dtype=np.int64)

    def __str__(self) -> str:
        return to_graph6(self)


def complement(g: Graph) -> Graph:
    full = (1 << g.n) - 1
    return Graph(g.n, tuple(full & ~r & ~(1 << u) for u, r in enumerate(g.rows)))


def disjoint_union(g: Graph, h: Graph) -> Graph:
    return Graph.from_edges(g.n + h.n, g.edges() + [(u + g.n, v + g.n) for u, v in h.edges()])


def cycle(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def star(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


# ---------------------------------------------------------------------------
# graph6
# ---------------------------------------------------------------------------

class Graph6Error(ValueError):
    pass


class Graph6HeaderError(Graph6Error):
    pass


class Graph6OrderError(Graph6Error):
    pass


class Graph6TruncatedError(Graph6Error):
    pass


class Graph6TrailingError(Graph6Error):
    pass


class Graph6BitFieldError(Graph6Error):
    pass


def _field_len(n: int) -> int:
    return (n * (n - 1) // 2 + 5) // 6


def parse_graph6(text: str | bytes) -> Graph:
    if isinstance(text, bytes):
        text = text.decode("ascii")
    text = text.rstrip("\n")
    if text.startswith(">>graph6<<"):
        text = text[len(">>graph6<<"):]
    if not text:
        raise Graph6HeaderError("empty graph6 string")
    data = [ord(ch) - 63 for ch in text]
    if data[0] == 63:
        # multi-byte order header: only orders above 62 use it
        if len(data) < 4 or any(not 0 <= x <= 63 for x in data[1:4]):
            raise Graph6HeaderError(f"malformed order header in {text!r}")
        n = (data[1] << 12) | (data[2] << 6) | data[3]
        raise Graph6OrderError(f"order {n} outside supported range 1..{MAX_ORDER}")
    if not 0 <= data[0] <= 62:
        raise Graph6HeaderError(f"malformed order byte {text[0]!r}")
    n = data[0]
    if not 1 <= n <= MAX_ORDER:
        raise Graph6OrderError(f"order {n} outside supported range 1..{MAX_ORDER}")
    body = data[1:]
    need = _field_len(n)
    if len(body) < need:
        raise Graph6TruncatedError(f"bit field has {len(body)} bytes, need {need}")
    if len(body) > need:
        raise Graph6TrailingError(f"{len(body) - need} unexpected trailing bytes")
    if any(not 0 <= x <= 63 for x in body):
        raise Graph6BitFieldError("bit field byte outside 63..126")
    bits = []
    for x in body:
        bits.extend((x >> k) & 1 for k in range(5, -1, -1))
    m = n * (n - 1) // 2
    if any(bits[m:]):
        raise Graph6BitFieldError("nonzero padding bits")
    rows = [0] * n
    i = 0
    for v in range(1, n):
        for u in range(v):
            if bits[i]:
                rows[u] |= 1 << v
                rows[v] |= 1 << u
            i += 1
    return Graph(n, tuple(rows))


def to_graph6(g: Graph) -> str:
    bits = [int(g.has_edge(u, v)) for v in range(1, g.n) for u in range(v)]
    bits.extend([0] * (-len(bits) % 6))
    out = [chr(g.n + 63)]
    for i in range(0, len(bits), 6):
        x = 0
        for b in bits[i:i + 6]:
            x = (x << 1) | b
        out.append(chr(x + 63))
    return "".join(out)


def read_graph6_file(path: str | Path) -> Iterator[Graph]:
    with open(path, "r", encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield parse_graph6(line)


def write_graph6_file(path: str | Path, graphs: Iterable[Graph]) -> int:
    count = 0
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for g in graphs:
            fh.write(to_graph6(g) + "\n")
            count += 1
    return count


# ---------------------------------------------------------------------------
# canonical labelling
# ---------------------------------------------------------------------------

def canonical_labeling(g: Graph) -> list[int]:
    """Position of each vertex in the canonical ordering."""
    lab, _, _, _, _ = _kernels.canon(g.n, g.as_array(), np.zeros(g.n, np.int64))
    return [int(x) for x in lab]


def canonical_form(g: Graph) -> Graph:
    _, rows, _, _, _ = _kernels.canon(g.n, g.as_array(), np.zeros(g.n, np.int64))
    return Graph(g.n, tuple(int(r) for r in rows))


def automorphism_orbits(g: Graph) -> list[int]:
    """Smallest vertex in the automorphism orbit of each vertex."""
    _, _, orbits, _, _ = _kernels.canon(g.n, g.as_array(), np.zeros(g.n, np.int64))
    return [int(x) for x in orbits]


def automorphism_generators(g: Graph) -> list[tuple[int, ...]]:
    _, _, _, gens, k = _kernels.canon(g.n, g.as_array(), np.zeros(g.n, np.int64))
    return [tuple(int(x) for x in gens[i]) for i in range(k)]


def certificate(g: Graph) -> bytes:
    """Byte string equal for two graphs iff they are isomorphic."""
    return to_graph6(canonical_form(g)).encode("ascii")


def is_isomorphic(g: Graph, h: Graph) -> bool:
    return g.n == h.n and certificate(g) == certificate(h)


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _level(n: int) -> np.ndarray:
    """All isomorphism classes of order ``n`` as an ``(m, n)`` row array."""
    if n == 1:
        return np.zeros((1, 1), np.int64)
    out = _kernels.extend_by_vertex(_level(n - 1), n - 1)
    out.setflags(write=False)
    return out


def enumerate_graph_arrays(n: int, chunk: int = 4096) -> Iterator[np.ndarray]:
    """Stream of ``(m, n)`` row arrays, one representative per class."""
    if not 1 <= n <= MAX_ENUM_ORDER:
        raise ValueError(f"built-in enumeration supports 1 <= n <= {MAX_ENUM_ORDER}, got {n}")
    if n <= 9:
        lvl = _level(n)
        for i in range(0, len(lvl), chunk):
            yield lvl[i:i + chunk]
        return
    parents = _level(n - 1)
    step = max(1, chunk // 64)
    for i in range(0, len(parents), step):
        yield _kernels.extend_by_vertex(parents[i:i + step], n - 1)


def enumerate_graphs(n: int) -> Iterator[Graph]:
    """One graph per isomorphism class of order ``n``, in a fixed order."""
    for arr in enumerate_graph_arrays(n):
        for row in arr:
            yield Graph(n, tuple(int(x) for x in row))


def graphs_from_arrays(arr: np.ndarray) -> list[Graph]:
    n = arr.shape[1]
    return [Graph(n, tuple(int(x) for x in row)) for row in arr]


def graphs_to_array(graphs: Sequence[Graph]) -> np.ndarray:
    if not graphs:
        return np.zeros((0, 0), np.int64)
    return np.array([g.rows for g in graphs], dtype=np.int64)
