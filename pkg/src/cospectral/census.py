"""Census of controllable generalized-cospectral pairs with their transition
matrices, levels and heights.

The map phase (charpolys of the graph and its complement, controllability) runs
in compiled fixed-width code whose exactness is guaranteed for the orders
handled here; the pair phase uses exact rationals only.
"""
from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from pathlib import Path
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from . import _kernels
from .graph import (
    MAX_ENUM_ORDER,
    Graph,
    certificate,
    complement,
    enumerate_graph_arrays,
    parse_graph6,
    to_graph6,
)
from .linalg import (
    IntPolynomial,
    RatMatrix,
    SingularMatrixError,
    adjacency_matrix,
    charpoly,
    level_and_height,
    matmul,
    rat_inverse,
    transpose,
    verify_transition,
    walk_matrix,
)

log = logging.getLogger(__name__)

JOBS_ENV = "COSPECTRAL_CENSUS_JOBS"


class SingularWalkMatrixError(SingularMatrixError):
    pass


class OrderMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class GenSpectrumKey:
    p_a: IntPolynomial
    p_comp: IntPolynomial

    def as_tuple(self) -> tuple[int, ...]:
        return self.p_a.coeffs + self.p_comp.coeffs


def gen_spectrum_key(g: Graph) -> GenSpectrumKey:
    return GenSpectrumKey(
        charpoly(adjacency_matrix(g)), charpoly(adjacency_matrix(complement(g)))
    )


def transition_matrix(g: Graph, h: Graph) -> RatMatrix | None:
    """The rational orthogonal Q with Q^T A_g Q = A_h and Qe = e, if any.

    For controllable ``g`` the walk-matrix equation Q^T W(g) = W(h) pins Q
    down uniquely; the candidate is then checked exactly.
    """
    if g.n != h.n:
        raise ValueError("graphs must have the same order")
    wg = walk_matrix(g)
    wh = walk_matrix(h)
    try:
        wg_inv = rat_inverse(wg)
    except SingularMatrixError as exc:
        raise SingularWalkMatrixError("first graph is not controllable") from exc
    q = transpose(matmul(wh, wg_inv))
    if not verify_transition(q, adjacency_matrix(g), adjacency_matrix(h)):
        return None
    if any(sum(row) != 1 for row in q):
        return None
    return q


@dataclass(frozen=True)
class MatePair:
    g: Graph
    h: Graph
    q: RatMatrix
    level: int
    height: int
    controllable_both: bool = True

    def __post_init__(self):
        if not self.level >= self.height >= 2:
            raise ValueError(f"invalid mate pair: level {self.level}, height {self.height}")

    def to_json(self) -> dict:
        return {
            "g": to_graph6(self.g),
            "h": to_graph6(self.h),
            "q": [[f"{x.numerator}/{x.denominator}" for x in row] for row in self.q],
            "level": self.level,
            "height": self.height,
        }

    @classmethod
    def from_json(cls, d: dict) -> MatePair:
        q = tuple(tuple(Fraction(x) for x in row) for row in d["q"])
        return cls(parse_graph6(d["g"]), parse_graph6(d["h"]), q, int(d["level"]), int(d["height"]))

    def verify(self) -> bool:
        n = self.g.n
        e_ok = matmul(self.q, tuple((1,) for _ in range(n))) == tuple((1,) for _ in range(n))
        return (
            e_ok
            and verify_transition(self.q, adjacency_matrix(self.g), adjacency_matrix(self.h))
            and certificate(self.g) != certificate(self.h)
            and level_and_height(self.q) == (self.level, self.height)
        )


@dataclass
class CensusReport:
    n: int
    class_count: int
    controllable_count: int
    pair_count: int
    l_max: int | None
    h_max: int | None
    pairs: list[MatePair] = field(default_factory=list)
    one_sided_pairs: int = 0
    anomalies: list[tuple[str, str]] = field(default_factory=list)

    def __post_init__(self):
        if (self.l_max is None) != (self.h_max is None) or (self.l_max is None) != (self.pair_count == 0):
            raise ValueError("l_max, h_max and pair_count disagree on emptiness")
        if self.l_max is not None and self.h_max > self.l_max:
            raise ValueError("h_max exceeds l_max")

    def csv_row(self) -> str:
        fmt = lambda x: "NaN" if x is None else str(x)  # noqa: E731
        return (
            f"{self.n},{self.class_count},{self.controllable_count},"
            f"{self.pair_count},{fmt(self.l_max)},{fmt(self.h_max)}"
        )


CSV_HEADER = "n,classes,controllable,pairs,l_max,h_max"


# ---------------------------------------------------------------------------
# map phase
# ---------------------------------------------------------------------------

def _resolve_jobs(jobs: int | None) -> int:
    if jobs is None:
        env = os.environ.get(JOBS_ENV)
        jobs = int(env) if env else (os.cpu_count() or 1)
    return max(1, jobs)


def _array_chunks_from_graph6(paths: Sequence[str | Path], n: int, chunk: int) -> Iterator[np.ndarray]:
    buf: list[tuple[int, ...]] = []
    for path in paths:
        with open(path, "r", encoding="ascii") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                g = parse_graph6(line)
                if g.n != n:
                    raise OrderMismatchError(f"{path}:{lineno}: graph of order {g.n}, expected {n}")
                buf.append(g.rows)
                if len(buf) == chunk:
                    yield np.array(buf, dtype=np.int64)
                    buf = []
    if buf:
        yield np.array(buf, dtype=np.int64)


def _array_chunks_from_graphs(graphs: Iterable[Graph], n: int, chunk: int) -> Iterator[np.ndarray]:
    buf = []
    for g in graphs:
        if g.n != n:
            raise OrderMismatchError(f"graph of order {g.n}, expected {n}")
        buf.append(g.rows)
        if len(buf) == chunk:
            yield np.array(buf, dtype=np.int64)
            buf = []
    if buf:
        yield np.array(buf, dtype=np.int64)


def _source_chunks(n: int, source, chunk: int) -> Iterator[np.ndarray]:
    if source is None:
        yield from enumerate_graph_arrays(n, chunk)
    elif isinstance(source, (str, Path)):
        yield from _array_chunks_from_graph6([source], n, chunk)
    elif isinstance(source, (list, tuple)) and source and all(isinstance(s, (str, Path)) for s in source):
        yield from _array_chunks_from_graph6(source, n, chunk)
    else:
        yield from _array_chunks_from_graphs(source, n, chunk)


_HASH_MULT = np.random.default_rng(0x5EED).integers(1, 2**63, size=(2, 2 * MAX_ENUM_ORDER + 2), dtype=np.uint64) | np.uint64(1)


def _key_hashes(keys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    k = keys.astype(np.uint64)
    w = k.shape[1]
    with np.errstate(over="ignore"):
        h1 = (k * _HASH_MULT[0, :w]).sum(axis=1, dtype=np.uint64)
        h2 = ((k ^ np.uint64(0x9E3779B97F4A7C15)) * _HASH_MULT[1, :w]).sum(axis=1, dtype=np.uint64)
    return h1, h2


@dataclass
class _MapResult:
    rows: np.ndarray
    h1: np.ndarray
    h2: np.ndarray
    ctrl: np.ndarray


def _map_chunk(arr: np.ndarray, n: int) -> _MapResult:
    keys, ctrl = _kernels.census_map(arr, n)
    h1, h2 = _key_hashes(keys)
    return _MapResult(arr.astype(np.int32), h1, h2, ctrl)


def _map_phase(n: int, source, jobs: int, chunk: int) -> list[_MapResult]:
    chunks = _source_chunks(n, source, chunk)
    if jobs == 1:
        return [_map_chunk(a, n) for a in chunks]
    with ThreadPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(lambda a: _map_chunk(a, n), chunks))


def _buckets_from_map(results: list[_MapResult], n: int) -> Iterator[list[tuple[Graph, bool]]]:
    """Exact generalized-spectrum buckets of size >= 2, in a deterministic order."""
    if not results:
        return
    rows = np.concatenate([r.rows for r in results])
    h1 = np.concatenate([r.h1 for r in results])
    h2 = np.concatenate([r.h2 for r in results])
    ctrl = np.concatenate([r.ctrl for r in results])
    results.clear()  # the chunk copies are no longer needed
    order = np.lexsort((h2, h1))
    h1s, h2s = h1[order], h2[order]
    del h1, h2
    same = (h1s[1:] == h1s[:-1]) & (h2s[1:] == h2s[:-1])
    del h1s, h2s
    if not same.any():
        return
    starts = np.flatnonzero(np.concatenate(([True], ~same)))
    ends = np.concatenate((starts[1:], [len(order)]))
    for s, e in zip(starts, ends):
        if e - s < 2:
            continue
        idx = order[s:e]
        sub = rows[idx].astype(np.int64)
        keys, _ = _kernels.census_map(sub, n)
        exact: dict[bytes, list[tuple[Graph, bool]]] = {}
        for j, i in enumerate(idx):
            g = Graph(n, tuple(int(x) for x in rows[i]))
            exact.setdefault(keys[j].tobytes(), []).append((g, bool(ctrl[i])))
        for members in exact.values():
            if len(members) >= 2:
                yield members


# ---------------------------------------------------------------------------
# pair phase
# ---------------------------------------------------------------------------

@dataclass
class _Prepared:
    """Integer data of one controllable graph: W^{-1} = inv_num / inv_den."""

    a: np.ndarray
    w: np.ndarray
    inv_num: np.ndarray
    inv_den: int


def _prepare(g: Graph) -> _Prepared:
    inv = rat_inverse(walk_matrix(g))
    den = lcm(*(x.denominator for row in inv for x in row))
    num = np.array([[x.numerator * (den // x.denominator) for x in row] for row in inv], dtype=object)
    return _Prepared(
        np.array(adjacency_matrix(g), dtype=object), np.array(walk_matrix(g), dtype=object), num, den
    )


def _bucket_transition(pg: _Prepared, ph: _Prepared) -> RatMatrix | None:
    """Same result as :func:`transition_matrix`, in integer arithmetic on
    M = L Q with L the common denominator of W(g)^{-1}."""
    m = (ph.w @ pg.inv_num).T
    big = pg.inv_den
    n = len(m)
    if not (m.sum(axis=1) == big).all():
        return None
    mt = m.T
    if not ((mt @ m) == np.identity(n, dtype=object) * (big * big)).all():
        return None
    if not ((mt @ pg.a @ m) == ph.a * (big * big)).all():
        return None
    return tuple(tuple(Fraction(int(x), big) for x in row) for row in m)


def _pairs_in_bucket(members: list[tuple[Graph, bool]]) -> tuple[list[MatePair], int, list[tuple[str, str]]]:
    members = sorted(members, key=lambda m: to_graph6(m[0]))
    ctrl = [g for g, c in members if c]
    non = [g for g, c in members if not c]
    anomalies = [(to_graph6(a), to_graph6(b)) for a in ctrl for b in non]
    for a, b in anomalies:
        log.warning("controllable %s shares generalized spectrum with non-controllable %s", a, b)
    certs = [certificate(g) for g in ctrl]
    prepared = [_prepare(g) for g in ctrl] if len(ctrl) > 1 else []
    pairs = []
    for i, g in enumerate(ctrl):
        for j in range(i + 1, len(ctrl)):
            h = ctrl[j]
            if certs[i] == certs[j]:
                continue
            q = _bucket_transition(prepared[i], prepared[j])
            if q is None:
                log.warning("no rational transition matrix for %s, %s", to_graph6(g), to_graph6(h))
                continue
            lv, ht = level_and_height(q)
            pairs.append(MatePair(g, h, q, lv, ht))
    return pairs, len(anomalies), anomalies


def _report(
    n: int,
    classes: int,
    controllable: int,
    buckets: Iterable[list[tuple[Graph, bool]]],
    pair_sink: Callable[[MatePair], None] | None = None,
) -> CensusReport:
    """With ``pair_sink`` each pair is handed over as its bucket is finished
    and only the counts and maxima are kept."""
    pairs: list[MatePair] = []
    one_sided = 0
    anomalies: list[tuple[str, str]] = []
    count = 0
    l_max = h_max = None
    for members in buckets:
        found, k, an = _pairs_in_bucket(members)
        for p in found:
            l_max = p.level if l_max is None else max(l_max, p.level)
            h_max = p.height if h_max is None else max(h_max, p.height)
        count += len(found)
        if pair_sink is None:
            pairs.extend(found)
        else:
            for p in found:
                pair_sink(p)
        one_sided += k
        anomalies.extend(an)
    pairs.sort(key=lambda p: (to_graph6(p.g), to_graph6(p.h)))
    anomalies.sort()
    if count and n <= 9 and l_max != h_max:
        log.warning("n=%d: maximum level %s differs from maximum height %s", n, l_max, h_max)
    return CensusReport(n, classes, controllable, count, l_max, h_max, pairs, one_sided, anomalies)


def run_census(
    n: int,
    source=None,
    jobs: int | None = None,
    chunk: int = 8192,
    pair_sink: Callable[[MatePair], None] | None = None,
) -> CensusReport:
    """Census over all classes of order ``n``.

    ``source`` is ``None`` (built-in enumeration), a graph6 path, a list of
    graph6 paths (shards of one order), or an iterable of graphs. Passing
    ``pair_sink`` streams the pairs instead of collecting them in the report,
    which keeps memory flat at n = 10.
    """
    if not 1 <= n <= MAX_ENUM_ORDER:
        raise ValueError(f"census supports 1 <= n <= {MAX_ENUM_ORDER}, got {n}")
    results = _map_phase(n, source, _resolve_jobs(jobs), chunk)
    classes = sum(len(r.rows) for r in results)
    controllable = int(sum(int(r.ctrl.sum()) for r in results))
    return _report(n, classes, controllable, _buckets_from_map(results, n), pair_sink)


# ---------------------------------------------------------------------------
# shards
# ---------------------------------------------------------------------------

def census_shard(n: int, source=None, jobs: int | None = None, chunk: int = 8192) -> dict:
    """Bucket map of one input shard, ready to be merged with others.

    Every graph is kept (keyed by its exact generalized spectrum) since
    matches may only appear after merging.
    """
    if not 1 <= n <= MAX_ENUM_ORDER:
        raise ValueError(f"census supports 1 <= n <= {MAX_ENUM_ORDER}, got {n}")
    buckets: dict[str, list] = {}
    classes = 0
    for r in _map_phase(n, source, _resolve_jobs(jobs), chunk):
        keys, _ = _kernels.census_map(r.rows.astype(np.int64), n)
        for row, key, c in zip(r.rows, keys, r.ctrl):
            g = Graph(n, tuple(int(x) for x in row))
            buckets.setdefault(" ".join(map(str, key.tolist())), []).append([to_graph6(g), bool(c)])
            classes += 1
    return {"n": n, "classes": classes, "buckets": buckets}


def merge_shards(shards: Sequence[dict]) -> dict:
    if not shards:
        raise ValueError("nothing to merge")
    n = shards[0]["n"]
    merged: dict[str, list] = {}
    classes = 0
    for sh in shards:
        if sh["n"] != n:
            raise OrderMismatchError(f"shard of order {sh['n']} merged with order {n}")
        classes += sh["classes"]
        for key, members in sh["buckets"].items():
            merged.setdefault(key, []).extend(members)
    for members in merged.values():
        members.sort()
    return {"n": n, "classes": classes, "buckets": dict(sorted(merged.items()))}


def report_from_shard(shard: dict, pair_sink: Callable[[MatePair], None] | None = None) -> CensusReport:
    n = shard["n"]
    controllable = sum(c for members in shard["buckets"].values() for _, c in members)
    buckets = (
        [(parse_graph6(g6), bool(c)) for g6, c in members]
        for members in shard["buckets"].values()
        if len(members) >= 2
    )
    return _report(n, shard["classes"], controllable, buckets, pair_sink)
