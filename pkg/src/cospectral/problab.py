"""Random graphs and the integrality probabilities behind the height bounds.

Randomness comes from numpy's PCG64 bit generator.  A Monte Carlo run with
seed ``s`` splits its trials into fixed-size chunks and draws chunk ``c`` from
``SeedSequence([s, c])``, so totals do not depend on how chunks are scheduled.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np
from scipy.special import logsumexp

from .graph import Graph
from .linalg import RatMatrix, is_orthogonal, level_and_height
from .ortho import NotOrthogonalError, canonicalize

MC_CHUNK = 4096
EXACT_GUARD = 20
WILSON_Z = 1.959963984540054


@dataclass(frozen=True)
class GnpSpec:
    n: int
    p: float
    seed: int

    def __post_init__(self):
        if not 0 < self.p < 1:
            raise ValueError("edge probability must lie in (0, 1)")
        if self.n < 1:
            raise ValueError("order must be positive")

    @property
    def p_hat(self) -> float:
        return max(self.p, 1 - self.p)


def _pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(n, k=1)


def sample_gnp(spec: GnpSpec) -> Graph:
    """Edges in row-major upper-triangle order; edge iff uniform draw < p."""
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    iu, ju = _pairs(spec.n)
    hits = rng.random(len(iu)) < spec.p
    return Graph.from_edges(spec.n, zip(iu[hits].tolist(), ju[hits].tolist()))


def sample_adjacency_batch(n: int, p: float, count: int, rng: np.random.Generator) -> np.ndarray:
    """``(count, n, n)`` float64 adjacency matrices drawn like :func:`sample_gnp`."""
    iu, ju = _pairs(n)
    hits = rng.random((count, len(iu))) < p
    a = np.zeros((count, n, n))
    a[:, iu, ju] = hits
    a[:, ju, iu] = hits
    return a


def wilson_interval(successes: int, trials: int, z: float = WILSON_Z) -> tuple[float, float]:
    if trials <= 0:
        raise ValueError("need at least one trial")
    phat = successes / trials
    denom = 1 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == trials else min(1.0, centre + half)
    return lo, hi


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------

def _check_bound_args(n: int, s: int, h: int, p: float) -> None:
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    if s == 0 and h >= 1 and n >= 1:
        return
    if not 1 <= s <= n:
        raise ValueError("need 1 <= s <= n")
    if h < 2:
        raise ValueError("need h >= 2 when s >= 1")


def lemma_exponent(n: int, s: int, h: int) -> float:
    t = s / (2 * h ** 4)
    return t * (t + n - s - 1)


def log_lemma_bound(n: int, s: int, h: int, p: float) -> float:
    _check_bound_args(n, s, h, p)
    return lemma_exponent(n, s, h) * math.log(max(p, 1 - p))


def lemma_bound(n: int, s: int, h: int, p: float) -> float:
    """p_hat ** ((s/2h^4)(s/2h^4 + n - s - 1)).

    Exceeds 1 (and is vacuous) when the exponent is negative, e.g. s = n.
    """
    return math.exp(log_lemma_bound(n, s, h, p))


@dataclass(frozen=True)
class TailResult:
    n: int
    h: int
    p: float
    log_tail: float
    b_n: float
    geometric_applies: bool
    log_geometric: float | None


def _log_terms(n: int, h: int, lam: float, s: np.ndarray) -> np.ndarray:
    h2 = h * h
    return 2 * s * math.log(n) + s * h2 * np.log(2 * s * h2) - lam * s * (n - 1) / (4 * h ** 8)


def _log_sum_terms(n: int, h: int, lam: float) -> float:
    """log of sum_{s=2}^n a_{n,s}.

    The exponent is convex in s, so the maximum over an interval sits at an
    endpoint; intervals whose total cannot reach e^-60 of the running sum are
    skipped, the rest summed exactly.
    """
    direct = 1 << 20
    if n - 1 <= direct:
        return float(logsumexp(_log_terms(n, h, lam, np.arange(2, n + 1, dtype=float))))
    head = np.arange(2, direct + 2, dtype=float)
    tail = np.arange(n - direct + 1, n + 1, dtype=float)
    running = float(logsumexp(np.concatenate([_log_terms(n, h, lam, head), _log_terms(n, h, lam, tail)])))
    pending = [(direct + 2, n - direct)]
    while pending:
        a, b = pending.pop()
        if a > b:
            continue
        ends = _log_terms(n, h, lam, np.array([a, b], dtype=float))
        if ends.max() + math.log(b - a + 1) < running - 60:
            continue
        if b - a < direct:
            running = float(np.logaddexp(running, logsumexp(_log_terms(n, h, lam, np.arange(a, b + 1, dtype=float)))))
            continue
        mid = (a + b) // 2
        pending.append((a, mid))
        pending.append((mid + 1, b))
    return running


def theorem_tail(n: int, h: int, p: float) -> TailResult:
    """Log of sum_{s=2}^n exp(2s ln n + s h^2 ln(2sh^2) - lam s(n-1)/4h^8),
    lam = -ln p_hat, together with b_n and the geometric closed form
    r^2/(1-r), r = exp(-lam n / 8h^8), where it applies."""
    if n < 2 or h < 2 or not 0 < p < 1:
        raise ValueError("need n >= 2, h >= 2 and 0 < p < 1")
    lam = -math.log(max(p, 1 - p))
    h8 = h ** 8
    b_n = (2 + h * h) * math.log(n) + h * h * math.log(2 * h * h) - lam * (n - 1) / (4 * h8)
    threshold = -lam * n / (8 * h8)
    applies = b_n <= threshold
    log_geo = None
    if applies:
        log_r = threshold
        log_geo = 2 * log_r - math.log(-math.expm1(log_r))
    return TailResult(n, h, p, _log_sum_terms(n, h, lam), b_n, applies, log_geo)


def growing_height(n: int) -> int:
    """floor((n / ln n)^{1/10} / ln ln n)."""
    return math.floor((n / math.log(n)) ** 0.1 / math.log(math.log(n)))


# ---------------------------------------------------------------------------
# integrality probabilities
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntegralityEstimate:
    trials: int
    successes: int
    point_estimate: float
    wilson_interval_95: tuple[float, float]
    bound: float
    s: int
    h: int


def _scaled(q) -> tuple[np.ndarray, int]:
    lv, _ = level_and_height(q)
    m = np.array([[int(x * lv) for x in row] for row in q], dtype=np.int64)
    return m, lv


def _check_orthogonal(q) -> RatMatrix:
    q = tuple(tuple(Fraction(x) for x in row) for row in q)
    if not is_orthogonal(q):
        raise NotOrthogonalError("matrix is not orthogonal")
    return q


def _canonical_sh(q) -> tuple[int, int]:
    cf = canonicalize(q)
    return cf.s, cf.h


def integrality_probability_mc(q, p: float, trials: int, seed: int) -> IntegralityEstimate:
    """Fraction of G(n, p) draws for which q^T A q is an integer matrix."""
    if trials < 1:
        raise ValueError("need at least one trial")
    q = _check_orthogonal(q)
    n = len(q)
    m, lv = _scaled(q)
    mf = m.astype(float)
    mod = float(lv * lv)
    successes = 0
    done = 0
    chunk_id = 0
    while done < trials:
        size = min(MC_CHUNK, trials - done)
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, chunk_id])))
        a = sample_adjacency_batch(n, p, size, rng)
        # integer-valued and far below 2**53, so float64 products are exact
        b = mf.T @ a @ mf
        successes += int(np.all(np.fmod(b, mod) == 0, axis=(1, 2)).sum())
        done += size
        chunk_id += 1
    s, h = _canonical_sh(q)
    return IntegralityEstimate(
        trials, successes, successes / trials, wilson_interval(successes, trials),
        lemma_bound(n, s, h, p), s, h,
    )


def _as_fraction(p) -> Fraction:
    if isinstance(p, float):
        return Fraction(repr(p))
    return Fraction(p)


@dataclass(frozen=True)
class _Dependence:
    """Scaled coefficients of each relevant edge variable in each
    possibly-fractional entry of q^T A q (entries with i <= j)."""

    variables: list[tuple[int, int]]
    positions: list[tuple[int, int]]
    coeffs: np.ndarray  # (len(variables), len(positions))
    modulus: int


def _dependence(q) -> _Dependence:
    m, lv = _scaled(q)
    n = len(q)
    mod = lv * lv
    iu, ju = _pairs(n)
    # coefficient of a_uv (u < v) in entry (i, j): m_ui m_vj + m_vi m_uj
    c = np.einsum("ki,kj->kij", m[iu], m[ju]) + np.einsum("ki,kj->kij", m[ju], m[iu])
    ti, tj = np.triu_indices(n)
    c = c[:, ti, tj] % mod
    var_mask = c.any(axis=1)
    pos_mask = c.any(axis=0)
    variables = [(int(u), int(v)) for u, v, keep in zip(iu, ju, var_mask) if keep]
    positions = [(int(i), int(j)) for i, j, keep in zip(ti, tj, pos_mask) if keep]
    return _Dependence(variables, positions, c[var_mask][:, pos_mask], mod)


def _enumerate(dep: _Dependence, p: Fraction) -> Fraction:
    k = len(dep.variables)
    if k > EXACT_GUARD:
        raise ValueError(f"{k} relevant edge variables exceed the exact-enumeration guard of {EXACT_GUARD}")
    if k == 0:
        return Fraction(1)
    x = ((np.arange(1 << k)[:, None] >> np.arange(k)) & 1).astype(np.int64)
    sums = x @ dep.coeffs
    ok = sums % dep.modulus == 0
    # a flip of the pivot variable can never keep a fractional entry integral
    for col in range(ok.shape[1]):
        pivot = int(np.flatnonzero(dep.coeffs[:, col])[0])
        off = x[:, pivot] == 0
        both = ok[off, col] & ((sums[off, col] + dep.coeffs[pivot, col]) % dep.modulus == 0)
        assert not both.any(), f"pivot flip kept entry {dep.positions[col]} integral"
    good = ok.all(axis=1)
    ones = x.sum(axis=1)
    counts = np.bincount(ones[good], minlength=k + 1)
    return sum(
        (int(counts[e]) * p ** e * (1 - p) ** (k - e) for e in range(k + 1)), Fraction(0)
    )


def integrality_probability_exact(q, p) -> Fraction:
    """Pr(q^T A q integral) for A ~ G(n, p), by enumerating only the edge
    variables whose coefficient in some entry is non-integral."""
    q = _check_orthogonal(q)
    return _enumerate(_dependence(q), _as_fraction(p))


def relevant_variables(q) -> list[tuple[int, int]]:
    return _dependence(_check_orthogonal(q)).variables


def integrality_components(q) -> list[tuple[list[tuple[int, int]], list[tuple[int, int]]]]:
    """Split the possibly-fractional entries into groups with disjoint edge
    variables; returns (variables, positions) per group."""
    dep = _dependence(_check_orthogonal(q))
    k, npos = dep.coeffs.shape
    parent = list(range(npos))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for v in range(k):
        cols = np.flatnonzero(dep.coeffs[v])
        for c in cols[1:]:
            parent[find(int(c))] = find(int(cols[0]))
    groups: dict[int, list[int]] = {}
    for c in range(npos):
        groups.setdefault(find(c), []).append(c)
    out = []
    for cols in groups.values():
        vs = [v for v in range(k) if dep.coeffs[v, cols].any()]
        out.append(([dep.variables[v] for v in vs], [dep.positions[c] for c in cols]))
    return out


def integrality_probability_factored(q, p) -> Fraction:
    """Product of the exact probabilities of the independent groups."""
    q = _check_orthogonal(q)
    dep = _dependence(q)
    pf = _as_fraction(p)
    total = Fraction(1)
    for variables, positions in integrality_components(q):
        vi = [dep.variables.index(v) for v in variables]
        pi = [dep.positions.index(x) for x in positions]
        sub = _Dependence(variables, positions, dep.coeffs[np.ix_(vi, pi)], dep.modulus)
        total *= _enumerate(sub, pf)
    return total


def edge_density(n: int, p: float, samples: int, seed: int) -> float:
    """Mean edge density over ``samples`` seeded G(n, p) draws."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, 0])))
    m = comb(n, 2)
    hits = 0
    done = 0
    while done < samples:
        size = min(MC_CHUNK, samples - done)
        hits += int((rng.random((size, m)) < p).sum())
        done += size
    return hits / (samples * m)
