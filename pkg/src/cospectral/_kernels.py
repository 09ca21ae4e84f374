"""Compiled inner loops.

Graphs are passed as ``int64`` arrays of bitset rows: bit ``v`` of ``rows[u]``
is set iff ``uv`` is an edge.  Everything here works for ``n <= 32``, except
the fixed-width arithmetic kernels (:func:`charpoly_i64`, :func:`controllable_mod`)
which are only exact for ``n <= MAX_FAST_ORDER``.
"""
from __future__ import annotations

import numpy as np
from numba import njit

MAX_FAST_ORDER = 10

# Largest primes below 2**31; products of residues stay below 2**62.
PRIMES = np.array(
    [
        2147483647, 2147483629, 2147483587, 2147483579, 2147483563,
        2147483549, 2147483543, 2147483497, 2147483489, 2147483477,
        2147483423, 2147483399,
    ],
    dtype=np.int64,
)


@njit(cache=True)
def popcount(x):
    x = x - ((x >> 1) & 0x55555555)
    x = (x & 0x33333333) + ((x >> 2) & 0x33333333)
    x = (x + (x >> 4)) & 0x0F0F0F0F
    return ((x * 0x01010101) & 0xFFFFFFFF) >> 24


# ---------------------------------------------------------------------------
# partition refinement
# ---------------------------------------------------------------------------

@njit(cache=True)
def _key_less(u, v, cell_of, counts, k):
    if cell_of[u] != cell_of[v]:
        return cell_of[u] < cell_of[v]
    for c in range(k):
        if counts[u, c] != counts[v, c]:
            return counts[u, c] < counts[v, c]
    return False


@njit(cache=True)
def refine(n, rows, cell_of, masks, counts, order, scratch):
    """Colour refinement to the coarsest equitable partition below ``cell_of``.

    Cells are numbered ``0..k-1`` and the numbering depends only on the graph
    and the incoming numbering, so the result is labelling-invariant.
    Returns the number of cells.  ``cell_of`` is updated in place.
    """
    k = 0
    for v in range(n):
        if cell_of[v] + 1 > k:
            k = cell_of[v] + 1
    while k < n:
        for c in range(k):
            masks[c] = 0
        for v in range(n):
            masks[cell_of[v]] |= np.int64(1) << v
        for v in range(n):
            rv = rows[v]
            for c in range(k):
                counts[v, c] = popcount(rv & masks[c])
        for i in range(n):
            order[i] = i
        for i in range(1, n):
            x = order[i]
            j = i - 1
            while j >= 0 and _key_less(x, order[j], cell_of, counts, k):
                order[j + 1] = order[j]
                j -= 1
            order[j + 1] = x
        newk = 0
        scratch[order[0]] = 0
        for i in range(1, n):
            u = order[i - 1]
            v = order[i]
            if _key_less(u, v, cell_of, counts, k):
                newk += 1
            scratch[v] = newk
        newk += 1
        for v in range(n):
            cell_of[v] = scratch[v]
        if newk == k:
            break
        k = newk
    return k


@njit(cache=True)
def _relabel(n, rows, lab, out):
    for i in range(n):
        out[i] = 0
    for u in range(n):
        r = rows[u]
        lu = lab[u]
        for w in range(n):
            if (r >> w) & 1:
                out[lu] |= np.int64(1) << lab[w]


@njit(cache=True)
def _cmp_rows(n, a, b):
    for i in range(n):
        if a[i] != b[i]:
            return 1 if a[i] > b[i] else -1
    return 0


@njit(cache=True)
def _uf_find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@njit(cache=True)
def _uf_union(parent, a, b):
    ra = _uf_find(parent, a)
    rb = _uf_find(parent, b)
    if ra < rb:
        parent[rb] = ra
    elif rb < ra:
        parent[ra] = rb


@njit(cache=True)
def canon(n, rows, init_cell_of):
    """Canonical labelling by individualisation-refinement with automorphism pruning.

    Returns ``(lab, canon_rows, orbits, gens, ngens)`` where ``lab[v]`` is the
    canonical position of vertex ``v``, ``canon_rows`` the relabelled graph,
    ``orbits[v]`` the smallest vertex in the automorphism orbit of ``v`` and
    ``gens[:ngens]`` generators of the automorphism group (as vertex images).
    Among all leaves the one with lexicographically largest relabelled rows
    wins.
    """
    masks = np.zeros(n, np.int64)
    counts = np.zeros((n, n), np.int64)
    order = np.zeros(n, np.int64)
    scratch = np.zeros(n, np.int64)

    parts = np.zeros((n + 1, n), np.int64)
    tc = np.zeros((n + 1, n), np.int64)
    tcn = np.zeros(n + 1, np.int64)
    ti = np.zeros(n + 1, np.int64)
    explored = np.zeros((n + 1, n), np.int64)
    nexp = np.zeros(n + 1, np.int64)
    prefix = np.zeros(n + 1, np.int64)

    gens = np.zeros((8, n), np.int64)
    ngens = 0

    lab = np.zeros(n, np.int64)
    best = np.zeros(n, np.int64)
    best_lab = np.zeros(n, np.int64)
    best_prefix = np.zeros(n + 1, np.int64)
    best_depth = 0
    first = np.zeros(n, np.int64)
    first_lab = np.zeros(n, np.int64)
    first_prefix = np.zeros(n + 1, np.int64)
    first_depth = 0
    cur = np.zeros(n, np.int64)
    inv = np.zeros(n, np.int64)
    have_leaf = False

    for v in range(n):
        parts[0, v] = init_cell_of[v]
    k = refine(n, rows, parts[0], masks, counts, order, scratch)
    orbits = np.arange(n)
    if k == n:
        for v in range(n):
            best_lab[v] = parts[0, v]
        _relabel(n, rows, best_lab, best)
        return best_lab, best, orbits, gens, 0

    sizes = np.zeros(n, np.int64)
    visited = np.zeros(n, np.bool_)
    queue = np.zeros(n, np.int64)

    d = 0
    # target cell of the root
    for c in range(n):
        sizes[c] = 0
    for v in range(n):
        sizes[parts[0, v]] += 1
    t = 0
    while sizes[t] == 1:
        t += 1
    m = 0
    for v in range(n):
        if parts[0, v] == t:
            tc[0, m] = v
            m += 1
    tcn[0] = m
    ti[0] = 0
    nexp[0] = 0

    while d >= 0:
        if ti[d] >= tcn[d]:
            d -= 1
            continue
        v = tc[d, ti[d]]
        ti[d] += 1

        if nexp[d] > 0 and ngens > 0:
            # orbit of v under generators fixing the prefix pointwise
            for x in range(n):
                visited[x] = False
            visited[v] = True
            queue[0] = v
            qh = 0
            qt = 1
            while qh < qt:
                x = queue[qh]
                qh += 1
                for g in range(ngens):
                    fixes = True
                    for lvl in range(d):
                        if gens[g, prefix[lvl]] != prefix[lvl]:
                            fixes = False
                            break
                    if not fixes:
                        continue
                    y = gens[g, x]
                    if not visited[y]:
                        visited[y] = True
                        queue[qt] = y
                        qt += 1
            pruned = False
            for e in range(nexp[d]):
                if visited[explored[d, e]]:
                    pruned = True
                    break
            if pruned:
                continue

        explored[d, nexp[d]] = v
        nexp[d] += 1
        prefix[d] = v

        # individualise v and refine into level d+1
        cv = parts[d, v]
        for w in range(n):
            cw = parts[d, w]
            if cw > cv or (cw == cv and w != v):
                parts[d + 1, w] = cw + 1
            else:
                parts[d + 1, w] = cw
        k = refine(n, rows, parts[d + 1], masks, counts, order, scratch)

        if k < n:
            d += 1
            for c in range(n):
                sizes[c] = 0
            for w in range(n):
                sizes[parts[d, w]] += 1
            t = 0
            while sizes[t] == 1:
                t += 1
            m = 0
            for w in range(n):
                if parts[d, w] == t:
                    tc[d, m] = w
                    m += 1
            tcn[d] = m
            ti[d] = 0
            nexp[d] = 0
            continue

        # leaf at depth d (prefix[0..d])
        for w in range(n):
            lab[w] = parts[d + 1, w]
        _relabel(n, rows, lab, cur)
        if not have_leaf:
            have_leaf = True
            for w in range(n):
                first[w] = cur[w]
                first_lab[w] = lab[w]
                best[w] = cur[w]
                best_lab[w] = lab[w]
            for lvl in range(d + 1):
                first_prefix[lvl] = prefix[lvl]
                best_prefix[lvl] = prefix[lvl]
            first_depth = d
            best_depth = d
            continue

        jump = -1
        for which in range(2):
            if which == 0:
                same = _cmp_rows(n, cur, first) == 0
            else:
                same = _cmp_rows(n, cur, best) == 0
            if not same:
                continue
            # automorphism w -> ref_lab^{-1}(lab(w))
            for w in range(n):
                if which == 0:
                    inv[first_lab[w]] = w
                else:
                    inv[best_lab[w]] = w
            if ngens == gens.shape[0]:
                bigger = np.zeros((2 * ngens, n), np.int64)
                bigger[:ngens] = gens
                gens = bigger
            ident = True
            for w in range(n):
                gens[ngens, w] = inv[lab[w]]
                if gens[ngens, w] != w:
                    ident = False
            if not ident:
                ngens += 1
            # jump back to the deepest common ancestor with the reference path
            common = 0
            if which == 0:
                lim = min(d, first_depth) + 1
                while common < lim and prefix[common] == first_prefix[common]:
                    common += 1
            else:
                lim = min(d, best_depth) + 1
                while common < lim and prefix[common] == best_prefix[common]:
                    common += 1
            jump = common
            break

        if jump < 0 and _cmp_rows(n, cur, best) > 0:
            for w in range(n):
                best[w] = cur[w]
                best_lab[w] = lab[w]
            for lvl in range(d + 1):
                best_prefix[lvl] = prefix[lvl]
            best_depth = d
        if jump >= 0 and jump < d:
            d = jump

    for g in range(ngens):
        for w in range(n):
            _uf_union(orbits, w, gens[g, w])
    for w in range(n):
        orbits[w] = _uf_find(orbits, w)
    return best_lab, best, orbits, gens, ngens


@njit(cache=True, nogil=True)
def canon_rows_batch(graphs, n):
    """Canonical relabelled rows for every graph in a ``(m, n)`` batch."""
    m = graphs.shape[0]
    out = np.zeros((m, n), np.int64)
    init = np.zeros(n, np.int64)
    for i in range(m):
        _, cr, _, _, _ = canon(n, graphs[i], init)
        out[i] = cr
    return out


# ---------------------------------------------------------------------------
# canonical augmentation (one new vertex)
# ---------------------------------------------------------------------------

@njit(cache=True)
def _apply_perm_mask(perm, mask, n):
    out = 0
    for u in range(n):
        if (mask >> u) & 1:
            out |= np.int64(1) << perm[u]
    return out


@njit(cache=True, nogil=True)
def extend_by_vertex(parents, n0):
    """Children of ``parents`` (one per isomorphism class of order ``n0``).

    Uses canonical augmentation: neighbourhood sets of the new vertex are
    taken up to the parent's automorphism group, and a child is accepted iff
    the new vertex lies in the orbit of the canonically chosen deletion
    vertex (the max-degree vertex with smallest canonical label).  Each class
    of order ``n0 + 1`` whose deletion-vertex removal lands in ``parents`` is
    produced exactly once.
    """
    n = n0 + 1
    m = parents.shape[0]
    nm = np.int64(1) << n0
    cap = max(16, m * 4)
    out = np.zeros((cap, n), np.int64)
    cnt = 0
    uf = np.zeros(nm, np.int64)
    child = np.zeros(n, np.int64)
    deg = np.zeros(n, np.int64)
    init = np.zeros(n, np.int64)
    init0 = np.zeros(n0, np.int64)
    for pi in range(m):
        prow = parents[pi]
        for x in range(nm):
            uf[x] = x
        if n0 > 0:
            _, _, _, pg, npg = canon(n0, prow, init0)
            for g in range(npg):
                for x in range(nm):
                    _uf_union(uf, x, _apply_perm_mask(pg[g], x, n0))
        for mask in range(nm):
            if _uf_find(uf, mask) != mask:
                continue
            for u in range(n0):
                child[u] = prow[u]
                if (mask >> u) & 1:
                    child[u] |= np.int64(1) << n0
            child[n0] = mask
            maxdeg = 0
            nmax = 0
            for u in range(n):
                deg[u] = popcount(child[u])
                if deg[u] > maxdeg:
                    maxdeg = deg[u]
                    nmax = 1
                elif deg[u] == maxdeg:
                    nmax += 1
            if deg[n0] != maxdeg:
                continue
            accept = True
            if nmax > 1:
                lab, _, orbits, _, _ = canon(n, child, init)
                w = -1
                for u in range(n):
                    if deg[u] == maxdeg and (w < 0 or lab[u] < lab[w]):
                        w = u
                accept = orbits[w] == orbits[n0]
            if accept:
                if cnt == out.shape[0]:
                    bigger = np.zeros((2 * cnt, n), np.int64)
                    bigger[:cnt] = out
                    out = bigger
                out[cnt] = child
                cnt += 1
    return out[:cnt].copy()


# ---------------------------------------------------------------------------
# fixed-width arithmetic for the census map phase
# ---------------------------------------------------------------------------

@njit(cache=True)
def charpoly_i64(a):
    """Berkowitz characteristic polynomial, highest degree first.

    Exact in int64 for 0/1 matrices of order <= MAX_FAST_ORDER (intermediate
    values stay below 1e16).
    """
    n = a.shape[0]
    vect = np.zeros(n + 1, np.int64)
    vect[0] = 1
    vect[1] = -a[0, 0]
    col = np.zeros(n + 1, np.int64)
    tmp = np.zeros(n, np.int64)
    tmp2 = np.zeros(n, np.int64)
    newv = np.zeros(n + 1, np.int64)
    for k in range(1, n):
        # leading principal block of order k, row R = a[k, :k], column C = a[:k, k]
        col[0] = 1
        col[1] = -a[k, k]
        for i in range(k):
            tmp[i] = a[i, k]
        for j in range(k):
            s = 0
            for i in range(k):
                s += a[k, i] * tmp[i]
            col[j + 2] = -s
            if j + 1 < k:
                for i in range(k):
                    acc = 0
                    for l in range(k):
                        acc += a[i, l] * tmp[l]
                    tmp2[i] = acc
                for i in range(k):
                    tmp[i] = tmp2[i]
        # Toeplitz product: new[i] = sum_{j<=i} col[i-j] * vect[j]
        for i in range(k + 2):
            acc = 0
            for j in range(min(i, k) + 1):
                acc += col[i - j] * vect[j]
            newv[i] = acc
        for i in range(k + 2):
            vect[i] = newv[i]
    return vect


@njit(cache=True)
def _to_dense(rows, n, complement):
    a = np.zeros((n, n), np.int64)
    for u in range(n):
        for w in range(n):
            if u != w:
                bit = (rows[u] >> w) & 1
                a[u, w] = 1 - bit if complement else bit
    return a


@njit(cache=True)
def _inv_mod(a, p):
    t0, t1 = 0, 1
    r0, r1 = p, a % p
    while r1 != 0:
        q = r0 // r1
        t0, t1 = t1, t0 - q * t1
        r0, r1 = r1, r0 - q * r1
    return t0 % p


@njit(cache=True)
def _det_mod(w, n, p, work):
    for i in range(n):
        for j in range(n):
            work[i, j] = w[i, j] % p
    det = 1
    for c in range(n):
        piv = -1
        for r in range(c, n):
            if work[r, c] != 0:
                piv = r
                break
        if piv < 0:
            return 0
        if piv != c:
            for j in range(n):
                t = work[c, j]
                work[c, j] = work[piv, j]
                work[piv, j] = t
            det = p - det
        det = det * work[c, c] % p
        inv = _inv_mod(work[c, c], p)
        for r in range(c + 1, n):
            f = work[r, c] * inv % p
            if f != 0:
                for j in range(c, n):
                    work[r, j] = (work[r, j] - f * work[c, j]) % p
    return det


@njit(cache=True)
def controllable_mod(a):
    """Exact test det(W) != 0 by multi-modular elimination.

    The walk matrix W = [e, Ae, ..., A^{n-1}e] fits in int64 for
    n <= MAX_FAST_ORDER.  A nonzero residue proves det != 0; vanishing modulo
    primes whose product exceeds twice the Hadamard bound proves det == 0.
    """
    n = a.shape[0]
    w = np.zeros((n, n), np.int64)
    for i in range(n):
        w[i, 0] = 1
    for k in range(1, n):
        for i in range(n):
            s = 0
            for j in range(n):
                s += a[i, j] * w[j, k - 1]
            w[i, k] = s
    log2_bound = 0.0
    for k in range(n):
        ss = 0.0
        for i in range(n):
            ss += float(w[i, k]) * float(w[i, k])
        log2_bound += 0.5 * np.log2(ss)
    need_bits = log2_bound + 2.0
    work = np.zeros((n, n), np.int64)
    bits = 0.0
    for pi in range(PRIMES.shape[0]):
        p = PRIMES[pi]
        if _det_mod(w, n, p, work) != 0:
            return True
        bits += np.log2(float(p)) - 1e-9
        if bits > need_bits:
            return False
    raise ValueError("prime pool too small for this order")


@njit(cache=True, nogil=True)
def census_map(graphs, n):
    """Per-graph generalized-spectrum key and controllability.

    Returns ``keys`` of shape ``(m, 2n+2)`` (charpoly of A then of the
    complement, highest degree first) and a boolean controllability array.
    """
    m = graphs.shape[0]
    keys = np.zeros((m, 2 * n + 2), np.int64)
    ctrl = np.zeros(m, np.bool_)
    for i in range(m):
        a = _to_dense(graphs[i], n, False)
        keys[i, : n + 1] = charpoly_i64(a)
        keys[i, n + 1:] = charpoly_i64(_to_dense(graphs[i], n, True))
        ctrl[i] = controllable_mod(a)
    return keys, ctrl
