"""Canonical forms of bounded-height rational orthogonal matrices, the greedy
index selection, and how few small blocks actually exist."""
import random

from cospectral.linalg import block_diag, matmul
from cospectral.ortho import (
    canonicalize,
    counting_bound,
    embed,
    enumerate_canonical_blocks,
    greedy_select,
    rotation_345,
    signed_permutation,
    supports_and_overlaps,
)

rnd = random.Random(1)
r = rotation_345()
q = embed(block_diag(r, r), 7)
p = signed_permutation(rnd.sample(range(7), 7), [rnd.choice((1, -1)) for _ in range(7)])
p2 = signed_permutation(rnd.sample(range(7), 7), [rnd.choice((1, -1)) for _ in range(7)])
scrambled = matmul(matmul(p, q), p2)
print("scrambled matrix:")
for row in scrambled:
    print("  ", " ".join(f"{str(x):>5}" for x in row))

cf = canonicalize(scrambled)
print(f"canonical form: s={cf.s}, h={cf.h}, round trip ok: {cf.reconstruct() == scrambled}")
for row in cf.q_s:
    print("  ", " ".join(f"{str(x):>5}" for x in row))

K, N = supports_and_overlaps(cf)
sel = greedy_select(cf)
print("supports:", {j: sorted(v) for j, v in K.items()})
print("I =", sel.i_set, " J =", sel.j_set, " disjointness ok:", sel.check())

print("\ncanonical blocks found vs the counting bound")
for s, h in [(2, 4), (2, 5), (3, 3), (4, 2), (4, 3), (4, 5)]:
    print(f"  s={s} h={h}: {len(enumerate_canonical_blocks(s, h)):>6}   bound has "
          f"{len(str(counting_bound(s, h)))} digits")
