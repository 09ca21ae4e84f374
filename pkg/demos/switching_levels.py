"""Godsil-McKay switching: a cospectral pair at order 8, and prime-sized blocks
whose switching matrix has huge level but small height."""
from cospectral.graph import certificate, parse_graph6, to_graph6
from cospectral.linalg import adjacency_matrix, charpoly, level_and_height, verify_transition
from cospectral.switching import GMPartition, find_gm_partitions, gm_matrix, gm_switch, prime_block_table

g = parse_graph6("G?BDb_")
print("graph", to_graph6(g))
for part in find_gm_partitions(g, 4):
    if len(part.blocks[0]) < 4:
        continue
    h = gm_switch(g, part)
    tag = "same class" if certificate(h) == certificate(g) else "NEW MATE"
    print(f"  block {sorted(part.blocks[0])}: -> {to_graph6(h)}  {tag}")

part = GMPartition.single([0, 1, 2, 4], 8)
h = gm_switch(g, part)
q = gm_matrix(part, 8)
print("charpoly kept:", charpoly(adjacency_matrix(g)) == charpoly(adjacency_matrix(h)))
print("Q^T A_g Q = A_h:", verify_transition(q, adjacency_matrix(g), adjacency_matrix(h)))
print("level, height:", level_and_height(q))

print("\nblocks of size 2p over the first t primes")
print("  t    n        level  height")
for t, n, lv, ht in prime_block_table(8):
    print(f"  {t}  {n:>3}  {lv:>11}  {ht:>6}")
