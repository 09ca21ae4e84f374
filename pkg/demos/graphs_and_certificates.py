"""Graph6 round trips, canonical certificates and isomorph-free enumeration."""
import time

from cospectral.graph import (
    Graph,
    canonical_form,
    certificate,
    complement,
    cycle,
    disjoint_union,
    enumerate_graphs,
    parse_graph6,
    star,
    to_graph6,
)

# The classic smallest cospectral pair: C4 plus an isolated vertex, and the star K_{1,4}.
g = disjoint_union(cycle(4), Graph.empty(1))
h = star(4)
print("C4+K1  ", to_graph6(g), "edges", g.edges())
print("K_{1,4}", to_graph6(h), "edges", h.edges())
print("same certificate?", certificate(g) == certificate(h))

# Relabelling never changes the canonical form.
shuffled = g.relabel([3, 0, 4, 1, 2])
print("relabelled", to_graph6(shuffled), "-> canonical", to_graph6(canonical_form(shuffled)),
      "=", to_graph6(canonical_form(g)))

print("complement of C4+K1:", complement(g).edges())
print("parse 'A_' ->", parse_graph6("A_").edges())

for n in range(1, 10):
    t = time.perf_counter()
    count = sum(1 for _ in enumerate_graphs(n))
    print(f"n={n}: {count:>7} classes  ({time.perf_counter() - t:.2f}s)")
