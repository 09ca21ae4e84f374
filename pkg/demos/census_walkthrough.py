"""Find controllable generalized-cospectral mates and their transition matrices."""
import sys
from collections import Counter

from cospectral.census import gen_spectrum_key, run_census
from cospectral.graph import to_graph6
from cospectral.linalg import det, is_controllable, walk_matrix

n = int(sys.argv[1]) if len(sys.argv) > 1 else 8

report = run_census(n)
print(f"order {n}: {report.class_count} classes, {report.controllable_count} controllable")
print(f"{report.pair_count} mate pairs, max level {report.l_max}, max height {report.h_max}")

if report.pairs:
    p = report.pairs[0]
    print("\nfirst pair:", to_graph6(p.g), to_graph6(p.h))
    key = gen_spectrum_key(p.g)
    print("  charpoly A      :", key.p_a)
    print("  charpoly of comp:", key.p_comp)
    print("  det W(g) =", det(walk_matrix(p.g)), " controllable:", is_controllable(p.g))
    print("  Q (level %d, height %d):" % (p.level, p.height))
    for row in p.q:
        print("   ", " ".join(f"{str(x):>5}" for x in row))
    print("  exact re-verification (Q^T Q = I, Q^T A_g Q = A_h, Qe = e):", p.verify())

    print("\npairs by (level, height):")
    for (lv, ht), c in sorted(Counter((q.level, q.height) for q in report.pairs).items()):
        print(f"  level {lv:>3} height {ht:>3}: {c}")
