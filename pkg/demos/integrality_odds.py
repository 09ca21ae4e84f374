"""How likely is Q^T A Q to be an integer matrix for a random graph A?"""
from fractions import Fraction

from cospectral.ortho import embed, rotation_345
from cospectral.problab import (
    integrality_probability_exact,
    integrality_probability_mc,
    lemma_bound,
    relevant_variables,
    theorem_tail,
)
from cospectral.switching import GMPartition, gm_matrix

fixtures = {
    "rotation 3-4-5 in I_3": embed(rotation_345(), 3),
    "GM block m=4 in I_6": gm_matrix(GMPartition.single(range(4), 6), 6),
    "GM block m=6 in I_6": gm_matrix(GMPartition.single(range(6), 6), 6),
}
for name, q in fixtures.items():
    print(name, f"({len(relevant_variables(q))} edges matter)")
    for p in (0.3, 0.5, 0.7):
        exact = integrality_probability_exact(q, Fraction(str(p)))
        est = integrality_probability_mc(q, p, 100_000, seed=7)
        lo, hi = est.wilson_interval_95
        print(f"  p={p}: exact {float(exact):.5f}  mc {est.point_estimate:.5f} [{lo:.5f}, {hi:.5f}]"
              f"  bound {lemma_bound(len(q), est.s, est.h, p):.5f}")

print("\nlog of the tail sum for h=2, p=1/2")
for e in (3, 4, 4.5, 5, 5.5, 6, 7):
    n = round(10 ** e)
    r = theorem_tail(n, 2, 0.5)
    print(f"  n=10^{e:<4} log tail {r.log_tail:>14.2f}   geometric bound applies: {r.geometric_applies}")
