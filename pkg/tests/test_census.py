import json
import random
from collections import Counter
from fractions import Fraction

import pytest
import sympy as sp

from cospectral.census import (
    CSV_HEADER,
    CensusReport,
    MatePair,
    OrderMismatchError,
    SingularWalkMatrixError,
    census_shard,
    gen_spectrum_key,
    merge_shards,
    report_from_shard,
    run_census,
    transition_matrix,
)
from cospectral.graph import (
    Graph,
    certificate,
    complement,
    cycle,
    disjoint_union,
    enumerate_graphs,
    parse_graph6,
    star,
    to_graph6,
    write_graph6_file,
)
from cospectral.linalg import adjacency_matrix, is_controllable, level_and_height
from cospectral.ortho import signed_permutation

X = sp.Symbol("x")


def oracle_charpoly(g):
    a = sp.Matrix(adjacency_matrix(g))
    return tuple(int(c) for c in sp.Poly((X * sp.eye(g.n) - a).det(method="laplace"), X).all_coeffs())


def pair_multiset(report):
    return Counter(
        (frozenset((certificate(p.g), certificate(p.h))), p.level, p.height) for p in report.pairs
    )


def first_controllable(n, skip=0):
    return [g for g in enumerate_graphs(n) if is_controllable(g)][skip]


class TestKey:
    def test_single_vertex(self):
        k = gen_spectrum_key(Graph.empty(1))
        assert k.p_a.coeffs == k.p_comp.coeffs == (1, 0)

    def test_relabel(self):
        g = first_controllable(7)
        assert gen_spectrum_key(g) == gen_spectrum_key(g.relabel([6, 5, 4, 3, 2, 1, 0]))

    def test_classic_pair_is_not_generalized_cospectral(self):
        g, h = disjoint_union(cycle(4), Graph.empty(1)), star(4)
        kg, kh = gen_spectrum_key(g), gen_spectrum_key(h)
        assert kg.p_a == kh.p_a
        assert kg.p_comp.coeffs == oracle_charpoly(complement(g))
        assert kh.p_comp.coeffs == oracle_charpoly(complement(h))
        assert (kg.p_comp == kh.p_comp) == (oracle_charpoly(complement(g)) == oracle_charpoly(complement(h)))
        assert kg.p_comp != kh.p_comp


class TestTransition:
    def test_self(self):
        g = first_controllable(6)
        q = transition_matrix(g, g)
        assert q == tuple(tuple(Fraction(int(i == j)) for j in range(6)) for i in range(6))

    @pytest.mark.parametrize("seed", range(5))
    def test_relabel_gives_permutation(self, seed):
        rnd = random.Random(seed)
        g = first_controllable(7, seed)
        perm = list(range(7))
        rnd.shuffle(perm)
        h = g.relabel(perm)
        q = transition_matrix(g, h)
        assert level_and_height(q) == (1, 1)
        # h's vertex perm[u] is g's vertex u, so A_h = P^T A_g P with P[u][perm[u]] = 1
        p = signed_permutation([perm.index(j) for j in range(7)])
        assert q == tuple(tuple(Fraction(x) for x in row) for row in p)

    def test_singular(self):
        with pytest.raises(SingularWalkMatrixError):
            transition_matrix(cycle(5), cycle(5))

    def test_non_mates(self):
        g, h = first_controllable(7, 0), first_controllable(7, 1)
        assert transition_matrix(g, h) is None

    def test_first_pair_at_eight(self, census8):
        p = census8.pairs[0]
        assert (p.g, p.h) == (parse_graph6("G?`ebw"), parse_graph6("G?bBvG"))
        q = transition_matrix(p.g, p.h)
        assert q == p.q
        assert (p.level, p.height) == level_and_height(q)
        assert max(pp.level for pp in census8.pairs) == 3

    def test_bucket_path_agrees_with_rational_solve(self, census8):
        # the census derives Q in scaled integers; solving afresh must agree
        for p in census8.pairs:
            assert transition_matrix(p.g, p.h) == p.q


class TestMatePair:
    def test_invariants(self):
        g = first_controllable(6)
        ident = transition_matrix(g, g)
        with pytest.raises(ValueError):
            MatePair(g, g, ident, 1, 1)

    def test_json_round_trip(self, census8):
        for p in census8.pairs[:20]:
            back = MatePair.from_json(json.loads(json.dumps(p.to_json())))
            assert back == p and back.verify()

    def test_soundness_at_eight(self, census8):
        assert all(p.verify() for p in census8.pairs)


class TestReport:
    def test_invariants(self):
        with pytest.raises(ValueError):
            CensusReport(3, 4, 0, 0, 2, None)
        with pytest.raises(ValueError):
            CensusReport(3, 4, 0, 1, 2, 3)
        r = CensusReport(3, 4, 0, 0, None, None)
        assert r.csv_row() == "3,4,0,0,NaN,NaN"
        assert CSV_HEADER == "n,classes,controllable,pairs,l_max,h_max"

    @pytest.mark.parametrize("n,classes,ctrl", [(1, 1, 1), (2, 2, 0), (3, 4, 0), (4, 11, 0), (5, 34, 0), (6, 156, 8), (7, 1044, 92)])
    def test_small_orders(self, n, classes, ctrl):
        r = run_census(n, jobs=1)
        assert (r.class_count, r.controllable_count, r.pair_count) == (classes, ctrl, 0)
        assert r.l_max is None and r.h_max is None

    def test_order_eight(self, census8):
        r = census8
        assert (r.class_count, r.controllable_count, r.pair_count, r.l_max, r.h_max) == (12346, 2332, 108, 3, 3)
        assert r.anomalies == [] and r.one_sided_pairs == 0
        assert r.csv_row() == "8,12346,2332,108,3,3"

    def test_order_and_labelling_invariance(self, census8):
        rnd = random.Random(8)
        gs = list(enumerate_graphs(8))
        rnd.shuffle(gs)
        gs = [g.relabel(rnd.sample(range(8), 8)) for g in gs]
        r = run_census(8, gs, jobs=2, chunk=1000)
        assert (r.l_max, r.h_max, r.pair_count, r.controllable_count) == (3, 3, 108, 2332)
        assert pair_multiset(r) == pair_multiset(census8)

    def test_bucketing_soundness(self):
        # every bucket member shares both polynomials; distinct buckets differ
        gs = list(enumerate_graphs(7))
        keys = {}
        for g in gs:
            keys.setdefault(gen_spectrum_key(g), []).append(g)
        shard = census_shard(7, gs, jobs=1)
        assert sum(len(m) for m in shard["buckets"].values()) == 1044
        assert sorted(len(m) for m in shard["buckets"].values()) == sorted(len(m) for m in keys.values())

    def test_file_source_and_mismatch(self, tmp_path):
        f = tmp_path / "g7.g6"
        write_graph6_file(f, enumerate_graphs(7))
        r = run_census(7, str(f), jobs=1)
        assert r.csv_row() == "7,1044,92,0,NaN,NaN"
        with pytest.raises(OrderMismatchError):
            run_census(8, str(f), jobs=1)

    def test_streamed_pairs_match(self, census8):
        seen = []
        r = run_census(8, jobs=1, pair_sink=seen.append)
        assert r.pairs == [] and r.pair_count == 108 and (r.l_max, r.h_max) == (3, 3)
        key = lambda p: (to_graph6(p.g), to_graph6(p.h))  # noqa: E731
        assert sorted(seen, key=key) == sorted(census8.pairs, key=key)

    def test_range(self):
        with pytest.raises(ValueError):
            run_census(11)


class TestShards:
    def test_merge_equals_single_run(self, tmp_path, census8):
        gs = list(enumerate_graphs(8))
        a, b = tmp_path / "a.g6", tmp_path / "b.g6"
        write_graph6_file(a, gs[::2])
        write_graph6_file(b, gs[1::2])
        sa = json.loads(json.dumps(census_shard(8, str(a), jobs=1)))
        sb = json.loads(json.dumps(census_shard(8, str(b), jobs=1)))
        merged = report_from_shard(merge_shards([sa, sb]))
        assert merged.csv_row() == census8.csv_row()
        assert [p.to_json() for p in merged.pairs] == [p.to_json() for p in census8.pairs]
        assert merge_shards([sa, sb]) == merge_shards([sb, sa])

    def test_merge_order_mismatch(self):
        with pytest.raises(OrderMismatchError):
            merge_shards([census_shard(5, jobs=1), census_shard(6, jobs=1)])
