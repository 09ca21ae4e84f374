"""Exact tools for cospectral graph pairs: transition-matrix levels and heights,
canonical forms of bounded-height rational orthogonal matrices, Godsil-McKay
switching and the integrality-probability bounds."""

from .census import CensusReport, MatePair, gen_spectrum_key, run_census, transition_matrix
from .graph import Graph, certificate, complement, enumerate_graphs, parse_graph6, to_graph6
from .linalg import charpoly, det, is_controllable, level_and_height, rat_inverse, verify_transition, walk_matrix
from .ortho import canonicalize, counting_bound, enumerate_canonical_blocks, fractional_profile, greedy_select
from .problab import (
    GnpSpec,
    integrality_probability_exact,
    integrality_probability_mc,
    lemma_bound,
    sample_gnp,
    theorem_tail,
)
from .switching import GMPartition, find_gm_partitions, gm_matrix, gm_switch, is_gm_partition

__all__ = [
    "CensusReport", "GMPartition", "Graph", "GnpSpec", "MatePair",
    "canonicalize", "certificate", "charpoly", "complement", "counting_bound", "det",
    "enumerate_canonical_blocks", "enumerate_graphs", "find_gm_partitions",
    "fractional_profile", "gen_spectrum_key", "gm_matrix", "gm_switch", "greedy_select",
    "integrality_probability_exact", "integrality_probability_mc", "is_controllable",
    "is_gm_partition", "lemma_bound", "level_and_height", "parse_graph6", "rat_inverse",
    "run_census", "sample_gnp", "theorem_tail", "to_graph6", "transition_matrix",
    "verify_transition", "walk_matrix",
]
