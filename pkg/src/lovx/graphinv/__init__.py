"""Graphs, catalogued extensions and combinatorial invariants with their
continuous ratio representations."""

from .catalog import CATALOG, PAIR_ROWS, SET_ROWS, functional_catalog
from .cheeger import (VARIANTS, cheeger, cheeger_form, cheeger_like, cheeger_like_form, cheeger_problem,
                      companion_form, p1_quotient, poincare_profile_check)
from .graph import (Graph, complete, complete_bipartite, corpus, cycle, disjoint_union, empty, path,
                    random_graph, star, triangle_flower, wheel)
from .invariants import (InvariantResult, chromatic_extension, chromatic_number, chromatic_objective,
                         chromatic_objective_intro, clique_cover_number, clique_number, coloring_function,
                         coloring_matrix, coloring_value, independence_number, independence_objective,
                         independence_problem, k_independence_number, kcut_ratio, matching_number,
                         matching_ratio, max_kcut, partition_matrix, quadratic_independence_ratio)
from .relax import multiway_partition, submodular_vertex_cover

__all__ = [name for name in dir() if not name.startswith("_")]
