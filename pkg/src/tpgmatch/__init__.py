"""Inexact subgraph matching with contextual similarities on tensor product graphs.

Pairwise node and edge affinities are diffused by random or backtrackless
walks on the product of the pattern and target graphs, then node and edge
correspondences are picked by a box-constrained LP and rounded with the
Hungarian method.
"""
from .affinity import AffinityConfig, build_affinity_matrix, qap_objective
from .bench import SyntheticConfig, gen_synthetic_pair, run_sweep
from .context import ContextualSimilarity, contextual_similarity
from .errors import (AffinityError, ConfigError, GraphError, SizeCapError, SolverError,
                     TPGMatchError)
from .graph import AttributedGraph
from .io import load_graph, save_graph
from .matcher import MatchConfig, MatchResult, match
from .optim import LinearProgram, hungarian_max, lp_solve
from .product_graph import ProductGraph, build_product_graph

__version__ = "0.1.0"

__all__ = [
    "AffinityConfig", "AffinityError", "AttributedGraph", "ConfigError", "ContextualSimilarity",
    "GraphError", "LinearProgram", "MatchConfig", "MatchResult", "ProductGraph", "SizeCapError",
    "SolverError", "SyntheticConfig", "TPGMatchError", "build_affinity_matrix",
    "build_product_graph", "contextual_similarity", "gen_synthetic_pair", "hungarian_max",
    "load_graph", "lp_solve", "match", "qap_objective", "run_sweep", "save_graph",
]
