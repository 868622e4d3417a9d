"""pathcut: Force Path Cut solvers with attention-guided subgraph acceleration."""

from .graph import (
    EMPTY_MASK,
    EdgeMask,
    GraphError,
    ParseError,
    Path,
    PathQuery,
    ValidationError,
    WeightedGraph,
    induced_subgraph,
    is_path_valid,
    load_edge_list,
    load_instance,
    path_length,
    save_edge_list,
    save_instance,
)
from .paths import HAVE_SPEEDUPS, ShortestPathTree, dijkstra, k_shortest_paths, shortest_path

__version__ = "0.1.0"

__all__ = [
    "EMPTY_MASK",
    "EdgeMask",
    "GraphError",
    "ParseError",
    "Path",
    "PathQuery",
    "ValidationError",
    "WeightedGraph",
    "induced_subgraph",
    "is_path_valid",
    "load_edge_list",
    "load_instance",
    "path_length",
    "save_edge_list",
    "save_instance",
    "HAVE_SPEEDUPS",
    "ShortestPathTree",
    "dijkstra",
    "k_shortest_paths",
    "shortest_path",
    "__version__",
]
