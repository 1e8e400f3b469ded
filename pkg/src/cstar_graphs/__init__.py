"""Graph C*-algebra invariants for finite weighted undirected graphs."""
from .graph_core import (
    DirectedGraph,
    Edge,
    GraphClassification,
    PerronData,
    WeightedUndirectedGraph,
    bouquet,
    cycle_graph,
    directify,
    edge_matrix,
    path_graph,
    perron_data,
    structure_set,
    validate,
    vertex_matrix,
)
from .int_linalg import AbelianGroup, k_theory_cuntz_krieger, k_theory_free_graph, smith_normal_form

__version__ = "0.1.0"

__all__ = [
    "AbelianGroup",
    "DirectedGraph",
    "Edge",
    "GraphClassification",
    "PerronData",
    "WeightedUndirectedGraph",
    "bouquet",
    "cycle_graph",
    "directify",
    "edge_matrix",
    "k_theory_cuntz_krieger",
    "k_theory_free_graph",
    "path_graph",
    "perron_data",
    "smith_normal_form",
    "structure_set",
    "validate",
    "vertex_matrix",
]
