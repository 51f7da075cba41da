"""Learned vertex pruning for maximum clique enumeration."""

from .graph import Graph, gen_gnp, induced_subgraph, load_edge_list, plant_clique, planted_gnp
from .mce import clique_number, enumerate_maximal_cliques, enumerate_maximum_cliques
from .orbits import count_orbits

__version__ = "0.1.0"

__all__ = [
    "Graph", "clique_number", "count_orbits", "enumerate_maximal_cliques",
    "enumerate_maximum_cliques", "gen_gnp", "induced_subgraph", "load_edge_list",
    "plant_clique", "planted_gnp",
]
