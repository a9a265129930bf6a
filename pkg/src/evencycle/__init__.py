"""Executable machinery for bounding the edges of graphs without a 2k-cycle."""

from .graph import (
    BipartiteView,
    Graph,
    GraphFormatError,
    LayerDecomposition,
    TrilayeredView,
    bfs_layers,
    bipartite_half,
    degree_stats,
    induced,
    load_edge_list,
    trilayer,
)
from .oracle import (
    BudgetExceeded,
    SearchBudget,
    find_c2k_exact,
    find_theta_exact,
    find_well_placed_theta_exact,
    girth,
)
from .theta import (
    ThetaCertificate,
    ThetaInvariantError,
    ThetaPreconditionError,
    find_theta_avg_degree,
    find_theta_min_degree,
    peel_min_degree,
    verify_theta,
    verify_well_placed,
)

__version__ = "0.1.0"
