"""Counting, bounding and estimating Eulerian orientations of even-degree graphs."""

__version__ = "0.1.0"

from .graph import (  # noqa: E402
    Graph,
    circulant,
    complete,
    complete_bipartite,
    connected_components,
    cycle,
    degree_sequence,
    is_all_even,
    parse_edge_list,
    random_even_graph,
)
from .exact import eo_count, eo_count_backtrack, eo_count_dp  # noqa: E402
from .spectral import (  # noqa: E402
    algebraic_connectivity,
    det_qhat_exact,
    laplacian,
    qhat,
    spanning_tree_count,
)
from .estimator import LogNumber, isaev_knn, mckay_kn, regular_bounds, theta_estimate  # noqa: E402
from .montecarlo import McResult, gaussian_norm_check, mc_Int_gaussian, mc_S_uniform  # noqa: E402
