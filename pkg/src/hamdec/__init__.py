"""hamdec: edge-disjoint Hamilton cycles in dense regular oriented graphs.

Construction side: regular-factor extraction, subproblem partitioning,
matching-based path covers, and reservoir splicing of covers into verified
edge-disjoint Hamilton cycles.  Counting side: exact permanents and
Hamilton-decomposition counts at tiny sizes, sandwiched between the standard
matching bounds.
"""

from .graphs import (
    BipartiteGraph,
    DegreeSummary,
    OrientedGraph,
    bipartite_between,
    build_oriented,
    degree_summary,
    random_oriented,
    read_edge_list,
    remove_edges,
    rotational_tournament,
    write_edge_list,
)
from .factors import (
    FactorCertificate,
    Matching,
    MatchingFamily,
    extract_bipartite_r_factor,
    extract_oriented_r_factor,
    gale_ryser_oracle,
    has_bipartite_r_factor,
    oriented_reg,
    pm_decompose_regular,
    sample_matching_family,
)
from .counting import (
    BoundReport,
    LogCount,
    bregman_bound,
    bregman_maxdeg_bound,
    count_hamilton_cycles_exact,
    count_hamilton_decompositions_exact,
    decomposition_upper_bound,
    permanent,
    vdw_bound,
)
from .pathcovers import (
    DirectedPath,
    HamPathDecomposition,
    PathCover,
    PathCoverFamily,
    build_path_cover_family,
    complete_digraph_path_decomposition,
    matchings_to_path_cover,
)
from .assembly import (
    Connectors,
    HamiltonCycle,
    complete_cover_to_cycle,
    complete_family_to_cycles,
    hamilton_path_between,
)
from .partition import PartitionReport, SubproblemSpec, build_partition, verify_partition
from .pipeline import (
    DecompositionCertificate,
    RunConfig,
    RunReport,
    approximate_decomposition,
    sandwich_experiment,
    verify_certificate,
)

__version__ = "0.1.0"
