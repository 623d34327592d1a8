"""Threshold graph products of regular graphs: construction, closed-form
spectra, eigenvalue bounds, edge discrepancy and cospectral template families."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BudgetExceeded,
    CapExceeded,
    GraphError,
    InfeasibleDegree,
    NotBipartite,
    NotRegular,
    NotSimple,
    NotSymmetric,
    PremiseNotMet,
    ValidationError,
)
from .eigen import Spectrum, eigenvalues, eigh, jacobi_eigh  # noqa: E402
from .graphs import (  # noqa: E402
    BipartiteRegularGraph,
    RegularGraph,
    complete_bipartite,
    complete_graph,
    cycle_graph,
    from_edges,
    random_bipartite_regular,
    random_regular,
    read_edgelist,
    validate,
    write_edgelist,
)
from .product import (  # noqa: E402
    ProductGraph,
    Template,
    bgp,
    bgp_template,
    build,
    degree_bgp,
    degree_gp,
    gp,
    sgp,
    sgp_adjacency_tensor,
    template_classes,
)
from .spectral import (  # noqa: E402
    GpEigenBasis,
    alpha,
    gp_spectrum,
    lambda_bgp,
    lambda_bounds,
    lambda_gp,
    psi,
    sgp_spectrum,
)
from .mixing import edge_count, eml_check, expected_edges, jumbledness_scan, relative_error_report  # noqa: E402
from .cospectral import (  # noqa: E402
    cospectral_certify,
    cospectral_family,
    count_walks_enumerate,
    count_walks_trace,
    nonisomorphism_witness,
    verify_walk_lemma,
)
