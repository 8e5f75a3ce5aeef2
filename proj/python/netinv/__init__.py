"""Forward and inverse problems on graphs with matrix-valued edge and node weights."""

from ._core import (
    ElasticNetwork,
    Error,
    Graph,
    InadmissibleParameter,
    InvalidArgument,
    ProblemSpec,
    SingularSystem,
    classify_regime,
    conductivity_spec,
    dtn,
    edge_parameters,
    floppy_modes,
    gradient_matrix,
    load_network,
    masses_known_springs_spec,
    node_parameters,
    operator_matrix,
    schrodinger_spec,
    solve_dirichlet,
    springs_known_masses_spec,
    static_springs_spec,
)

__all__ = [
    "ElasticNetwork",
    "Error",
    "Graph",
    "InadmissibleParameter",
    "InvalidArgument",
    "ProblemSpec",
    "SingularSystem",
    "classify_regime",
    "conductivity_spec",
    "dtn",
    "edge_parameters",
    "floppy_modes",
    "gradient_matrix",
    "load_network",
    "masses_known_springs_spec",
    "node_parameters",
    "operator_matrix",
    "schrodinger_spec",
    "solve_dirichlet",
    "springs_known_masses_spec",
    "static_springs_spec",
]
