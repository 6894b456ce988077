"""Metrics, covariance kernels, and Gaussian fields on graphs with
Euclidean edges."""

from .errors import (
    DistanceInconsistentError,
    DuplicatePointsError,
    FactorizationFailedError,
    GraphFieldsError,
    InvalidGraphError,
    MultiEdgeOrLoopError,
    NonFiniteError,
    NotATreeError,
    NotConnectedError,
    NotDegreeTwoError,
    NotPSDError,
    NOutOfRangeError,
    OffsetOutOfRangeError,
    ParamOutOfRangeError,
    TooFewSamplesError,
    UnknownEdgeError,
    UnknownVertexError,
    WouldCreateMultiEdgeOrLoopError,
)
from .graph import (
    Block,
    BlockDecomposition,
    BlockKind,
    Edge,
    EuclideanGraph,
    GeodesicValidity,
    GraphPoint,
    block_decomposition,
    build_graph,
    canonicalize,
    edge_point,
    geodesic_validity_class,
    graph_from_json,
    graph_to_json,
    is_tree,
    merge_at_degree_two,
    point_from_json,
    point_label,
    point_to_json,
    split_edge,
    vertex_point,
)
from .metrics import (
    MetricKind,
    ResistanceContext,
    build_resistance_context,
    distance_matrix,
    geodesic_distance,
    oracle_effective_resistance,
    r_edge,
    r_graph,
    r_graph_matrix,
    r_mu,
    relative_position,
    resistance_distance,
    tree_kernel_closed_form,
)
from .kernels import (
    CovarianceMatrix,
    ForbiddenWitness,
    KernelFamily,
    KernelSpec,
    PsdReport,
    StarInequalityResult,
    bessel_k_fractional,
    covariance_from_distances,
    covariance_matrix,
    embedding_gram,
    forbidden_certificate,
    kernel_spec_from_json,
    kernel_spec_to_json,
    psd_check,
    radial_profile,
    smoothness_bound,
    star_inequality_check,
    theta_witness_graph,
    validate_params,
)
from .simulate import (
    FieldSample,
    empirical_variogram,
    sample_canonical_field,
    sample_from_covariance,
)

__version__ = "0.1.0"

__all__ = [
    "Block",
    "BlockDecomposition",
    "BlockKind",
    "CovarianceMatrix",
    "DistanceInconsistentError",
    "DuplicatePointsError",
    "Edge",
    "EuclideanGraph",
    "FactorizationFailedError",
    "FieldSample",
    "ForbiddenWitness",
    "GeodesicValidity",
    "GraphFieldsError",
    "GraphPoint",
    "InvalidGraphError",
    "KernelFamily",
    "KernelSpec",
    "MetricKind",
    "MultiEdgeOrLoopError",
    "NonFiniteError",
    "NotATreeError",
    "NotConnectedError",
    "NotDegreeTwoError",
    "NotPSDError",
    "NOutOfRangeError",
    "OffsetOutOfRangeError",
    "ParamOutOfRangeError",
    "PsdReport",
    "ResistanceContext",
    "StarInequalityResult",
    "TooFewSamplesError",
    "UnknownEdgeError",
    "UnknownVertexError",
    "WouldCreateMultiEdgeOrLoopError",
    "bessel_k_fractional",
    "block_decomposition",
    "build_graph",
    "build_resistance_context",
    "canonicalize",
    "covariance_from_distances",
    "covariance_matrix",
    "distance_matrix",
    "edge_point",
    "embedding_gram",
    "empirical_variogram",
    "forbidden_certificate",
    "geodesic_distance",
    "geodesic_validity_class",
    "graph_from_json",
    "graph_to_json",
    "is_tree",
    "kernel_spec_from_json",
    "kernel_spec_to_json",
    "merge_at_degree_two",
    "oracle_effective_resistance",
    "point_from_json",
    "point_label",
    "point_to_json",
    "psd_check",
    "r_edge",
    "r_graph",
    "r_graph_matrix",
    "r_mu",
    "radial_profile",
    "relative_position",
    "resistance_distance",
    "sample_canonical_field",
    "sample_from_covariance",
    "smoothness_bound",
    "split_edge",
    "star_inequality_check",
    "theta_witness_graph",
    "tree_kernel_closed_form",
    "validate_params",
    "vertex_point",
]
