"""Heat kernels on model manifolds, heat-kernel embeddings and graph Laplacian eigenmaps."""

from .eigenmaps import AlignmentResult, column_blocks, diffusion_map, diffusion_weights, eigenmap, orthogonal_align
from .eigensolver import SpectralDecomposition, multiplicity_blocks, spectral_decompose
from .embeddings import (
    EmbeddingSpec,
    Path,
    diffusion_distance,
    embed_point,
    embed_points,
    embedded_curve_length,
    embedding_jacobian,
    pullback_metric,
    pullback_tensor,
    rescaling_prefactor,
    theta_length,
    truncation_for,
)
from .errors import (
    ApproximationWarning,
    BudgetError,
    ConstructionError,
    DomainError,
    HeatSpecError,
    NumericError,
    SingularityError,
    SpectralRangeError,
    UnsupportedError,
)
from .graphs import (
    KNN,
    Epsilon,
    PointCloud,
    WeightedGraph,
    build_adjacency,
    decompose,
    inject_weights,
    laplacian,
    median_squared_edge,
    parse_rule,
    rw_spectrum,
    weight_matrix,
)
from .kernels import (
    ClosedForm,
    EigenSum,
    ImageSum,
    Quadrature,
    constant_curvature_kernel,
    eigen_sum,
    heat_kernel,
    log_heat_kernel,
    millson_step,
)
from .manifolds import (
    Circle,
    ConstantCurvature,
    FlatTorus,
    Hyperbolic2,
    Hyperbolic3,
    Sphere2,
    basis_terms,
    eigen_pairs,
    eigenvalues,
    evaluate_basis,
    geodesic_distance,
    indices_for_eigenvalue,
)
from .samplers import (
    CircleShape,
    PhotoSet,
    Revolution,
    RevolutionEven,
    RevolutionProfile,
    SphereEven,
    TorusGrid,
    make_profile,
    sample,
)
from .truncation import Spectrum, TruncationBudget, circle_uniform_sl_number, heat_trace, tail_trace_bound
from .varadhan import VaradhanReport, varadhan_estimate, varadhan_sweep

__version__ = "0.1.0"
