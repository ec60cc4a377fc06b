"""Fast single-snapshot 2D harmonic recovery on sparse planar arrays.

The Gram matrix of a 2D Fourier dictionary restricted to the occupied
elements of a uniform rectangular array is block circulant with
circulant blocks (BCCB), so it is diagonalized by the 2D DFT.  This
package builds that operator from the array geometry alone and uses it
to run LASSO solvers (ISTA, FISTA, ADMM) whose per-iteration cost drops
from O(L^2) dense products to O(L log L) FFTs.
"""

from .arrays import (
    ArrayGeometry,
    Snapshot,
    Target,
    angles_to_harmonics,
    geometry_from_json,
    geometry_to_json,
    harmonics_to_angles,
    load_geometry,
    load_snapshot_values,
    load_targets,
    make_ura,
    save_geometry,
    save_snapshot,
    save_targets,
    snr_to_noise_variance,
    steering_vector,
    subsample_preserving_aperture,
    synthesize_snapshot,
)
from .bccb import (
    BccbOperator,
    FirstColumn,
    bccb_first_column,
    bccb_from_first_column,
    bccb_inverse,
    bccb_matvec,
    bccb_scale_add_identity,
    bccb_to_dense,
    gram_first_column,
    gram_operator,
    is_bccb,
)
from .dictionary import (
    DenseGram,
    SubsampledDictionary,
    UniformGrid,
    apply_adjoint,
    apply_forward,
    build_subdictionary,
    build_subsampled_dictionary,
    dense_gram,
    make_uniform_grid,
)
from .errors import (
    BccbLassoError,
    ConfigError,
    ConvergenceError,
    DivergenceError,
    DomainError,
    InvalidArgumentError,
    MemoryBudgetError,
    SingularOperatorError,
    ZeroReferenceError,
)
from .experiments import (
    CellSummary,
    ExperimentConfig,
    TrialRecord,
    experiment_config_from_dict,
    experiment_config_to_dict,
    read_records_csv,
    relative_error,
    run_grid,
    run_trial,
    summarize,
    write_plot_data_csv,
    write_records_csv,
    write_summary_csv,
)
from .solvers import (
    BACKEND_FAST,
    BACKEND_REGULAR,
    LassoProblem,
    SolverConfig,
    SolverResult,
    admm_solve,
    extract_support,
    fista_alpha_sequence,
    fista_solve,
    ista_solve,
    lasso_objective,
    max_gram_eigenvalue,
    soft_threshold,
)

__version__ = "0.1.0"

__all__ = [
    "ArrayGeometry",
    "Snapshot",
    "Target",
    "angles_to_harmonics",
    "geometry_from_json",
    "geometry_to_json",
    "harmonics_to_angles",
    "load_geometry",
    "load_snapshot_values",
    "load_targets",
    "make_ura",
    "save_geometry",
    "save_snapshot",
    "save_targets",
    "snr_to_noise_variance",
    "steering_vector",
    "subsample_preserving_aperture",
    "synthesize_snapshot",
    "BccbOperator",
    "FirstColumn",
    "bccb_first_column",
    "bccb_from_first_column",
    "bccb_inverse",
    "bccb_matvec",
    "bccb_scale_add_identity",
    "bccb_to_dense",
    "gram_first_column",
    "gram_operator",
    "is_bccb",
    "DenseGram",
    "SubsampledDictionary",
    "UniformGrid",
    "apply_adjoint",
    "apply_forward",
    "build_subdictionary",
    "build_subsampled_dictionary",
    "dense_gram",
    "make_uniform_grid",
    "BccbLassoError",
    "ConfigError",
    "ConvergenceError",
    "DivergenceError",
    "DomainError",
    "InvalidArgumentError",
    "MemoryBudgetError",
    "SingularOperatorError",
    "ZeroReferenceError",
    "CellSummary",
    "ExperimentConfig",
    "TrialRecord",
    "experiment_config_from_dict",
    "experiment_config_to_dict",
    "read_records_csv",
    "relative_error",
    "run_grid",
    "run_trial",
    "summarize",
    "write_plot_data_csv",
    "write_records_csv",
    "write_summary_csv",
    "BACKEND_FAST",
    "BACKEND_REGULAR",
    "LassoProblem",
    "SolverConfig",
    "SolverResult",
    "admm_solve",
    "extract_support",
    "fista_alpha_sequence",
    "fista_solve",
    "ista_solve",
    "lasso_objective",
    "max_gram_eigenvalue",
    "soft_threshold",
    "__version__",
]
