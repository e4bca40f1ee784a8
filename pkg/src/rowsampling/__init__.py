"""Row sampling of matrices with orthonormal columns: test-matrix generation,
four samplers, condition-number experiments and six probabilistic bounds."""

from .bounds import (
    BoundId,
    BoundPoint,
    BoundQuery,
    bound_4_epsilon,
    bound_5_epsilon,
    bound_6_epsilon,
    chernoff_delta,
    evaluate_bound_curve,
    invert_bound_1,
    invert_bound_2,
    invert_bound_3,
    kappa_from_epsilon,
)
from .distributions import ProfileError, dist_many_big, dist_one_big, validate_profile
from .experiment import (
    ConfigError,
    ExperimentConfig,
    ExperimentResult,
    MatrixSource,
    failure_confidence_interval,
    log_points,
    log_points_double,
    run_experiment,
)
from .generation import GenerationTrace, generate_from_leverage, rotate_rows_to_norm
from .linalg import (
    LeverageProfile,
    OrthonormalityError,
    coherence,
    condition_number,
    leverage_scores,
    numerical_rank,
    orthonormality_defect,
    projected_leverage_norm,
)
from .sampling import (
    Method,
    RngStream,
    SampleOutcome,
    sample,
    sample_bernoulli,
    sample_proportional_to_leverage,
    sample_with_replacement,
    sample_without_replacement,
)

__all__ = [
    "BoundId",
    "BoundPoint",
    "BoundQuery",
    "ConfigError",
    "ExperimentConfig",
    "ExperimentResult",
    "GenerationTrace",
    "LeverageProfile",
    "MatrixSource",
    "Method",
    "OrthonormalityError",
    "ProfileError",
    "RngStream",
    "SampleOutcome",
    "bound_4_epsilon",
    "bound_5_epsilon",
    "bound_6_epsilon",
    "chernoff_delta",
    "coherence",
    "condition_number",
    "dist_many_big",
    "dist_one_big",
    "evaluate_bound_curve",
    "failure_confidence_interval",
    "generate_from_leverage",
    "invert_bound_1",
    "invert_bound_2",
    "invert_bound_3",
    "kappa_from_epsilon",
    "leverage_scores",
    "log_points",
    "log_points_double",
    "numerical_rank",
    "orthonormality_defect",
    "projected_leverage_norm",
    "rotate_rows_to_norm",
    "run_experiment",
    "sample",
    "sample_bernoulli",
    "sample_proportional_to_leverage",
    "sample_with_replacement",
    "sample_without_replacement",
    "validate_profile",
]

__version__ = "0.1.0"
