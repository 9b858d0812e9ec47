"""supercon: superiorized feasibility-seeking with concentration checks.

The library has three layers. Core iteration: convex bodies with metric
projections (geometry), the basic and superiorized drivers
(feasibility), and the lower-triangular iterate matrix that aligns
the two trajectories (supermatrix). Predictions: closed-form
high-dimensional concentration formulas with Monte Carlo estimators
(concentration), the projection-derivative calculus and its cascades
(projderiv). Experiments: reproducible random streams (randgen),
paired-run studies on half-space systems (linsup), and the suite
runner behind the command line (suites, cli).
"""

from .concentration import (
    PredictionReport,
    fit_scaling,
    mc_action_norm,
    mc_gram_identity,
    mc_rotation_product,
    mc_sphere_displacement,
    mc_sum_norm,
    predict_action_norm,
    predict_distortion_variance,
    predict_rotation,
    predict_sphere_displacement_sq,
    predict_sum_norm,
)
from .feasibility import (
    LinearTarget,
    OperatorSequence,
    PerturbationSchedule,
    RunResult,
    StoppingRule,
    apply_operator,
    nonascent_rule,
    residual,
    run_basic,
    run_superiorized,
)
from .geometry import (
    Ball,
    Ellipsoid,
    HalfSpace,
    HalfSpaceSet,
    body_from_dict,
    body_to_dict,
    curvature_operator,
    distance,
    prob_lp_norm,
    project,
)
from .linsup import (
    LinSupConfig,
    LinSupProblem,
    PairedOutcome,
    batch_experiment,
    drift_experiment,
    gen_problem,
    run_pair,
)
from .projderiv import (
    CascadePath,
    CascadeStep,
    cascade_norm_prediction,
    cascade_rotation_prediction,
    dp_apply,
    mc_cascade,
    mean_value_check,
    norm_ratio_bounds,
    projection_derivative,
)
from .randgen import (
    RngStream,
    gaussian_vector,
    matrix_with_singular_values,
    random_orthogonal,
    sphere_markov_step,
    trial_stream,
    uniform_sphere,
)
from .suites import DEFAULT_SEED, SuiteResult, run_suite
from .supermatrix import (
    SupMatrix,
    angle_drift,
    build,
    column_limit,
    increment,
    streaming_drift,
    telescoping_check,
    telescoping_residuals,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # geometry
    "Ball", "Ellipsoid", "HalfSpace", "HalfSpaceSet", "prob_lp_norm",
    "project", "distance", "curvature_operator", "body_to_dict", "body_from_dict",
    # randgen
    "RngStream", "trial_stream", "gaussian_vector", "uniform_sphere",
    "random_orthogonal", "matrix_with_singular_values", "sphere_markov_step",
    # feasibility
    "OperatorSequence", "PerturbationSchedule", "StoppingRule", "RunResult",
    "LinearTarget", "apply_operator", "residual", "run_basic",
    "run_superiorized", "nonascent_rule",
    # supermatrix
    "SupMatrix", "build", "telescoping_check", "telescoping_residuals",
    "column_limit", "increment", "angle_drift", "streaming_drift",
    # concentration
    "PredictionReport", "predict_sum_norm", "mc_sum_norm",
    "predict_sphere_displacement_sq", "mc_sphere_displacement",
    "mc_gram_identity", "predict_action_norm", "predict_distortion_variance",
    "mc_action_norm", "predict_rotation", "mc_rotation_product", "fit_scaling",
    # projderiv
    "projection_derivative", "dp_apply", "mean_value_check", "CascadeStep",
    "CascadePath", "cascade_norm_prediction", "cascade_rotation_prediction",
    "norm_ratio_bounds", "mc_cascade",
    # linsup
    "LinSupProblem", "PairedOutcome", "LinSupConfig", "gen_problem",
    "run_pair", "batch_experiment", "drift_experiment",
    # suites
    "DEFAULT_SEED", "SuiteResult", "run_suite",
]
