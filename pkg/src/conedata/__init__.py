"""conedata: cone-supported vacuum initial data with borderline decay.

The package builds divergence-free seed data supported in a solid cone,
corrects it through explicit cone-supported convolution kernels and a
Picard iteration so the full vacuum constraint equations hold, and ships
the diagnostics (weighted norms, decay fits, sharpness scans) used to
certify the construction.
"""

from .config import RunConfig, default_config, load_config, parse_config
from .constraints import (
    HPiData,
    MetricData,
    apply_P,
    apply_Phi,
    constraints_grid,
    constraints_pointwise,
    reconstruct_gk,
    to_hpi,
)
from .diagnostics import (
    BNormSpec,
    SharpnessScan,
    b_norm,
    decay_fit,
    embedding_check,
    hpi_norm,
    product_check,
    seed_ray_samples,
    sharpness_scan,
    support_check,
)
from .errors import (
    BallViolationError,
    CheckFailure,
    ConedataError,
    ConfigError,
    DivergenceError,
    FormatError,
    OutOfDomainError,
    PositivityError,
    SingularPointError,
    SolverError,
)
from .fields import (
    ConeSpec,
    GridSpec,
    ScalarField,
    SymTensorField,
    VectorField,
    fd_partial,
    pairwise_sum,
    read_cidf,
    sample_trilinear,
    write_cidf,
)
from .kernels import (
    KernelProfile,
    RayConfig,
    apply_S,
    apply_S_points,
    bump_source,
    eval_K,
    eval_Lker,
    outgoing_check,
    ps_identity_defect,
    solve_moment_coeffs,
    weak_delta_defect,
)
from .seed import SeedEvaluator, SeedSpec, seed_to_grid, seed_to_grid_discrete
from .solver import SolveConfig, SolveState, estimate_contraction, solve
from .weights import WeightFunction

__all__ = [
    "BNormSpec",
    "BallViolationError",
    "CheckFailure",
    "ConeSpec",
    "ConedataError",
    "ConfigError",
    "DivergenceError",
    "FormatError",
    "GridSpec",
    "HPiData",
    "KernelProfile",
    "MetricData",
    "OutOfDomainError",
    "PositivityError",
    "RayConfig",
    "RunConfig",
    "ScalarField",
    "SeedEvaluator",
    "SeedSpec",
    "SharpnessScan",
    "SingularPointError",
    "SolveConfig",
    "SolveState",
    "SolverError",
    "SymTensorField",
    "VectorField",
    "WeightFunction",
    "apply_P",
    "apply_Phi",
    "apply_S",
    "apply_S_points",
    "b_norm",
    "bump_source",
    "constraints_grid",
    "constraints_pointwise",
    "decay_fit",
    "default_config",
    "embedding_check",
    "estimate_contraction",
    "eval_K",
    "eval_Lker",
    "fd_partial",
    "hpi_norm",
    "load_config",
    "outgoing_check",
    "pairwise_sum",
    "parse_config",
    "product_check",
    "ps_identity_defect",
    "read_cidf",
    "reconstruct_gk",
    "sample_trilinear",
    "seed_ray_samples",
    "seed_to_grid",
    "seed_to_grid_discrete",
    "sharpness_scan",
    "solve",
    "solve_moment_coeffs",
    "support_check",
    "to_hpi",
    "weak_delta_defect",
    "write_cidf",
]

__version__ = "0.1.0"
