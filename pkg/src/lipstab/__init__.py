"""Exact Lipschitzian stability bounds for block-perturbed inequality systems."""

from .norms import EUCLID, L1, LINF, NormSpec
from .model import (
    FEAS_TOL,
    BlockPartition,
    CharacteristicSet,
    LinearSystem,
    Perturbation,
    ValidationReport,
    characteristic_generators,
    perturbed_system,
    residual_inverse_distance,
    validate,
)
from .solvers import (
    MinNormResult,
    SolveStatus,
    StatusKind,
    lp_solve,
    max_ratio_over_hull,
    min_norm_point,
    min_norm_sliced_hull,
    project_polyhedron,
)
from .stability import (
    CoderivCertificate,
    EpsActiveResult,
    LipReport,
    SSCReport,
    check_ssc,
    coderivative_member,
    coderivative_norm,
    distance_formula,
    eps_active,
    lip_bound,
)
from .convex import (
    AffineFn,
    CutConfig,
    ConvexLipReport,
    LinearizedSystem,
    MaxAffineFn,
    QuadraticFn,
    ScaledNormFn,
    conjugate_value,
    distance_convex,
    eval_sub,
    linearize,
    lip_bound_convex,
)
from .estimator import (
    EstimateReport,
    PartitionCompareReport,
    SamplingConfig,
    empirical_lip,
    partition_compare,
)

__version__ = "0.1.0"
