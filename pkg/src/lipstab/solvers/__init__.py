from .simplex import SolveStatus, StatusKind, lp_solve, lp_solve_nonneg
from .projection import project_polyhedron
from .minnorm import MinNormResult, min_norm_point, min_norm_sliced_hull
from .ratio import max_ratio_over_hull

__all__ = [
    "SolveStatus",
    "StatusKind",
    "lp_solve",
    "lp_solve_nonneg",
    "project_polyhedron",
    "MinNormResult",
    "min_norm_point",
    "min_norm_sliced_hull",
    "max_ratio_over_hull",
]
