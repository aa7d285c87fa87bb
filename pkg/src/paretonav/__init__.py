"""Gradient-based navigation of Pareto sets.

Minimize a criterion function inside the Pareto set of several objectives
using only first-order information, alongside worst-case multi-gradient
descent and linear-scalarization baselines, synthetic benchmarks with
known fronts, and front-quality metrics (IGD+, hypervolume).
"""

from .core import (
    Dominance,
    EvaluationError,
    ObjectiveSet,
    dominates,
    evaluate_jacobian,
    evaluate_losses,
    weakly_dominates,
)
from .criteria import (
    Criterion,
    CriterionEval,
    EnergyDistanceCriterion,
    EnsembleEval,
    SingularityError,
    as_ensemble,
    complex_cosine,
    energy_distance,
    make_criterion,
    non_uniformity,
    weighted_distance,
)
from .metrics import hypervolume_2d, igd_plus, nondominated_filter
from .navigator import (
    ControlSchedule,
    OptimizerConfig,
    RunAborted,
    TrajectoryRecord,
    compute_phi,
    mgd_direction,
    png_direction,
    run_ensemble,
    run_single,
    step,
    update_eps_floor,
)
from .problems import get_problem, toy_front, toy_problem, zdt2, zdt2_front
from .qp import (
    Direction,
    InfeasibleDirectionError,
    MinNormResult,
    QpSolverConfig,
    assemble_direction,
    min_norm_weights,
    png_dual_solve,
    project_simplex,
)

__version__ = "0.1.0"

__all__ = [
    "ControlSchedule",
    "Criterion",
    "CriterionEval",
    "Direction",
    "Dominance",
    "EnergyDistanceCriterion",
    "EnsembleEval",
    "EvaluationError",
    "InfeasibleDirectionError",
    "MinNormResult",
    "ObjectiveSet",
    "OptimizerConfig",
    "QpSolverConfig",
    "RunAborted",
    "SingularityError",
    "TrajectoryRecord",
    "as_ensemble",
    "assemble_direction",
    "complex_cosine",
    "compute_phi",
    "dominates",
    "energy_distance",
    "evaluate_jacobian",
    "evaluate_losses",
    "get_problem",
    "hypervolume_2d",
    "igd_plus",
    "make_criterion",
    "mgd_direction",
    "min_norm_weights",
    "non_uniformity",
    "nondominated_filter",
    "png_direction",
    "png_dual_solve",
    "project_simplex",
    "run_ensemble",
    "run_single",
    "step",
    "toy_front",
    "toy_problem",
    "update_eps_floor",
    "weakly_dominates",
    "weighted_distance",
    "zdt2",
    "zdt2_front",
]
