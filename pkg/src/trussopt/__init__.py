"""Ten-bar truss shape-and-size optimization benchmark toolkit.

Provides a 2-D pin-jointed truss evaluator (direct stiffness method),
three search methods (steepest descent, tabu search, simulated annealing)
and a multi-seed benchmark harness with reporting.
"""

from trussopt.truss import (
    Material,
    NodeSpec,
    Member,
    TrussProblem,
    DesignVector,
    Evaluation,
    DegenerateGeometryError,
    RepairFailedError,
    buckling_critical_stress,
    member_length,
    mass,
    solve,
    check_constraints,
    reduce_topology,
    repair_minimal,
)
from trussopt.problem_io import load_problem, default_problem
from trussopt.search import (
    EvaluationBudget,
    BudgetExhausted,
    ScatterFailedError,
    Evaluator,
    RunRecord,
    RunSummary,
    scatter_init,
    summarize,
)

__all__ = [
    "Material",
    "NodeSpec",
    "Member",
    "TrussProblem",
    "DesignVector",
    "Evaluation",
    "DegenerateGeometryError",
    "RepairFailedError",
    "buckling_critical_stress",
    "member_length",
    "mass",
    "solve",
    "check_constraints",
    "reduce_topology",
    "repair_minimal",
    "load_problem",
    "default_problem",
    "EvaluationBudget",
    "BudgetExhausted",
    "ScatterFailedError",
    "Evaluator",
    "RunRecord",
    "RunSummary",
    "scatter_init",
    "summarize",
]
