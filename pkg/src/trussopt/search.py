"""Shared search infrastructure: budgets, instrumented evaluation,
scatter initialization, run records and multi-run statistics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from trussopt.truss import (
    DegenerateGeometryError,
    DesignVector,
    Evaluation,
    TrussProblem,
    singular_evaluation,
    solve,
)


class BudgetExhausted(RuntimeError):
    pass


class ScatterFailedError(RuntimeError):
    def __init__(self, count, seed=None):
        msg = f"no feasible design among {count} scatter samples"
        if seed is not None:
            msg += f" (seed {seed})"
        super().__init__(msg)
        self.count = count
        self.seed = seed


@dataclass
class EvaluationBudget:
    max_evaluations: int
    used: int = 0

    @property
    def remaining(self) -> int:
        return self.max_evaluations - self.used

    def spend(self) -> None:
        if self.used >= self.max_evaluations:
            raise BudgetExhausted(f"budget of {self.max_evaluations} exhausted")
        self.used += 1


class Evaluator:
    """Budget-counted objective evaluation.

    Each evaluate() is exactly one solve() call and costs one budget
    unit, so `budget.used` equals the number of solve() calls made.
    Coincident-node designs come back as singular sentinels instead of
    raising, so searches can treat them as ordinary infeasible points.
    """

    def __init__(self, problem: TrussProblem, budget: EvaluationBudget):
        self.problem = problem
        self.budget = budget

    def evaluate(self, design: DesignVector) -> Evaluation:
        self.budget.spend()
        try:
            return self._solve(design)
        except DegenerateGeometryError:
            return singular_evaluation(self.problem, design)

    def _solve(self, design: DesignVector) -> Evaluation:
        return solve(self.problem, design)


@dataclass
class RunRecord:
    seed: int
    best_design: DesignVector
    best_mass: float
    evaluations_used: int
    feasible: bool
    trace: list[tuple[int, float]] | None = None
    budget_exhausted: bool = False
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True)
class RunSummary:
    best_mass: float
    best_mass_evals: int
    worst_mass: float
    worst_mass_evals: int
    average_mass: float
    stddev_mass: float
    lowest_evals: int
    highest_evals: int
    average_evals: float
    runs_below_threshold: int
    threshold: float
    total_runs: int


def random_design(problem: TrussProblem, rng: np.random.Generator) -> DesignVector:
    bounds = problem.variable_bounds()
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    x = rng.uniform(lo, hi)
    n_coords = 2 * len(problem.movable_nodes())
    d = DesignVector.from_array(x, n_coords)
    return d.quantized(problem).clipped(problem)


def scatter_init(
    problem: TrussProblem,
    count: int,
    rng: np.random.Generator,
    evaluator: Evaluator,
    seed: int | None = None,
) -> tuple[DesignVector, Evaluation]:
    """Best feasible design from `count` uniform random samples."""
    if count < 1:
        raise ValueError("scatter count must be >= 1")
    best = None
    best_ev = None
    for _ in range(count):
        design = random_design(problem, rng)
        ev = evaluator.evaluate(design)
        if ev.feasible and (best_ev is None or ev.mass < best_ev.mass):
            best, best_ev = design, ev
    if best is None:
        raise ScatterFailedError(count, seed)
    return best, best_ev


def summarize(runs: list[RunRecord], threshold: float) -> RunSummary:
    if not runs:
        raise ValueError("need at least one run")
    masses = np.array([r.best_mass for r in runs])
    evals = np.array([r.evaluations_used for r in runs])
    ibest = int(np.argmin(masses))
    iworst = int(np.argmax(masses))
    stddev = float(np.std(masses, ddof=1)) if len(runs) > 1 else 0.0
    return RunSummary(
        best_mass=float(masses[ibest]),
        best_mass_evals=int(evals[ibest]),
        worst_mass=float(masses[iworst]),
        worst_mass_evals=int(evals[iworst]),
        average_mass=float(masses.mean()),
        stddev_mass=stddev,
        lowest_evals=int(evals.min()),
        highest_evals=int(evals.max()),
        average_evals=float(evals.mean()),
        runs_below_threshold=int((masses < threshold).sum()),
        threshold=threshold,
        total_runs=len(runs),
    )
