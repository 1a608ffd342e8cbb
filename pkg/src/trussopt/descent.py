"""Variable-step-size steepest descent: the SD baseline and the local
engine inside tabu search. Derivative-free; hard constraint rejection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from trussopt.search import (
    BudgetExhausted,
    EvaluationBudget,
    Evaluator,
    RunRecord,
    scatter_init,
)
from trussopt.truss import DesignVector, TrussProblem


@dataclass
class DescentConfig:
    initial_step_fraction: float = 1.0 / 16.0  # of each variable's bound range
    scatter_count: int = 50
    record_trace: bool = False


@dataclass
class StepState:
    steps: np.ndarray       # integer multiples of each variable's resolution
    minimum: np.ndarray

    @staticmethod
    def initial(problem: TrussProblem, fraction: float) -> "StepState":
        res = problem.variable_resolutions()
        bounds = problem.variable_bounds()
        span = np.array([hi - lo for lo, hi in bounds])
        steps = np.round(span * fraction / res) * res
        steps = np.maximum(steps, res)
        return StepState(steps=steps, minimum=res.copy())

    def at_minimum(self) -> bool:
        return bool(np.all(self.steps <= self.minimum))

    def halved(self) -> "StepState":
        res = self.minimum
        units = np.round(self.steps / res).astype(np.int64)
        units = np.maximum(units // 2, 1)
        return StepState(steps=units * res, minimum=res)


def propose_neighbors(
    problem: TrussProblem, design: DesignVector, steps: StepState
) -> list[DesignVector]:
    """The +/- step perturbation of every variable, snapped and clipped.

    Candidates that clip back onto the current design are dropped, so an
    interior point yields 2 per variable.
    """
    x = design.as_array()
    n_coords = 2 * len(problem.movable_nodes())
    base_key = design.key(problem)
    out = []
    for i in range(len(x)):
        for sign in (+1.0, -1.0):
            y = x.copy()
            y[i] += sign * steps.steps[i]
            cand = DesignVector.from_array(y, n_coords).quantized(problem).clipped(problem)
            if cand.key(problem) != base_key:
                out.append(cand)
    return out


@dataclass
class DescentResult:
    best_design: DesignVector
    best_evaluation: object
    moves: int
    budget_exhausted: bool


def descend_from(
    evaluator: Evaluator,
    start: DesignVector,
    start_evaluation,
    config: DescentConfig,
    is_allowed=None,
    on_move=None,
    trace=None,
) -> DescentResult:
    """Best-of-neighborhood descent with step halving on sweep failure.

    Only feasible improving candidates are accepted; when a full sweep
    fails, every step halves (floored at the variable resolution) and
    the search stops once a sweep at minimum steps fails. `is_allowed`
    filters candidates (tabu rejection); `on_move` observes accepted
    incumbents.
    """
    problem = evaluator.problem
    steps = StepState.initial(problem, config.initial_step_fraction)
    incumbent, incumbent_ev = start, start_evaluation
    moves = 0
    while True:
        candidates = propose_neighbors(problem, incumbent, steps)
        if is_allowed is not None:
            candidates = [c for c in candidates if is_allowed(c)]
        best_c, best_ev = None, None
        for cand in candidates:
            try:
                ev = evaluator.evaluate(cand)
            except BudgetExhausted:
                return DescentResult(incumbent, incumbent_ev, moves, True)
            if not ev.feasible:
                continue
            if ev.mass < incumbent_ev.mass and (best_ev is None or ev.mass < best_ev.mass):
                best_c, best_ev = cand, ev
        if best_c is not None:
            incumbent, incumbent_ev = best_c, best_ev
            moves += 1
            if on_move is not None:
                on_move(incumbent, incumbent_ev)
            if trace is not None:
                trace.append((evaluator.budget.used, incumbent_ev.mass))
            continue
        if steps.at_minimum():
            return DescentResult(incumbent, incumbent_ev, moves, False)
        steps = steps.halved()


def run_sd(
    problem: TrussProblem,
    max_evaluations: int,
    config: DescentConfig,
    seed: int,
) -> RunRecord:
    """One seeded steepest-descent run: scatter start, descend to a local
    optimum (or budget exhaustion)."""
    rng = np.random.default_rng(seed)
    budget = EvaluationBudget(max_evaluations)
    evaluator = Evaluator(problem, budget)
    start, start_ev = scatter_init(problem, config.scatter_count, rng, evaluator, seed=seed)
    trace = [(budget.used, start_ev.mass)] if config.record_trace else None
    result = descend_from(evaluator, start, start_ev, config, trace=trace)
    return RunRecord(
        seed=seed,
        best_design=result.best_design,
        best_mass=result.best_evaluation.mass,
        evaluations_used=budget.used,
        feasible=result.best_evaluation.feasible,
        trace=trace,
        budget_exhausted=result.budget_exhausted,
    )
