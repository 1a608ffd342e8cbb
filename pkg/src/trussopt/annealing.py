"""Simulated annealing: Metropolis acceptance, adaptive Lam-style
temperature control, quality-weighted move selection and dynamically
weighted soft constraints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from trussopt.search import (
    BudgetExhausted,
    EvaluationBudget,
    Evaluator,
    RunRecord,
    random_design,
)
from trussopt.truss import DesignVector, Evaluation, TrussProblem, solve

# Lam target acceptance-ratio curve: 1.0 decaying to the 0.44 plateau over
# the first 15% of the budget, flat until 65%, then decaying toward 0.
LAM_EARLY_END = 0.15
LAM_LATE_START = 0.65
LAM_PLATEAU = 0.44


def lam_target(budget_fraction: float) -> float:
    t = min(max(budget_fraction, 0.0), 1.0)
    if t < LAM_EARLY_END:
        return LAM_PLATEAU + 0.56 * 560.0 ** (-t / LAM_EARLY_END)
    if t <= LAM_LATE_START:
        return LAM_PLATEAU
    return LAM_PLATEAU * 440.0 ** (-(t - LAM_LATE_START) / (1.0 - LAM_LATE_START))


@dataclass
class AnnealConfig:
    evaluations_total: int = 34_000
    scatter_count: int = 50
    initial_temperature: float = 1000.0     # kg of penalized cost
    temperature_adjust: float = 0.03        # multiplicative control gain
    acceptance_smoothing: float = 0.02      # EWMA factor for the acceptance estimate
    # large steps must be able to jump between basins of the mass
    # landscape; benchmarked over the default problem (see tests)
    large_step_coord_units: int = 128
    large_step_area_units: int = 1500
    probability_floor: float = 0.01
    renormalize_period: int = 100
    quality_decay: float = 0.5              # applied at each renormalization
    initial_weight: float = 1.0             # kg per unit violation, each family
    weight_growth: float = 1.5
    weight_update_period: int = 100
    # violation allowance at the start of the run, shrinking linearly to 0
    allowance_stress: float = 200.0   # N/cm^2
    allowance_buckling: float = 200.0  # N/cm^2
    allowance_length: float = 5.0      # cm
    record_trace: bool = False


FAMILIES = ("stress", "buckling", "length")


@dataclass
class ConstraintWeights:
    stress: float = 1.0
    buckling: float = 1.0
    length: float = 1.0

    def as_dict(self):
        return {"stress": self.stress, "buckling": self.buckling, "length": self.length}


def penalized_cost(evaluation: Evaluation, weights: ConstraintWeights) -> float:
    """Mass plus weighted violation totals; +inf for mechanisms."""
    if evaluation.singular:
        return math.inf
    return (
        evaluation.mass
        + weights.stress * float(evaluation.stress_excess.sum())
        + weights.buckling * float(evaluation.buckling_excess.sum())
        + weights.length * float(evaluation.length_deficit.sum())
    )


def metropolis_accept(delta_cost: float, temperature: float, rng: np.random.Generator) -> bool:
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    if delta_cost <= 0:
        return True
    if math.isinf(delta_cost):
        return False
    exponent = -delta_cost / temperature
    if exponent < -700.0:
        return False
    return rng.random() < math.exp(exponent)


@dataclass
class AnnealState:
    temperature: float
    acceptance_estimate: float
    evaluations_done: int
    evaluations_total: int


def schedule_update(state: AnnealState, accepted: bool, config: AnnealConfig) -> float:
    """Track the Lam target curve: smooth the acceptance estimate, then
    nudge temperature down when accepting too often, up when too rarely."""
    a = config.acceptance_smoothing
    state.acceptance_estimate = (1 - a) * state.acceptance_estimate + a * (1.0 if accepted else 0.0)
    target = lam_target(state.evaluations_done / state.evaluations_total)
    if state.acceptance_estimate > target:
        state.temperature *= 1.0 - config.temperature_adjust
    else:
        state.temperature /= 1.0 - config.temperature_adjust
    return state.temperature


class MoveTable:
    """Move types (one small and one large step per variable) selected by
    quality-adapted probabilities with a hard floor."""

    def __init__(self, problem: TrussProblem, config: AnnealConfig):
        res = problem.variable_resolutions()
        n_coords = 2 * len(problem.movable_nodes())
        magnitudes = []
        for i, r in enumerate(res):
            large = config.large_step_coord_units if i < n_coords else config.large_step_area_units
            magnitudes.append((i, r))           # small: one resolution unit
            magnitudes.append((i, large * r))   # large
        self.moves = magnitudes
        self.n = len(magnitudes)
        self.quality = np.zeros(self.n)
        self.probabilities = np.full(self.n, 1.0 / self.n)
        self.floor = config.probability_floor
        self.decay = config.quality_decay

    def select(self, rng: np.random.Generator) -> int:
        return int(rng.choice(self.n, p=self.probabilities))

    def update_quality(self, move: int, delta_cost: float, accepted: bool) -> None:
        if accepted and delta_cost < 0:
            self.quality[move] += -delta_cost

    def renormalize(self) -> None:
        total = self.quality.sum()
        if total > 0:
            share = self.quality / total
        else:
            share = np.full(self.n, 1.0 / self.n)
        self.probabilities = self.floor + (1.0 - self.n * self.floor) * share
        self.quality *= self.decay


class ViolationStats:
    """Running per-family violation means over the current update window."""

    def __init__(self):
        self.sums = dict.fromkeys(FAMILIES, 0.0)
        self.count = 0

    def record(self, evaluation: Evaluation) -> None:
        if not evaluation.singular:
            self.sums["stress"] += float(evaluation.stress_excess.sum())
            self.sums["buckling"] += float(evaluation.buckling_excess.sum())
            self.sums["length"] += float(evaluation.length_deficit.sum())
        self.count += 1

    def means(self) -> dict:
        if self.count == 0:
            return dict.fromkeys(FAMILIES, 0.0)
        return {k: v / self.count for k, v in self.sums.items()}

    def reset(self) -> None:
        self.sums = dict.fromkeys(FAMILIES, 0.0)
        self.count = 0


def weight_update(
    weights: ConstraintWeights,
    recent_means: dict,
    budget_fraction: float,
    config: AnnealConfig,
) -> ConstraintWeights:
    """Grow a family's weight whenever its mean violation exceeds the
    allowance, which shrinks linearly to zero at the end of the run.
    Weights never decrease."""
    t = min(max(budget_fraction, 0.0), 1.0)
    allowances = {
        "stress": config.allowance_stress * (1.0 - t),
        "buckling": config.allowance_buckling * (1.0 - t),
        "length": config.allowance_length * (1.0 - t),
    }
    values = weights.as_dict()
    for fam in FAMILIES:
        if recent_means.get(fam, 0.0) > allowances[fam]:
            values[fam] *= config.weight_growth
    return ConstraintWeights(**values)


def _soft_scatter(
    problem: TrussProblem,
    count: int,
    rng: np.random.Generator,
    evaluator: Evaluator,
    weights: ConstraintWeights,
) -> tuple[DesignVector, Evaluation]:
    """Best sample by penalized cost: constraints are soft here, so the
    start never fails outright (a feasible sample is preferred but not
    required; an all-singular scatter keeps the last sample)."""
    best, best_ev, best_cost = None, None, math.inf
    for _ in range(count):
        design = random_design(problem, rng)
        ev = evaluator.evaluate(design)
        cost = penalized_cost(ev, weights)
        if best is None or cost < best_cost:
            best, best_ev, best_cost = design, ev, cost
    return best, best_ev


def _apply_move(
    problem: TrussProblem,
    design: DesignVector,
    move: tuple[int, float],
    rng: np.random.Generator,
) -> DesignVector:
    index, magnitude = move
    x = design.as_array()
    x[index] += magnitude if rng.random() < 0.5 else -magnitude
    n_coords = 2 * len(problem.movable_nodes())
    return DesignVector.from_array(x, n_coords).quantized(problem).clipped(problem)


def anneal(
    problem: TrussProblem,
    max_evaluations: int,
    config: AnnealConfig,
    seed: int,
) -> RunRecord:
    """One seeded annealing run consuming exactly max_evaluations solves
    (scatter start included). Returns the best strictly feasible design
    when one was seen, otherwise the least-violating best, flagged
    infeasible with its violation magnitudes in `extra`."""
    rng = np.random.default_rng(seed)
    budget = EvaluationBudget(max_evaluations)
    evaluator = Evaluator(problem, budget)
    if max_evaluations == 0:
        # degenerate budget: hand back an unoptimized random start
        design = random_design(problem, rng)
        ev = solve(problem, design)
        return RunRecord(
            seed=seed,
            best_design=design,
            best_mass=ev.mass,
            evaluations_used=0,
            feasible=ev.feasible,
            trace=[] if config.record_trace else None,
            budget_exhausted=True,
            extra={"plateau_acceptance": None, "max_violation": ev.max_violation()},
        )
    weights = ConstraintWeights(
        stress=config.initial_weight,
        buckling=config.initial_weight,
        length=config.initial_weight,
    )
    incumbent, incumbent_ev = _soft_scatter(
        problem, min(config.scatter_count, max_evaluations), rng, evaluator, weights
    )
    state = AnnealState(
        temperature=config.initial_temperature,
        acceptance_estimate=1.0,
        evaluations_done=0,
        evaluations_total=max(budget.remaining, 1),
    )
    moves = MoveTable(problem, config)
    stats = ViolationStats()

    best_feasible, best_feasible_ev = None, None
    best_any, best_any_ev = incumbent, incumbent_ev
    best_any_cost = penalized_cost(incumbent_ev, weights)
    if incumbent_ev.feasible:
        best_feasible, best_feasible_ev = incumbent, incumbent_ev
    trace = [(budget.used, incumbent_ev.mass)] if config.record_trace else None

    plateau_accepted = 0
    plateau_steps = 0

    while budget.remaining > 0:
        move_idx = moves.select(rng)
        candidate = _apply_move(problem, incumbent, moves.moves[move_idx], rng)
        ev = evaluator.evaluate(candidate)
        state.evaluations_done += 1
        stats.record(ev)

        incumbent_cost = penalized_cost(incumbent_ev, weights)
        candidate_cost = penalized_cost(ev, weights)
        delta = candidate_cost - incumbent_cost
        accepted = metropolis_accept(delta, state.temperature, rng)
        moves.update_quality(move_idx, delta, accepted)
        if accepted:
            incumbent, incumbent_ev = candidate, ev
            if candidate_cost < best_any_cost and not ev.singular:
                best_any, best_any_ev, best_any_cost = candidate, ev, candidate_cost
            if ev.feasible and (best_feasible_ev is None or ev.mass < best_feasible_ev.mass):
                best_feasible, best_feasible_ev = candidate, ev
                if trace is not None:
                    trace.append((budget.used, ev.mass))
        schedule_update(state, accepted, config)

        frac = state.evaluations_done / state.evaluations_total
        if 0.2 <= frac <= 0.6:
            plateau_steps += 1
            plateau_accepted += int(accepted)
        if state.evaluations_done % config.weight_update_period == 0:
            weights = weight_update(weights, stats.means(), frac, config)
            stats.reset()
        if state.evaluations_done % config.renormalize_period == 0:
            moves.renormalize()

    if best_feasible is not None:
        record_design, record_ev = best_feasible, best_feasible_ev
    else:
        record_design, record_ev = best_any, best_any_ev
    extra = {
        "plateau_acceptance": plateau_accepted / plateau_steps if plateau_steps else None,
        "final_temperature": state.temperature,
        "final_weights": weights.as_dict(),
        "max_violation": record_ev.max_violation(),
    }
    return RunRecord(
        seed=seed,
        best_design=record_design,
        best_mass=record_ev.mass,
        evaluations_used=budget.used,
        feasible=record_ev.feasible,
        trace=trace,
        budget_exhausted=True,
        extra=extra,
    )
