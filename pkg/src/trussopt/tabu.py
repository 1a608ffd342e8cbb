"""Tabu search over the descent engine: short-term recency memory,
intermediate-term quality memory, trend/centroid intensification and
scatter diversification. Infeasible candidates are rejected outright.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace

import numpy as np

from trussopt.descent import DescentConfig, descend_from, propose_neighbors, StepState
from trussopt.search import (
    BudgetExhausted,
    EvaluationBudget,
    Evaluator,
    RunRecord,
    ScatterFailedError,
    scatter_init,
)
from trussopt.truss import DesignVector, TrussProblem


class ExhaustedNeighborhood(RuntimeError):
    """Every neighbor of the incumbent is tabu or infeasible."""


class ShortTermMemory:
    """Fixed-capacity FIFO of recently visited quantized designs."""

    def __init__(self, capacity: int):
        self.capacity = capacity
        self._fifo: deque = deque()
        self._keys: dict = {}

    def __len__(self):
        return len(self._fifo)

    def push(self, problem: TrussProblem, design: DesignVector) -> None:
        if self.capacity <= 0:
            return
        key = design.key(problem)
        self._fifo.append(key)
        self._keys[key] = self._keys.get(key, 0) + 1
        while len(self._fifo) > self.capacity:
            old = self._fifo.popleft()
            self._keys[old] -= 1
            if self._keys[old] == 0:
                del self._keys[old]

    def contains(self, problem: TrussProblem, design: DesignVector) -> bool:
        return design.key(problem) in self._keys

    def clear(self) -> None:
        self._fifo.clear()
        self._keys.clear()


class IntermediateMemory:
    """Capacity-bounded best-solution list, sorted ascending by mass."""

    def __init__(self, capacity: int):
        self.capacity = capacity
        self.entries: list[tuple[float, tuple, DesignVector]] = []

    def __len__(self):
        return len(self.entries)

    def push(self, problem: TrussProblem, design: DesignVector, mass: float) -> None:
        key = design.key(problem)
        if any(k == key for _, k, _ in self.entries):
            return
        self.entries.append((mass, key, design))
        self.entries.sort(key=lambda t: t[0])
        del self.entries[self.capacity :]

    def worst_mass(self) -> float:
        return self.entries[-1][0] if self.entries else float("inf")

    def designs(self) -> list[DesignVector]:
        return [d for _, _, d in self.entries]


def is_tabu(memory: ShortTermMemory, problem: TrussProblem, design: DesignVector) -> bool:
    return memory.contains(problem, design)


@dataclass
class TabuConfig:
    """The five tabu control parameters, defaulted from the number of
    design variables n (stm=2n, itm=n, intensify at n stalls, diversify
    at 3n, diversification scatter of 3n samples)."""

    stm_capacity: int
    itm_capacity: int
    stall_before_intensify: int
    stall_before_diversify: int
    diversify_scatter_count: int
    descent: DescentConfig = field(default_factory=DescentConfig)
    centroid_top_k: int = 5
    record_trace: bool = False

    @staticmethod
    def for_problem(problem: TrussProblem, **overrides) -> "TabuConfig":
        n = problem.n_variables()
        params = dict(
            stm_capacity=2 * n,
            itm_capacity=n,
            stall_before_intensify=n,
            stall_before_diversify=3 * n,
            diversify_scatter_count=3 * n,
        )
        params.update(overrides)
        return TabuConfig(**params)


def tabu_move(
    evaluator: Evaluator,
    incumbent: DesignVector,
    stm: ShortTermMemory,
) -> tuple[DesignVector, object]:
    """Forced move off a local optimum: best feasible non-tabu neighbor
    at minimum steps, accepted even when worse. Pushes the incumbent
    into short-term memory first."""
    problem = evaluator.problem
    stm.push(problem, incumbent)
    steps = StepState(
        steps=problem.variable_resolutions(), minimum=problem.variable_resolutions()
    )
    best, best_ev = None, None
    for cand in propose_neighbors(problem, incumbent, steps):
        if stm.contains(problem, cand):
            continue
        ev = evaluator.evaluate(cand)
        if not ev.feasible:
            continue
        if best_ev is None or ev.mass < best_ev.mass:
            best, best_ev = cand, ev
    if best is None:
        raise ExhaustedNeighborhood("all neighbors tabu or infeasible")
    return best, best_ev


def intensify(
    problem: TrussProblem, itm: IntermediateMemory, top_k: int = 5
) -> list[DesignVector]:
    """Trend extrapolation of the two best entries plus the centroid of
    the top k, snapped to resolution and clipped to bounds. Empty when
    the memory holds fewer than two designs."""
    if len(itm) < 2:
        return []
    designs = itm.designs()
    n_coords = len(designs[0].coords)
    best = designs[0].as_array()
    second = designs[1].as_array()
    trend = best + (best - second)
    k = min(top_k, len(designs))
    centroid = np.mean([d.as_array() for d in designs[:k]], axis=0)
    out = []
    for x in (trend, centroid):
        cand = DesignVector.from_array(x, n_coords).quantized(problem).clipped(problem)
        out.append(cand)
    return out


def diversify(
    problem: TrussProblem,
    rng: np.random.Generator,
    count: int,
    evaluator: Evaluator,
    stm: ShortTermMemory,
    seed: int | None = None,
):
    """Scatter refresh over the full bounds; clears short-term memory."""
    design, ev = scatter_init(problem, count, rng, evaluator, seed=seed)
    stm.clear()
    return design, ev


def tabu_search(
    problem: TrussProblem,
    max_evaluations: int,
    config: TabuConfig,
    seed: int,
) -> RunRecord:
    """Budget-bounded tabu search run; returns the best feasible design
    ever seen."""
    rng = np.random.default_rng(seed)
    budget = EvaluationBudget(max_evaluations)
    evaluator = Evaluator(problem, budget)
    stm = ShortTermMemory(config.stm_capacity)
    itm = IntermediateMemory(config.itm_capacity)
    trace: list | None = [] if config.record_trace else None

    incumbent, incumbent_ev = scatter_init(
        problem, config.descent.scatter_count, rng, evaluator, seed=seed
    )
    best, best_ev = incumbent, incumbent_ev
    if trace is not None:
        trace.append((budget.used, best_ev.mass))
    stall = 0

    def allowed(design):
        return not stm.contains(problem, design)

    def on_move(design, ev):
        stm.push(problem, design)

    # The first descent explores with full-size steps. Later descents
    # start adjacent to a local optimum (tabu moves, intensification),
    # so they polish at minimum step size; the big jumps come from
    # intensification and diversification instead.
    polish = replace(config.descent, initial_step_fraction=0.0)
    descent_cfg = config.descent

    try:
        while budget.remaining > 0:
            result = descend_from(
                evaluator,
                incumbent,
                incumbent_ev,
                descent_cfg,
                is_allowed=allowed,
                on_move=on_move,
            )
            descent_cfg = polish
            local, local_ev = result.best_design, result.best_evaluation
            itm.push(problem, local, local_ev.mass)
            if local_ev.mass < best_ev.mass:
                best, best_ev = local, local_ev
                stall = 0
                if trace is not None:
                    trace.append((budget.used, best_ev.mass))
            else:
                stall += 1
            if result.budget_exhausted:
                break

            moved = False
            if stall >= config.stall_before_diversify:
                try:
                    incumbent, incumbent_ev = diversify(
                        problem, rng, config.diversify_scatter_count, evaluator, stm, seed=seed
                    )
                except ScatterFailedError:
                    break  # unlucky refresh; keep the best found so far
                stall = 0
                moved = True
                descent_cfg = config.descent  # fresh region: explore again
            elif stall >= config.stall_before_intensify:
                for cand in intensify(problem, itm, config.centroid_top_k):
                    if stm.contains(problem, cand):
                        continue
                    ev = evaluator.evaluate(cand)
                    if ev.feasible and ev.mass < itm.worst_mass():
                        incumbent, incumbent_ev = cand, ev
                        moved = True
                        break
            if not moved:
                try:
                    incumbent, incumbent_ev = tabu_move(evaluator, local, stm)
                    stm.push(problem, incumbent)
                except ExhaustedNeighborhood:
                    try:
                        incumbent, incumbent_ev = diversify(
                            problem, rng, config.diversify_scatter_count, evaluator, stm, seed=seed
                        )
                    except ScatterFailedError:
                        break
                    stall = 0
                    descent_cfg = config.descent
            if incumbent_ev.feasible and incumbent_ev.mass < best_ev.mass:
                best, best_ev = incumbent, incumbent_ev
                if trace is not None:
                    trace.append((budget.used, best_ev.mass))
    except BudgetExhausted:
        pass

    return RunRecord(
        seed=seed,
        best_design=best,
        best_mass=best_ev.mass,
        evaluations_used=budget.used,
        feasible=best_ev.feasible,
        trace=trace,
        budget_exhausted=budget.remaining == 0,
    )
