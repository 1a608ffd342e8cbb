"""Acceptance suite: eight criteria, one pass/fail line each.

Each criterion prints exactly one line of the form

    criterion N (<short name>): PASS|FAIL

followed by a hard assert. Campaign criteria use fixed, committed seeds
(0..9) so every number here is reproducible bit-for-bit.
"""

import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from trussopt import mass, repair_minimal, reduce_topology, solve
from trussopt.annealing import AnnealConfig, anneal
from trussopt.descent import DescentConfig, run_sd
from trussopt.tabu import TabuConfig, tabu_search

from conftest import design_from_reference
from oracle import method_of_joints_stresses, random_determinate_truss
from reference_solutions import (
    ANNEALING_ADJUSTED,
    STEEPEST_DESCENT,
    TABU_SEARCH,
)

COMMITTED_SEEDS = tuple(range(10))
SD_BUDGET = 20_000
TS_BUDGET = 24_000
SA_BUDGET = 34_000
THRESHOLD = 2900.0


def report(number, name, checks):
    ok = all(checks.values())
    print(f"criterion {number} ({name}): {'PASS' if ok else 'FAIL'}")
    failed = [k for k, v in checks.items() if not v]
    assert ok, f"failed checks: {failed}"


class Campaign:
    def __init__(self, records, elapsed):
        self.records = records
        self.elapsed = elapsed

    @property
    def masses(self):
        return [r.best_mass for r in self.records]

    @property
    def evals(self):
        return [r.evaluations_used for r in self.records]


@pytest.fixture(scope="module")
def sd_campaign(problem):
    start = time.perf_counter()
    records = [run_sd(problem, SD_BUDGET, DescentConfig(), s) for s in COMMITTED_SEEDS]
    return Campaign(records, time.perf_counter() - start)


@pytest.fixture(scope="module")
def ts_campaign(problem):
    cfg = TabuConfig.for_problem(problem)
    start = time.perf_counter()
    records = [tabu_search(problem, TS_BUDGET, cfg, s) for s in COMMITTED_SEEDS]
    return Campaign(records, time.perf_counter() - start)


@pytest.fixture(scope="module")
def sa_campaign(problem):
    start = time.perf_counter()
    records = [
        anneal(problem, SA_BUDGET, AnnealConfig(evaluations_total=SA_BUDGET), s)
        for s in COMMITTED_SEEDS
    ]
    return Campaign(records, time.perf_counter() - start)


def repaired_masses(problem, campaign):
    out = []
    for r in campaign.records:
        if r.feasible:
            out.append(r.best_mass)
        else:
            _, ev = repair_minimal(problem, r.best_design)
            out.append(ev.mass)
    return out


def test_criterion_1_fea_oracle_equivalence():
    rng = np.random.default_rng(2024)
    start = time.perf_counter()
    count, matched = 0, 0
    while count < 20:
        problem, design = random_determinate_truss(rng)
        ev = solve(problem, design)
        if ev.singular:
            continue
        count += 1
        expected = method_of_joints_stresses(problem, design)
        if np.allclose(ev.stresses, expected, rtol=1e-8, atol=1e-8):
            matched += 1
    elapsed = time.perf_counter() - start
    report(1, "FEA oracle equivalence", {
        "20 determinate trusses checked": count == 20,
        "all stresses match oracle at 1e-8": matched == count,
        "runtime under 1 s": elapsed < 1.0,
    })


def test_criterion_2_geometry_calibration(problem):
    ts_mass = mass(problem, design_from_reference(TABU_SEARCH))
    sa_mass = mass(problem, design_from_reference(ANNEALING_ADJUSTED))
    report(2, "geometry calibration", {
        "reference tabu design within 1% of 1598 kg": abs(ts_mass - 1598.0) / 1598.0 < 0.01,
        "reference adjusted annealing design within 1% of 1491 kg":
            abs(sa_mass - 1491.0) / 1491.0 < 0.01,
    })


def test_criterion_3_post_processing_replication(problem):
    sd = design_from_reference(STEEPEST_DESCENT)
    sd_reduced, sd_rep = reduce_topology(problem, sd, solve(problem, sd))
    member_23 = next(
        m for m in sd_rep.problem.members if {m.end_a, m.end_b} == {2, 3}
    )
    idx_23 = list(sd_rep.problem.members).index(member_23)
    excess = sd_rep.evaluation.buckling_excess
    only_member_23_buckles = (
        excess[idx_23] > 0.0
        and np.all(np.delete(excess, idx_23) == 0.0)
        and np.all(sd_rep.evaluation.stress_excess == 0.0)
        and np.all(sd_rep.evaluation.length_deficit == 0.0)
    )
    repaired, rep_ev = repair_minimal(sd_rep.problem, sd_reduced, sd_rep.evaluation)
    area_increase = float(np.max(repaired.areas - sd_reduced.areas))
    only_that_area_changed = (
        np.count_nonzero(repaired.areas != sd_reduced.areas) == 1
        and repaired.areas[idx_23] > sd_reduced.areas[idx_23]
    )

    ts = design_from_reference(TABU_SEARCH)
    _, ts_rep = reduce_topology(problem, ts, solve(problem, ts))

    report(3, "post-processing replication", {
        "reduced steepest-descent design buckles only between nodes 2 and 3":
            not sd_rep.feasible and only_member_23_buckles,
        "repair touches only that member": only_that_area_changed,
        "repair area increase at most 0.1 cm^2": 0.0 < area_increase <= 0.1,
        "repaired design feasible": rep_ev.feasible,
        "reduced tabu design has zero violations": ts_rep.feasible and not ts_rep.singular,
    })


def test_criterion_4_sd_campaign(problem, sd_campaign):
    rerun = run_sd(problem, SD_BUDGET, DescentConfig(), COMMITTED_SEEDS[0])
    first = sd_campaign.records[0]
    deterministic = (
        rerun.best_mass == first.best_mass
        and np.array_equal(rerun.best_design.as_array(), first.best_design.as_array())
        and rerun.evaluations_used == first.evaluations_used
    )
    below = sum(m < THRESHOLD for m in sd_campaign.masses)
    avg_evals = float(np.mean(sd_campaign.evals))
    report(4, "steepest-descent campaign", {
        "all 10 designs feasible": all(r.feasible for r in sd_campaign.records),
        "deterministic per seed": deterministic,
        "at least 2/10 below 2900 kg": below >= 2,
        "average evaluations within [1e3, 2e4]": 1e3 <= avg_evals <= 2e4,
        "runtime under 2 min": sd_campaign.elapsed < 120.0,
    })


def test_criterion_5_ts_campaign(ts_campaign):
    below = sum(m < THRESHOLD for m in ts_campaign.masses)
    report(5, "tabu-search campaign", {
        "best mass at most 2000 kg": min(ts_campaign.masses) <= 2000.0,
        "at least 6/10 below 2900 kg": below >= 6,
        "average evaluations strictly below 34000": float(np.mean(ts_campaign.evals)) < 34_000,
        "runtime under 10 min": ts_campaign.elapsed < 600.0,
    })


def test_criterion_6_sa_campaign(problem, sa_campaign):
    masses = repaired_masses(problem, sa_campaign)
    below = sum(m < THRESHOLD for m in masses)
    plateaus = [r.extra["plateau_acceptance"] for r in sa_campaign.records]
    report(6, "simulated-annealing campaign", {
        "exactly 34000 evaluations per run": all(e == SA_BUDGET for e in sa_campaign.evals),
        "at least 8/10 below 2900 kg after repair": below >= 8,
        "best repaired mass at most 1800 kg": min(masses) <= 1800.0,
        "plateau acceptance within 0.44 +/- 0.05":
            all(abs(p - 0.44) <= 0.05 for p in plateaus),
        "runtime under 15 min": sa_campaign.elapsed < 900.0,
    })


def test_criterion_7_property_suites():
    tests_dir = Path(__file__).parent
    targets = [
        "test_tabu.py::TestShortTermMemory",
        "test_tabu.py::TestTabuMove",
        "test_tabu.py::TestTabuSearch::test_best_trace_monotone",
        "test_annealing.py::TestMetropolis",
        "test_annealing.py::TestPenalizedCost",
        "test_annealing.py::TestWeightUpdate",
        "test_search.py::TestBudget",
        "test_truss.py::TestBuckling",
        "test_truss.py::TestMass",
    ]
    start = time.perf_counter()
    proc = subprocess.run(
        [sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider"]
        + [str(tests_dir / t) for t in targets],
        cwd=tests_dir.parent,
        capture_output=True,
        text=True,
    )
    elapsed = time.perf_counter() - start
    report(7, "property suites", {
        "all property suites pass": proc.returncode == 0,
        "runnable in under 30 s": elapsed < 30.0,
    })


def test_criterion_8_method_ordering(problem, sd_campaign, ts_campaign, sa_campaign):
    sd_avg = float(np.mean(sd_campaign.masses))
    ts_avg = float(np.mean(ts_campaign.masses))
    sa_avg = float(np.mean(repaired_masses(problem, sa_campaign)))
    print(f"average masses over committed seeds: "
          f"sa={sa_avg:.1f} ts={ts_avg:.1f} sd={sd_avg:.1f}")
    report(8, "method ordering sa < ts < sd", {
        "sa average below ts average": sa_avg < ts_avg,
        "ts average below sd average": ts_avg < sd_avg,
    })
