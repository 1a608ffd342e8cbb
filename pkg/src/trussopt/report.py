"""Structured run reporting: per-run record files, the summary statistics
block, and best-solution parameter dumps.

Output directory layout (written by the CLI `run` command):

    run_<seed>.json       one machine-readable record per run
    summary.txt           the statistics block (also printed to stdout)
    summary.json          the same summary, machine-readable
    best_solution.txt     parameter dump of the best design
    best_solution.json    machine-readable best design (input to `render`)

Masses are displayed to 0.1 kg, areas to 0.01 cm^2 and coordinates to
1 cm; the JSON files keep full precision so summaries recomputed from
the per-run files match the emitted summary exactly.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from trussopt.search import RunRecord, RunSummary, summarize
from trussopt.truss import DesignVector, TrussProblem


class SolutionFileError(ValueError):
    """A solution file is missing or malformed."""


def design_to_dict(problem: TrussProblem, design: DesignVector) -> dict:
    return {
        name: float(v)
        for name, v in zip(problem.variable_names(), design.as_array())
    }


def dict_to_design(problem: TrussProblem, variables: dict) -> DesignVector:
    names = problem.variable_names()
    missing = [n for n in names if n not in variables]
    if missing:
        raise SolutionFileError(f"solution is missing variables: {missing}")
    x = np.array([float(variables[n]) for n in names])
    return DesignVector.from_array(x, 2 * len(problem.movable_nodes()))


def record_to_dict(problem: TrussProblem, algorithm: str, record: RunRecord) -> dict:
    data = {
        "algorithm": algorithm,
        "seed": record.seed,
        "best_mass": record.best_mass,
        "evaluations_used": record.evaluations_used,
        "feasible": record.feasible,
        "budget_exhausted": record.budget_exhausted,
        "variables": design_to_dict(problem, record.best_design),
    }
    if record.trace is not None:
        data["trace"] = [[int(i), float(m)] for i, m in record.trace]
    if record.extra:
        data["extra"] = _jsonable(record.extra)
    return data


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


def write_run_record(
    directory: Path, problem: TrussProblem, algorithm: str, record: RunRecord
) -> Path:
    path = Path(directory) / f"run_{record.seed}.json"
    path.write_text(json.dumps(record_to_dict(problem, algorithm, record), indent=2) + "\n")
    return path


def read_run_records(directory: Path) -> list[dict]:
    paths = sorted(Path(directory).glob("run_*.json"), key=lambda p: p.name)
    records = [json.loads(p.read_text()) for p in paths]
    records.sort(key=lambda r: r["seed"])
    return records


def summarize_records(records: list[dict], threshold: float) -> RunSummary:
    """Recompute the summary from on-disk records (round-trip check path)."""
    runs = [
        RunRecord(
            seed=r["seed"],
            best_design=None,
            best_mass=float(r["best_mass"]),
            evaluations_used=int(r["evaluations_used"]),
            feasible=bool(r["feasible"]),
        )
        for r in records
    ]
    return summarize(runs, threshold)


def _threshold_label(threshold: float) -> str:
    return f"{threshold:g}"


def summary_rows(summary: RunSummary) -> list[tuple[str, str]]:
    thr = _threshold_label(summary.threshold)
    return [
        ("Best mass (kg)", f"{summary.best_mass:.1f}"),
        ("Best mass evals", str(summary.best_mass_evals)),
        ("Worst mass (kg)", f"{summary.worst_mass:.1f}"),
        ("Worst mass evals", str(summary.worst_mass_evals)),
        ("Average mass (kg)", f"{summary.average_mass:.1f}"),
        ("Std. Dev. of mass (kg)", f"{summary.stddev_mass:.1f}"),
        ("Lowest evals", str(summary.lowest_evals)),
        ("Highest evals", str(summary.highest_evals)),
        ("Average evals", f"{summary.average_evals:.1f}"),
        (
            f"No. runs below {thr}kg threshold",
            f"{summary.runs_below_threshold}/{summary.total_runs}",
        ),
    ]


def summary_text(summary: RunSummary, algorithm: str | None = None) -> str:
    rows = summary_rows(summary)
    width = max(len(label) for label, _ in rows)
    lines = []
    if algorithm:
        lines.append(f"Algorithm: {algorithm}")
    lines += [f"{label:<{width}}  {value}" for label, value in rows]
    return "\n".join(lines) + "\n"


def summary_to_dict(summary: RunSummary) -> dict:
    return {
        "best_mass": summary.best_mass,
        "best_mass_evals": summary.best_mass_evals,
        "worst_mass": summary.worst_mass,
        "worst_mass_evals": summary.worst_mass_evals,
        "average_mass": summary.average_mass,
        "stddev_mass": summary.stddev_mass,
        "lowest_evals": summary.lowest_evals,
        "highest_evals": summary.highest_evals,
        "average_evals": summary.average_evals,
        "runs_below_threshold": summary.runs_below_threshold,
        "threshold": summary.threshold,
        "total_runs": summary.total_runs,
    }


def solution_rows(
    problem: TrussProblem, design: DesignVector, mass_kg: float
) -> list[tuple[str, str]]:
    rows = []
    for i, n in enumerate(problem.movable_nodes()):
        x, y = design.coords[2 * i], design.coords[2 * i + 1]
        rows.append((f"x_{n.id}, y_{n.id} (cm)", f"{x:.0f},{y:.0f}"))
    for m, a in zip(problem.members, design.areas):
        rows.append((f"A_{m.id} (cm ²)", f"{a:.2f}"))
    rows.append(("Mass (kg)", f"{mass_kg:.1f}"))
    return rows


def solution_text(
    problem: TrussProblem,
    design: DesignVector,
    mass_kg: float,
    title: str | None = None,
) -> str:
    rows = solution_rows(problem, design, mass_kg)
    width = max(len(label) for label, _ in rows)
    lines = [title] if title else []
    lines += [f"{label:<{width}}  {value}" for label, value in rows]
    return "\n".join(lines) + "\n"


def write_solution(
    path: Path,
    problem: TrussProblem,
    design: DesignVector,
    mass_kg: float,
    feasible: bool,
) -> Path:
    path = Path(path)
    data = {
        "variables": design_to_dict(problem, design),
        "mass": mass_kg,
        "feasible": feasible,
    }
    path.write_text(json.dumps(data, indent=2) + "\n")
    return path


def load_solution(path: Path, problem: TrussProblem) -> DesignVector:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise SolutionFileError(f"cannot read solution file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SolutionFileError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(data, dict) or "variables" not in data:
        raise SolutionFileError(f"{path}: missing 'variables' table")
    return dict_to_design(problem, data["variables"])
