"""Benchmark command line.

    trussopt run --problem FILE --algo {sd|ts|sa} --runs N --seed S --out DIR
                 [--threshold 2900] [--evals N] [--svg] [--trace] [--post-process]
    trussopt render --problem FILE --solution FILE --out SVG
    trussopt summarize --dir DIR [--threshold 2900]

Exit codes: 0 success, 2 unreadable/invalid problem or solution file,
3 invalid algorithm name, 4 output directory or file not writable.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from trussopt import report
from trussopt.annealing import AnnealConfig, anneal
from trussopt.descent import DescentConfig, run_sd
from trussopt.problem_io import ProblemFileError, load_problem
from trussopt.render import render_svg
from trussopt.report import SolutionFileError
from trussopt.search import RunRecord, ScatterFailedError, summarize
from trussopt.tabu import TabuConfig, tabu_search
from trussopt.truss import (
    RepairFailedError,
    TrussProblem,
    reduce_topology,
    repair_minimal,
    solve,
)

EXIT_OK = 0
EXIT_PROBLEM_FILE = 2
EXIT_BAD_ALGORITHM = 3
EXIT_OUTPUT_DIR = 4

ALGORITHMS = ("sd", "ts", "sa")
# sd/ts budgets are caps (sd stops at its local optimum, ts runs the cap
# out); sa always consumes its budget exactly.
DEFAULT_EVALUATIONS = {"sd": 20_000, "ts": 24_000, "sa": 34_000}


def _load_problem_or_exit(path: str) -> TrussProblem:
    try:
        return load_problem(path)
    except ProblemFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        sys.exit(EXIT_PROBLEM_FILE)


def _writable_dir_or_exit(path: str) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write_probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        print(f"error: output directory {out} is not writable: {exc}", file=sys.stderr)
        sys.exit(EXIT_OUTPUT_DIR)
    return out


def _run_one(problem: TrussProblem, algo: str, evals: int, seed: int, trace: bool) -> RunRecord:
    if algo == "sd":
        return run_sd(problem, evals, DescentConfig(record_trace=trace), seed)
    if algo == "ts":
        cfg = TabuConfig.for_problem(problem, record_trace=trace)
        return tabu_search(problem, evals, cfg, seed)
    return anneal(problem, evals, AnnealConfig(evaluations_total=evals, record_trace=trace), seed)


def _post_process(problem: TrussProblem, record: RunRecord, out: Path) -> list[str]:
    """Repair an infeasible best, reduce its topology, repair the reduced
    structure if needed; writes the dump files and returns report lines."""
    lines = []
    design = record.best_design
    ev = solve(problem, design)

    if not ev.feasible:
        try:
            design, ev = repair_minimal(problem, design, ev)
            lines.append(f"repaired infeasible best: mass {record.best_mass:.1f} -> {ev.mass:.1f} kg")
            report.write_solution(
                out / "best_solution_repaired.json", problem, design, ev.mass, ev.feasible
            )
            (out / "best_solution_repaired.txt").write_text(
                report.solution_text(problem, design, ev.mass, title="repaired best solution")
            )
        except RepairFailedError as exc:
            lines.append(f"repair of infeasible best failed: {exc}")
            return lines

    reduced, rep = reduce_topology(problem, design, ev)
    if not rep.removed_member_ids:
        lines.append("no minimum-area members to remove")
        return lines
    lines.append(f"removed minimum-area members: {list(rep.removed_member_ids)}")
    sub = rep.problem
    sub_ev = rep.evaluation
    if rep.singular:
        lines.append("reduced structure is a mechanism; keeping the full topology")
        return lines
    (out / "best_solution_reduced.txt").write_text(
        report.solution_text(sub, reduced, sub_ev.mass, title="reduced-topology best solution")
    )
    if rep.feasible:
        lines.append(f"reduced topology feasible, mass {sub_ev.mass:.1f} kg")
    else:
        worst = sub_ev.max_violation()
        lines.append(f"reduced topology violates constraints (max violation {worst:.4g})")
        try:
            fixed, fixed_ev = repair_minimal(sub, reduced, sub_ev)
            lines.append(f"repaired reduced topology: mass {fixed_ev.mass:.1f} kg")
            (out / "best_solution_reduced_repaired.txt").write_text(
                report.solution_text(
                    sub, fixed, fixed_ev.mass, title="repaired reduced-topology best solution"
                )
            )
        except RepairFailedError as exc:
            lines.append(f"repair of reduced topology failed: {exc}")
    return lines


def cmd_run(args) -> int:
    problem = _load_problem_or_exit(args.problem)
    if args.algo not in ALGORITHMS:
        print(
            f"error: unknown algorithm {args.algo!r} (expected one of {', '.join(ALGORITHMS)})",
            file=sys.stderr,
        )
        return EXIT_BAD_ALGORITHM
    out = _writable_dir_or_exit(args.out)
    evals = args.evals if args.evals is not None else DEFAULT_EVALUATIONS[args.algo]

    records = []
    for seed in range(args.seed, args.seed + args.runs):
        try:
            record = _run_one(problem, args.algo, evals, seed, args.trace)
        except ScatterFailedError as exc:
            print(f"seed {seed}: {exc}; skipping run", file=sys.stderr)
            continue
        records.append(record)
        report.write_run_record(out, problem, args.algo, record)
        print(
            f"seed {seed}: mass {record.best_mass:.1f} kg, "
            f"{record.evaluations_used} evals, feasible={record.feasible}"
        )

    if not records:
        print("error: no run produced a result", file=sys.stderr)
        return 1

    summary = summarize(records, args.threshold)
    text = report.summary_text(summary, algorithm=args.algo)
    print(text, end="")
    (out / "summary.txt").write_text(text)
    (out / "summary.json").write_text(
        json.dumps({"algorithm": args.algo, **report.summary_to_dict(summary)}, indent=2) + "\n"
    )

    best = min(records, key=lambda r: r.best_mass)
    report.write_solution(
        out / "best_solution.json", problem, best.best_design, best.best_mass, best.feasible
    )
    (out / "best_solution.txt").write_text(
        report.solution_text(
            problem, best.best_design, best.best_mass, title=f"best {args.algo} solution (seed {best.seed})"
        )
    )
    if args.svg:
        (out / "best_solution.svg").write_text(
            render_svg(problem, best.best_design, title=f"best {args.algo} solution")
        )
    if args.post_process:
        for line in _post_process(problem, best, out):
            print(f"post-process: {line}")
        if args.svg:
            reduced, rep = reduce_topology(problem, best.best_design, solve(problem, best.best_design))
            if rep.removed_member_ids and not rep.singular:
                (out / "best_solution_reduced.svg").write_text(
                    render_svg(rep.problem, reduced, title=f"reduced {args.algo} solution")
                )
    return EXIT_OK


def cmd_render(args) -> int:
    problem = _load_problem_or_exit(args.problem)
    try:
        design = report.load_solution(args.solution, problem)
    except SolutionFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PROBLEM_FILE
    svg = render_svg(problem, design)
    try:
        Path(args.out).write_text(svg)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_OUTPUT_DIR
    return EXIT_OK


def cmd_summarize(args) -> int:
    directory = Path(args.dir)
    records = report.read_run_records(directory)
    if not records:
        print(f"error: no run_*.json records in {directory}", file=sys.stderr)
        return 1
    summary = report.summarize_records(records, args.threshold)
    algos = sorted({r.get("algorithm", "?") for r in records})
    print(report.summary_text(summary, algorithm=", ".join(algos)), end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trussopt", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a seeded benchmark campaign")
    p_run.add_argument("--problem", required=True, help="problem-definition file (TOML)")
    p_run.add_argument("--algo", required=True, help="sd, ts or sa")
    p_run.add_argument("--runs", type=int, default=10)
    p_run.add_argument("--seed", type=int, default=0, help="base seed; run i uses seed+i")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--threshold", type=float, default=2900.0)
    p_run.add_argument("--evals", type=int, default=None, help="evaluation budget per run")
    p_run.add_argument("--svg", action="store_true", help="render the best solution to SVG")
    p_run.add_argument("--trace", action="store_true", help="record incumbent-mass traces")
    p_run.add_argument(
        "--post-process",
        action="store_true",
        help="remove minimum-area members from the best solution and repair violations",
    )
    p_run.set_defaults(func=cmd_run)

    p_render = sub.add_parser("render", help="render a solution file to SVG")
    p_render.add_argument("--problem", required=True)
    p_render.add_argument("--solution", required=True, help="solution JSON (from `run`)")
    p_render.add_argument("--out", required=True, help="output SVG path")
    p_render.set_defaults(func=cmd_render)

    p_sum = sub.add_parser("summarize", help="recompute the summary from run records")
    p_sum.add_argument("--dir", required=True)
    p_sum.add_argument("--threshold", type=float, default=2900.0)
    p_sum.set_defaults(func=cmd_summarize)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
