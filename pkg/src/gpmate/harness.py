"""Experiment orchestration: run matrices, aggregation, statistics.

A plan is the full cross of problems x mutation rates x approaches x run
indices. Within a (problem, rate) cell, run r of every approach shares
one run seed -- the approach is deliberately left out of the seed mix --
so the three approaches start from identical solution populations and
identical fitness cases, giving paired samples for the statistics.

Runs persist as JSON-lines logs under
``<out>/<problem>/<rate>/<approach>/run_<r>.jsonl`` (with generation-0
and final population snapshots next to them). A finished log file is the
resume marker: reruns skip existing files, and because each run is a
pure function of its config, any worker count produces byte-identical
aggregates.
"""

import csv
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import stats
from .benchmarks import PROBLEM_NAMES
from .engine import RunConfig, run
from .seeding import mix64
from .selection import APPROACHES

__all__ = [
    "ExperimentPlan",
    "ApproachSummary",
    "CellSummary",
    "mix64",
    "run_seed_for",
    "parse_plan",
    "load_plan",
    "plan_text",
    "run_experiment",
    "analyze_dir",
    "emit_tables",
    "read_run_log",
]

def run_seed_for(master_seed, problem, rate, run_index):
    """Shared run seed: the approach is not part of the mix on purpose."""
    return mix64(master_seed, problem, int(round(rate * 10000)), run_index)


def rate_tag(rate):
    return format(rate, "g")


@dataclass(frozen=True)
class ExperimentPlan:
    problems: tuple
    rates: tuple
    approaches: tuple
    runs_per_cell: int = 30
    master_seed: int = 1
    generations: int = None

    def validate(self):
        if not self.problems or any(p not in PROBLEM_NAMES for p in self.problems):
            raise ValueError(f"problems must be a non-empty subset of {PROBLEM_NAMES}")
        if not self.rates or any(not 0.0 <= r <= 1.0 for r in self.rates):
            raise ValueError("rates must be non-empty probabilities")
        if not self.approaches or any(a not in APPROACHES for a in self.approaches):
            raise ValueError(f"approaches must be a non-empty subset of {APPROACHES}")
        if self.runs_per_cell < 1:
            raise ValueError("runs must be >= 1")
        if self.generations is not None and self.generations < 0:
            raise ValueError("generations must be >= 0")

    def cells(self):
        for problem in self.problems:
            for rate in self.rates:
                yield problem, rate

    def tasks(self):
        for problem, rate in self.cells():
            for approach in self.approaches:
                for r in range(self.runs_per_cell):
                    yield problem, rate, approach, r


_PLAN_KEYS = ("problems", "rates", "approaches", "runs", "master_seed", "generations")


def parse_plan(text):
    """Flat key=value plan format; lists are comma-separated.

    Required keys: problems, rates, approaches, runs, master_seed.
    Optional: generations (the quick-CI override for shorter runs).
    Lines starting with '#' are comments.
    """
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"plan line {lineno}: expected key = value")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _PLAN_KEYS:
            raise ValueError(f"plan line {lineno}: unknown key {key!r}")
        if key in values:
            raise ValueError(f"plan line {lineno}: duplicate key {key!r}")
        values[key] = value.strip()
    missing = [k for k in _PLAN_KEYS[:5] if k not in values]
    if missing:
        raise ValueError(f"plan is missing keys: {', '.join(missing)}")
    split = lambda s: tuple(part.strip() for part in s.split(",") if part.strip())
    plan = ExperimentPlan(
        problems=split(values["problems"]),
        rates=tuple(float(r) for r in split(values["rates"])),
        approaches=split(values["approaches"]),
        runs_per_cell=int(values["runs"]),
        master_seed=int(values["master_seed"]),
        generations=int(values["generations"]) if "generations" in values else None,
    )
    plan.validate()
    return plan


def load_plan(path):
    with open(path) as fh:
        return parse_plan(fh.read())


def plan_text(plan):
    lines = [
        f"problems = {', '.join(plan.problems)}",
        f"rates = {', '.join(rate_tag(r) for r in plan.rates)}",
        f"approaches = {', '.join(plan.approaches)}",
        f"runs = {plan.runs_per_cell}",
        f"master_seed = {plan.master_seed}",
    ]
    if plan.generations is not None:
        lines.append(f"generations = {plan.generations}")
    return "\n".join(lines) + "\n"


def _run_dir(out_dir, problem, rate, approach):
    return os.path.join(out_dir, problem, rate_tag(rate), approach)


def run_log_path(out_dir, problem, rate, approach, r):
    return os.path.join(_run_dir(out_dir, problem, rate, approach), f"run_{r}.jsonl")


def _write_snapshot_entries(entries, path):
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        for sol, pref, fit in entries:
            fh.write(f"{sol}\t{pref}\t{repr(fit)}\n")
    os.replace(tmp, path)


def execute_run(out_dir, problem, rate, approach, r, master_seed, generations=None):
    """Run one cell entry and persist it; skips work if already present."""
    path = run_log_path(out_dir, problem, rate, approach, r)
    if os.path.exists(path):
        return path
    os.makedirs(os.path.dirname(path), exist_ok=True)
    overrides = {} if generations is None else {"generations": generations}
    config = RunConfig(
        approach=approach,
        problem=problem,
        mutation_prob=rate,
        run_seed=run_seed_for(master_seed, problem, rate, r),
        **overrides,
    )
    log = run(config)
    base = path[: -len(".jsonl")]
    _write_snapshot_entries(log.snapshot_initial, base + "_gen0.snap")
    _write_snapshot_entries(log.snapshot_final, base + "_final.snap")
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(log.to_jsonl())
    os.replace(tmp, path)
    return path


def _worker(task):
    out_dir, problem, rate, approach, r, master_seed, generations = task
    return execute_run(out_dir, problem, rate, approach, r, master_seed, generations)


def run_experiment(plan, out_dir, jobs=1):
    """Execute the whole plan (resuming past completed runs), then
    aggregate every cell. Returns the list of CellSummary objects."""
    plan.validate()
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "plan.txt"), "w") as fh:
        fh.write(plan_text(plan))
    tasks = [
        (out_dir, problem, rate, approach, r, plan.master_seed, plan.generations)
        for problem, rate, approach, r in plan.tasks()
        if not os.path.exists(run_log_path(out_dir, problem, rate, approach, r))
    ]
    if jobs <= 1 or len(tasks) <= 1:
        for task in tasks:
            _worker(task)
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            # consume to surface worker exceptions
            for _ in pool.map(_worker, tasks, chunksize=1):
                pass
    summaries, missing = analyze_dir(out_dir, plan)
    if missing:
        raise RuntimeError(f"{len(missing)} runs missing after execution")
    return summaries


def read_run_log(path):
    """Parse one run log into {"meta": ..., "gens": [...], "summary": ...}."""
    meta = None
    gens = []
    summary = None
    with open(path) as fh:
        for line in fh:
            record = json.loads(line)
            kind = record.pop("type")
            if kind == "meta":
                meta = record
            elif kind == "gen":
                gens.append(record)
            elif kind == "summary":
                summary = record
    if meta is None or summary is None:
        raise ValueError(f"run log {path} is incomplete")
    return {"meta": meta, "gens": gens, "summary": summary}


@dataclass(frozen=True)
class ApproachSummary:
    approach: str
    n_runs: int
    mbf_mean: float
    mbf_stdev: float
    success_count: int
    mean_unique_pct: float
    root_avoided: int

    @property
    def success_rate(self):
        return self.success_count / self.n_runs


@dataclass(frozen=True)
class CellSummary:
    problem: str
    rate: float
    approaches: tuple
    by_approach: dict
    tests: tuple


def _approach_summary(approach, summaries, pop_size):
    finals = np.array([s["final_best"] for s in summaries])
    uniques = np.array([s["final_unique"] for s in summaries], dtype=np.float64)
    n = len(summaries)
    return ApproachSummary(
        approach=approach,
        n_runs=n,
        mbf_mean=float(finals.mean()),
        mbf_stdev=float(finals.std(ddof=1)) if n > 1 else 0.0,
        success_count=sum(1 for s in summaries if s["success"]),
        mean_unique_pct=float((uniques / pop_size).mean() * 100.0),
        root_avoided=sum(1 for s in summaries if not s["root_converged"]),
    )


def _pairs(approaches):
    return [
        (i, j)
        for i in range(len(approaches))
        for j in range(i + 1, len(approaches))
    ]


def _cell_tests(approaches, mbf, unique, success, avoided):
    """The test cascade for one cell: omnibus Friedman on the quantitative
    measures and Cochran's Q on the binary ones, each followed by
    Bonferroni-corrected pairwise post hocs when the omnibus finds
    differences. Bartlett variance checks ride along for the raw data."""
    reports = []
    pairs = _pairs(approaches)
    m = len(pairs)

    for name, matrix in (("mbf", mbf), ("unique_solutions", unique)):
        statistic, p = stats.friedman_test(matrix)
        omnibus = stats.report(f"friedman_{name}", statistic, p)
        reports.append(omnibus)
        if omnibus["significant"]:
            for i, j in pairs:
                w, wp = stats.wilcoxon_signed_rank(matrix[:, i], matrix[:, j])
                reports.append(
                    stats.report(
                        f"wilcoxon_{name}_{approaches[i]}_vs_{approaches[j]}",
                        w,
                        wp,
                        comparisons=m,
                    )
                )
        try:
            b, bp = stats.bartlett_test(matrix)
            reports.append(stats.report(f"bartlett_{name}", b, bp))
        except ValueError as exc:
            reports.append({"test": f"bartlett_{name}", "error": str(exc)})

    for name, matrix in (("success", success), ("root_avoided", avoided)):
        statistic, p = stats.cochran_q(matrix)
        omnibus = stats.report(f"cochran_q_{name}", statistic, p)
        reports.append(omnibus)
        if omnibus["significant"]:
            for i, j in pairs:
                q, qp = stats.mcnemar(matrix[:, i], matrix[:, j])
                reports.append(
                    stats.report(
                        f"mcnemar_{name}_{approaches[i]}_vs_{approaches[j]}",
                        q,
                        qp,
                        comparisons=m,
                    )
                )
    return reports


def analyze_dir(out_dir, plan=None):
    """Aggregate all cells of a finished (or partial) experiment.

    Returns (summaries, missing): CellSummary per complete cell and the
    list of missing run paths. Writes summary.csv and stats.json into
    every complete cell directory.
    """
    if plan is None:
        plan = load_plan(os.path.join(out_dir, "plan.txt"))
    summaries = []
    missing = []
    for problem, rate in plan.cells():
        per_approach = {}
        cell_missing = False
        for approach in plan.approaches:
            runs = []
            for r in range(plan.runs_per_cell):
                path = run_log_path(out_dir, problem, rate, approach, r)
                if not os.path.exists(path):
                    missing.append(path)
                    cell_missing = True
                    continue
                runs.append(read_run_log(path))
            per_approach[approach] = runs
        if cell_missing:
            continue
        pop_size = per_approach[plan.approaches[0]][0]["meta"]["population_size"]
        by_approach = {
            approach: _approach_summary(
                approach, [r["summary"] for r in runs], pop_size
            )
            for approach, runs in per_approach.items()
        }
        k = len(plan.approaches)
        n = plan.runs_per_cell
        mbf = np.empty((n, k))
        unique = np.empty((n, k))
        success = np.empty((n, k), dtype=bool)
        avoided = np.empty((n, k), dtype=bool)
        for j, approach in enumerate(plan.approaches):
            for i, record in enumerate(per_approach[approach]):
                s = record["summary"]
                mbf[i, j] = s["final_best"]
                unique[i, j] = s["final_unique"]
                success[i, j] = s["success"]
                avoided[i, j] = not s["root_converged"]
        tests = (
            _cell_tests(plan.approaches, mbf, unique, success, avoided)
            if k >= 2 and n >= 2
            else []
        )
        cell = CellSummary(
            problem=problem,
            rate=rate,
            approaches=plan.approaches,
            by_approach=by_approach,
            tests=tuple(tests),
        )
        _write_cell_files(out_dir, cell)
        summaries.append(cell)
    return summaries, missing


def _write_cell_files(out_dir, cell):
    cell_dir = os.path.join(out_dir, cell.problem, rate_tag(cell.rate))
    os.makedirs(cell_dir, exist_ok=True)
    with open(os.path.join(cell_dir, "summary.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "approach",
                "runs",
                "mbf_mean",
                "mbf_stdev",
                "success_count",
                "success_rate",
                "mean_final_unique_pct",
                "root_convergence_avoided",
            ]
        )
        for approach in cell.approaches:
            s = cell.by_approach[approach]
            writer.writerow(
                [
                    s.approach,
                    s.n_runs,
                    repr(s.mbf_mean),
                    repr(s.mbf_stdev),
                    s.success_count,
                    repr(s.success_rate),
                    repr(s.mean_unique_pct),
                    s.root_avoided,
                ]
            )
    with open(os.path.join(cell_dir, "stats.json"), "w") as fh:
        json.dump(
            {
                "problem": cell.problem,
                "rate": cell.rate,
                "n_runs": cell.by_approach[cell.approaches[0]].n_runs,
                "tests": list(cell.tests),
            },
            fh,
            indent=2,
            sort_keys=True,
        )
        fh.write("\n")


def _fmt(value):
    return format(value, ".6g")


def emit_tables(summaries, tables_dir):
    """CSV tables across cells: MBF/StDev per rate, success rates, unique
    solution percentages, and root-convergence-avoided counts. Missing
    cells appear as NA, never as silent zeros."""
    if not summaries:
        raise ValueError("no cell summaries to tabulate")
    os.makedirs(tables_dir, exist_ok=True)
    approaches = summaries[0].approaches
    problems = []
    rates = []
    for cell in summaries:
        if cell.problem not in problems:
            problems.append(cell.problem)
        if cell.rate not in rates:
            rates.append(cell.rate)
    index = {(c.problem, c.rate): c for c in summaries}
    paths = []

    for rate in rates:
        path = os.path.join(tables_dir, f"mbf_rate_{rate_tag(rate)}.csv")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["problem", "metric", *approaches])
            for problem in problems:
                cell = index.get((problem, rate))
                for metric, attr in (("MBF", "mbf_mean"), ("StDev", "mbf_stdev")):
                    row = [problem, metric]
                    for approach in approaches:
                        row.append(
                            _fmt(getattr(cell.by_approach[approach], attr))
                            if cell
                            else "NA"
                        )
                    writer.writerow(row)
        paths.append(path)

    def cross_table(filename, value):
        path = os.path.join(tables_dir, filename)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["problem", "rate", *approaches])
            for problem in problems:
                for rate in rates:
                    cell = index.get((problem, rate))
                    row = [problem, rate_tag(rate)]
                    for approach in approaches:
                        row.append(value(cell.by_approach[approach]) if cell else "NA")
                    writer.writerow(row)
        paths.append(path)

    cross_table("success_rate.csv", lambda s: _fmt(100.0 * s.success_rate))
    cross_table("unique_solutions_pct.csv", lambda s: _fmt(s.mean_unique_pct))
    cross_table(
        "root_convergence_avoided.csv", lambda s: f"{s.root_avoided}/{s.n_runs}"
    )
    return paths
