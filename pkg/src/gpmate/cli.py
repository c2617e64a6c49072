"""Command-line interface.

Subcommands: run (single run), experiment (full plan), analyze (tables +
stats), plot (SVG charts), bench (backend comparison). Exit codes:
0 success, 1 usage error, 2 incomplete data.
"""

import argparse
import sys

from .benchmarks import PROBLEM_NAMES, write_cases_csv
from .selection import APPROACHES

USAGE_ERROR = 1
INCOMPLETE_DATA = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


def build_parser():
    parser = _Parser(prog="gpmate")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a single evolutionary run")
    p_run.add_argument("--approach", required=True, choices=APPROACHES)
    p_run.add_argument("--problem", required=True, choices=PROBLEM_NAMES)
    p_run.add_argument("--mutation", required=True, type=float)
    p_run.add_argument("--seed", required=True, type=int)
    p_run.add_argument("--generations", type=int, default=1500)
    p_run.add_argument("--pop", type=int, default=100)
    p_run.add_argument("--out", help="JSON-lines log file (default: stdout)")
    p_run.add_argument("--couples", help="also write the couple log here")
    p_run.add_argument("--export-cases", help="write the fitness cases as CSV")

    p_exp = sub.add_parser("experiment", help="execute a full plan")
    p_exp.add_argument("--plan", required=True)
    p_exp.add_argument("--jobs", type=int, default=1)
    p_exp.add_argument("--out", required=True)
    p_exp.add_argument(
        "--generations", type=int, help="override run length (quick-CI mode)"
    )

    p_ana = sub.add_parser("analyze", help="aggregate an experiment directory")
    p_ana.add_argument("--in", dest="in_dir", required=True)

    p_plot = sub.add_parser("plot", help="SVG charts from an experiment directory")
    p_plot.add_argument("--in", dest="in_dir", required=True)
    p_plot.add_argument("--out", required=True)

    p_bench = sub.add_parser("bench", help="compare the numba and numpy backends")
    p_bench.add_argument("--trees", type=int, default=300)
    p_bench.add_argument("--repeat", type=int, default=5)

    return parser


def _cmd_run(args):
    from .engine import RunConfig, run, write_couples_jsonl

    config = RunConfig(
        approach=args.approach,
        problem=args.problem,
        mutation_prob=args.mutation,
        run_seed=args.seed,
        generations=args.generations,
        population_size=args.pop,
    )
    try:
        config.validate()
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    log = run(config, record_couples=args.couples is not None)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(log.to_jsonl())
    else:
        sys.stdout.write(log.to_jsonl())
    if args.couples:
        with open(args.couples, "w") as fh:
            write_couples_jsonl(log.couples, fh)
    if args.export_cases:
        from .benchmarks import make_cases
        from .engine import STREAM_FITNESS_CASES, substream

        cases = make_cases(args.problem, substream(args.seed, STREAM_FITNESS_CASES))
        write_cases_csv(cases, args.export_cases)
    return 0


def _cmd_experiment(args):
    from .harness import load_plan, run_experiment

    try:
        plan = load_plan(args.plan)
        if args.generations is not None:
            from dataclasses import replace

            plan = replace(plan, generations=args.generations)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    summaries = run_experiment(plan, args.out, jobs=args.jobs)
    print(f"completed {len(summaries)} cell(s) into {args.out}")
    return 0


def _cmd_analyze(args):
    from .harness import analyze_dir, emit_tables
    import os

    try:
        summaries, missing = analyze_dir(args.in_dir)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    if summaries:
        paths = emit_tables(summaries, os.path.join(args.in_dir, "tables"))
        for path in paths:
            print(path)
    if missing:
        print(f"error: {len(missing)} run(s) missing; rerun experiment", file=sys.stderr)
        return INCOMPLETE_DATA
    return 0


def _cmd_plot(args):
    from .plots import emit_plots

    try:
        written, missing = emit_plots(args.in_dir, args.out)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    for path in written:
        print(path)
    if missing:
        print(f"error: {len(missing)} run(s) missing; rerun experiment", file=sys.stderr)
        return INCOMPLETE_DATA
    return 0


def _cmd_bench(args):
    from .bench import format_report, run_benchmark

    print(format_report(run_benchmark(n_trees=args.trees, repeat=args.repeat)))
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "experiment": _cmd_experiment,
    "analyze": _cmd_analyze,
    "plot": _cmd_plot,
    "bench": _cmd_bench,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    return _COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
