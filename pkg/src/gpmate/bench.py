"""Benchmark of the numba kernels against the pure NumPy fallback.

Times the dominant inner loops (tree evaluation over the fitness-case
matrix, plus a short end-to-end engine run) under both backends and
reports their output divergence, which should sit at last-ulp level.
"""

import time

import numpy as np

from . import backend
from .benchmarks import make_cases
from .engine import RunConfig, run, substream
from .individual import ramped_half_and_half
from .primitives import eval_many

__all__ = ["run_benchmark", "format_report"]


def _sample_trees(n_trees, n_vars, seed):
    rng = np.random.Generator(np.random.PCG64(seed))
    return ramped_half_and_half(n_trees, 2, 8, rng, n_vars)


def _time_eval(trees, points, repeat):
    best = float("inf")
    outputs = None
    for _ in range(repeat):
        start = time.perf_counter()
        outputs = [eval_many(tree, points) for tree in trees]
        best = min(best, time.perf_counter() - start)
    return best, np.vstack(outputs)


def _time_engine(seed):
    config = RunConfig(
        approach="pimp", problem="koza1", generations=30, run_seed=seed
    )
    start = time.perf_counter()
    log = run(config)
    return time.perf_counter() - start, log.best_fitness[-1]


def run_benchmark(n_trees=300, repeat=5, seed=7):
    """Per-backend timings plus cross-backend divergence measurements."""
    names = ["numba", "numpy"]
    try:
        backend.set_backend("numba")
    except ImportError:
        names = ["numpy"]
    results = {}
    problems = ("koza1", "pagie1")
    for name in names:
        backend.set_backend(name)
        entry = {"eval": {}, "engine": {}}
        for problem in problems:
            cases = make_cases(problem, substream(seed, 2))
            trees = _sample_trees(n_trees, cases.arity, seed)
            # warm up the jit path before timing
            eval_many(trees[0], cases.points)
            elapsed, outputs = _time_eval(trees, cases.points, repeat)
            entry["eval"][problem] = {
                "seconds": elapsed,
                "evals_per_second": n_trees / elapsed,
                "outputs": outputs,
            }
        engine_seconds, engine_best = _time_engine(seed)
        entry["engine"] = {"seconds": engine_seconds, "final_best": engine_best}
        results[name] = entry
    backend.set_backend(None)

    divergence = {}
    if len(names) == 2:
        for problem in problems:
            a = results["numba"]["eval"][problem].pop("outputs")
            b = results["numpy"]["eval"][problem].pop("outputs")
            scale = np.maximum(1.0, np.abs(a))
            divergence[problem] = float(np.max(np.abs(a - b) / scale))
        divergence["engine_final_best_delta"] = abs(
            results["numba"]["engine"]["final_best"]
            - results["numpy"]["engine"]["final_best"]
        )
    else:
        for problem in problems:
            results["numpy"]["eval"][problem].pop("outputs")
    return {"backends": results, "divergence": divergence, "n_trees": n_trees}


def format_report(report):
    lines = []
    for name, entry in report["backends"].items():
        for problem, values in entry["eval"].items():
            lines.append(
                f"{name:>6} eval  {problem:<8} {values['seconds'] * 1e3:9.2f} ms "
                f"for {report['n_trees']} trees "
                f"({values['evals_per_second']:10.0f} trees/s)"
            )
        lines.append(
            f"{name:>6} engine koza1 30 gens {entry['engine']['seconds']:9.2f} s"
        )
    if report["divergence"]:
        for key, value in report["divergence"].items():
            lines.append(f"divergence {key}: {value:.3e}")
    else:
        lines.append("numba unavailable: numpy fallback only")
    return "\n".join(lines)
