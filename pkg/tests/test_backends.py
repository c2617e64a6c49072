import subprocess
import sys

import numpy as np
import pytest

from gpmate import backend
from gpmate.bench import format_report, run_benchmark


def numba_available():
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def test_env_flag_selects_numpy_backend():
    # resolved in a fresh interpreter so the lazy singleton starts clean
    code = (
        "from gpmate import backend\n"
        "print(backend.active_name())\n"
    )
    result = subprocess.run(
        [sys.executable, "-c", code],
        env={"GPMATE_BACKEND": "numpy", "PATH": "/usr/bin:/bin"},
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0, result.stderr
    assert result.stdout.strip() == "numpy"


def test_set_backend_rejects_unknown():
    with pytest.raises(ValueError):
        backend.set_backend("cython")
    backend.set_backend(None)


def test_set_backend_numpy_and_back():
    assert backend.set_backend("numpy") == "numpy"
    try:
        from gpmate.primitives import eval_tree, parse

        assert eval_tree(parse("(add x x)"), 2.0) == 4.0
    finally:
        backend.set_backend(None)


@pytest.mark.skipif(not numba_available(), reason="numba backend unavailable")
def test_numpy_fallback_runs_the_engine_identically_to_itself():
    # per-backend determinism: the same config under one backend twice
    from gpmate.engine import RunConfig, run

    config = RunConfig(
        approach="pimp", problem="koza1", generations=8,
        population_size=16, run_seed=11,
    )
    backend.set_backend("numpy")
    try:
        first = run(config).to_jsonl()
        second = run(config).to_jsonl()
    finally:
        backend.set_backend(None)
    assert first == second
    third = run(config).to_jsonl()
    assert third == run(config).to_jsonl()


def test_benchmark_report_smoke():
    report = run_benchmark(n_trees=20, repeat=1, seed=3)
    text = format_report(report)
    assert "eval" in text
    names = set(report["backends"])
    assert "numpy" in names
    if numba_available():
        assert "numba" in names
        # arithmetic agreement keeps the divergence small on these
        # shallow-to-moderate random trees
        for problem, value in report["divergence"].items():
            assert np.isfinite(value)
