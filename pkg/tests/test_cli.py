import csv
import json
import os

import pytest

from gpmate.cli import main


@pytest.fixture(scope="module")
def finished_experiment(tmp_path_factory):
    out = tmp_path_factory.mktemp("cli_exp")
    plan_path = out / "plan.txt"
    plan_path.write_text(
        "problems = koza1\nrates = 0.05\napproaches = pimp, random, standard\n"
        "runs = 2\nmaster_seed = 4\ngenerations = 6\n"
    )
    code = main(
        ["experiment", "--plan", str(plan_path), "--jobs", "2", "--out", str(out / "runs")]
    )
    assert code == 0
    return out


def test_run_to_stdout(capsys):
    code = main(
        ["run", "--approach", "standard", "--problem", "koza1",
         "--mutation", "0.05", "--seed", "3", "--generations", "4", "--pop", "20"]
    )
    assert code == 0
    lines = capsys.readouterr().out.strip().split("\n")
    records = [json.loads(line) for line in lines]
    assert records[0]["type"] == "meta"
    assert records[-1]["type"] == "summary"
    assert len([r for r in records if r["type"] == "gen"]) == 5


def test_run_to_file_with_couples_and_cases(tmp_path):
    log_path = tmp_path / "run.jsonl"
    couples_path = tmp_path / "couples.jsonl"
    cases_path = tmp_path / "cases.csv"
    code = main(
        ["run", "--approach", "pimp", "--problem", "nguyen6", "--mutation", "0.1",
         "--seed", "5", "--generations", "3", "--pop", "10",
         "--out", str(log_path), "--couples", str(couples_path),
         "--export-cases", str(cases_path)]
    )
    assert code == 0
    assert json.loads(log_path.read_text().splitlines()[0])["problem"] == "nguyen6"
    couple_lines = couples_path.read_text().splitlines()
    assert len(couple_lines) == 3 * 5
    assert set(json.loads(couple_lines[0])) == {"gen", "chooser", "courter"}
    with open(cases_path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["x", "target"]
    assert len(rows) == 21


def test_usage_errors_exit_1(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["run", "--approach", "bogus", "--problem", "koza1",
              "--mutation", "0.05", "--seed", "1"])
    assert excinfo.value.code == 1
    assert main(
        ["run", "--approach", "pimp", "--problem", "koza1",
         "--mutation", "2.0", "--seed", "1"]
    ) == 1
    with pytest.raises(SystemExit) as excinfo:
        main(["bogus-command"])
    assert excinfo.value.code == 1


def test_experiment_bad_plan_exits_1(tmp_path, capsys):
    plan = tmp_path / "plan.txt"
    plan.write_text("nonsense = 1\n")
    assert main(["experiment", "--plan", str(plan), "--out", str(tmp_path / "o")]) == 1
    assert main(["experiment", "--plan", str(tmp_path / "missing.txt"),
                 "--out", str(tmp_path / "o")]) == 1


def test_analyze_writes_tables(finished_experiment, capsys):
    out = finished_experiment
    code = main(["analyze", "--in", str(out / "runs")])
    assert code == 0
    tables = out / "runs" / "tables"
    assert (tables / "mbf_rate_0.05.csv").exists()
    assert (tables / "success_rate.csv").exists()
    assert (tables / "unique_solutions_pct.csv").exists()
    assert (tables / "root_convergence_avoided.csv").exists()


def test_analyze_incomplete_exits_2(finished_experiment):
    out = finished_experiment
    victim = out / "runs" / "koza1" / "0.05" / "pimp" / "run_0.jsonl"
    backup = victim.read_bytes()
    victim.unlink()
    try:
        assert main(["analyze", "--in", str(out / "runs")]) == 2
    finally:
        victim.write_bytes(backup)


def test_analyze_missing_dir_exits_1(tmp_path):
    assert main(["analyze", "--in", str(tmp_path / "nope")]) == 1


def test_plot_emits_svgs(finished_experiment):
    out = finished_experiment
    plots = out / "plots"
    code = main(["plot", "--in", str(out / "runs"), "--out", str(plots)])
    assert code == 0
    names = sorted(p.name for p in plots.iterdir())
    assert "unique_koza1_m0.05.svg" in names
    assert "roles_koza1_m0.05_pimp.svg" in names
    assert "role_mbf_koza1_m0.05_standard.svg" in names
    content = (plots / "unique_koza1_m0.05.svg").read_text()
    assert content.startswith("<svg")
    assert "polyline" in content


def test_plot_incomplete_exits_2(finished_experiment, tmp_path):
    out = finished_experiment
    victim = out / "runs" / "koza1" / "0.05" / "random" / "run_1.jsonl"
    backup = victim.read_bytes()
    victim.unlink()
    try:
        assert main(["plot", "--in", str(out / "runs"), "--out", str(tmp_path)]) == 2
    finally:
        victim.write_bytes(backup)
