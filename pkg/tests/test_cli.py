import csv
import json
import subprocess
import sys

import pytest

from statcp.cli import main
from statcp.models import InspectionParams, InspectionPlan, check_plan


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_ttest_mean_propagate(capsys):
    code, out, _ = run(capsys, "ttest-mean", "--alpha", "0.05", "--mode", "propagate")
    report = json.loads(out)
    assert code == 0
    assert report["result"]["m_domain"] == [8, 9, 10, 11]
    assert set(report) == {"problem", "mode", "alpha", "params", "result", "stats", "artifacts"}
    assert set(report["stats"]) == {"nodes", "failures", "wall_ms"}


@pytest.mark.parametrize("mode", ["enumerate", "solve"])
def test_ttest_mean_modes_agree(capsys, mode):
    code, out, _ = run(capsys, "ttest-mean", "--mode", mode)
    assert code == 0 and json.loads(out)["result"]["m_domain"] == [8, 9, 10, 11]


def test_ks_sets_enumerate_and_solve_agree(capsys):
    flags = ["--sup", "reference", "--small-sample"]
    _, enum_out, _ = run(capsys, "ks-sets", "--mode", "enumerate", *flags)
    _, solve_out, _ = run(capsys, "ks-sets", "--mode", "solve", *flags)
    a, b = json.loads(enum_out)["result"], json.loads(solve_out)["result"]
    assert (a["total"], a["rejected"], a["feasible"]) == (6561, 365, 6196)
    assert (b["total"], b["rejected"], b["feasible"]) == (6561, 365, 6196)
    _, enum_out, _ = run(capsys, "ks-sets", "--mode", "enumerate")
    _, solve_out, _ = run(capsys, "ks-sets", "--mode", "solve")
    a, b = json.loads(enum_out)["result"], json.loads(solve_out)["result"]
    assert a["feasible"] == b["feasible"]


def test_ks_sets_plot_csv(capsys, tmp_path):
    path = tmp_path / "cdf.csv"
    code, out, _ = run(capsys, "ks-sets", "--plot-out", str(path), "--plot-sample", "infeasible")
    assert code == 0 and json.loads(out)["artifacts"] == [str(path)]
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["x", "f_emp", "f_ref", "lo", "hi"]
    assert any(not float(r[3]) <= float(r[1]) <= float(r[4]) for r in rows[1:])


def test_inspect_scaled_csv(capsys, tmp_path):
    path = tmp_path / "plan.csv"
    code, out, _ = run(capsys, "inspect", "--units", "4", "--inspections", "10",
                       "--horizon", "150", "--format", "csv", "--out", str(path))
    assert code == 0
    report = json.loads(out)
    assert report["result"]["valid"] and report["artifacts"] == [str(path)]
    rows = list(csv.DictReader(path.open()))
    assert len(rows) == 40 and list(rows[0]) == ["unit", "k", "start", "end"]
    starts = [[int(r["start"]) for r in rows if r["unit"] == str(u)] for u in range(1, 5)]
    ends = [[int(r["end"]) for r in rows if r["unit"] == str(u)] for u in range(1, 5)]
    ok, violations = check_plan(InspectionPlan(starts, ends),
                                InspectionParams(units=4, inspections=10, horizon=150))
    assert ok, violations


def test_inspect_unsat_exit_code(capsys):
    code, out, _ = run(capsys, "inspect", "--units", "2", "--inspections", "4",
                       "--horizon", "60", "--capacity", "0")
    assert code == 1 and json.loads(out)["result"]["status"] == "unsatisfiable"


def test_limit_exit_code(capsys):
    code, out, _ = run(capsys, "inspect", "--node-limit", "3")
    assert code == 2 and json.loads(out)["result"]["status"] == "limit"


@pytest.mark.parametrize("argv", [
    [], ["nope"], ["ttest-mean", "--alpha", "2"], ["ks-sets", "--format", "xml"],
    ["inspect", "--units", "0"], ["inspect", "--mode", "enumerate"],
    ["ttest-mean", "--mode", "guess"],
])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 64 and err


def test_json_is_deterministic(capsys):
    outs = []
    for _ in range(2):
        _, out, _ = run(capsys, "inspect", "--units", "3", "--inspections", "8",
                        "--horizon", "120", "--seed", "5")
        report = json.loads(out)
        report["stats"].pop("wall_ms")
        outs.append(json.dumps(report, sort_keys=True))
    assert outs[0] == outs[1]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "statcp", "ttest-mean"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["m_domain"] == [8, 9, 10, 11]
