import csv
import io
import json
import subprocess
import sys

import pytest

from kleinlab import cli


def run(args, capsys):
    status = cli.main(args)
    out = capsys.readouterr()
    return status, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def stat(text, name):
    return next(r for r in rows(text) if r["statistic"] == name)


def test_klein_check(capsys):
    status, out, _ = run(["klein-check", "--p", "3"], capsys)
    assert status == 0
    assert stat(out, "lines")["value"] == "130"
    assert stat(out, "klein_points")["value"] == "130"
    assert stat(out, "bijection")["value"] == "1"
    assert rows(out)[0]["schema_version"] == str(cli.SCHEMA_VERSION)


def test_reduce_small_field_exhausts(capsys):
    status, out, err = run(["reduce", "--p", "3", "--m", "20", "--n", "20"], capsys)
    assert status == 2 and out == ""
    e = json.loads(err)
    assert e["code"] == "search_exhausted" and e["subcommand"] == "reduce"
    assert e["config"]["p"] == 3 and e["config"]["m"] == 20


def test_validation_error_exit_1(capsys):
    status, _, err = run(["incidence", "--p", "9"], capsys)
    assert status == 1 and json.loads(err)["code"] == "not_prime"
    status, _, err = run(["incidence", "--bogus"], capsys)
    assert status == 1 and json.loads(err)["code"] == "validation_error"


def test_budget_env_override(capsys, monkeypatch):
    monkeypatch.setenv("KIL_BUDGET_OPS", "10")
    status, _, err = run(["enumerate", "--p", "5", "--budget-ops", "1000000"], capsys)
    assert status == 2 and json.loads(err)["code"] == "budget_exceeded"
    monkeypatch.delenv("KIL_BUDGET_OPS")
    status, out, _ = run(["enumerate", "--p", "5", "--budget-ops", "1000000"], capsys)
    assert status == 0 and stat(out, "lines_P3")["value"] == "806"


def test_tightness(capsys):
    status, out, _ = run(["tightness", "--n", "12"], capsys)
    assert status == 0
    r = stat(out, "energy_over_N3")
    assert r["bound_expression"] == "N^3" and float(r["ratio"]) > 0
    assert int(r["N"]) ** 3 * float(r["ratio"]) == pytest.approx(int(r["value"]), rel=1e-5)


def test_seed_is_echoed_and_output_deterministic(capsys):
    args = ["incidence", "--p", "101", "--m", "40", "--n", "30", "--seed", "7",
            "--construction", "clustered", "--k-target", "5"]
    _, a, _ = run(args, capsys)
    _, b, _ = run(args + ["--threads", "8"], capsys)
    assert a == b
    assert all(r["seed"] == "7" for r in rows(a))
    assert stat(a, "k")["value"] == "5"


def test_json_output(capsys):
    status, out, _ = run(["convert", "--format", "json"], capsys)
    doc = json.loads(out)
    assert status == 0 and doc["subcommand"] == "convert" and doc["config"]["seed"] == 0
    vals = {r["statistic"]: r["value"] for r in doc["rows"]}
    assert vals["ordered_meeting_pairs"] == vals["incidences_minus_n"]


@pytest.mark.parametrize("args", [
    ["enumerate", "--p", "3", "--space", "points"],
    ["sl2-cover", "--p", "5"],
    ["bilinear", "--p", "1009"],
    ["sumprod", "--p", "4001"],
    ["distances", "--p", "11"],
    ["distances", "--p", "31", "--construction", "semi_isotropic", "--k-target", "3"],
    ["vanishing-poly", "--p", "101", "--size", "4"],
    ["cubic", "--p", "11"],
])
def test_subcommands_succeed(args, capsys):
    status, out, err = run(args, capsys)
    assert status == 0, err
    assert rows(out)


def test_atomic_output_and_report(tmp_path, capsys):
    target = tmp_path / "runs" / "sweep.csv"
    assert cli.main(["incidence", "--sweep", "--out", str(target)]) == 0
    assert target.exists()
    assert [p.name for p in target.parent.iterdir()] == ["sweep.csv"]
    status, first, _ = run(["report", str(target.parent)], capsys)
    _, second, _ = run(["report", str(target.parent)], capsys)
    assert status == 0 and first == second
    summary = rows(first)
    assert len(summary) == 10
    assert all(r["verdict"] == "pass" for r in summary)


def test_failed_run_leaves_no_file(tmp_path, capsys):
    target = tmp_path / "out.csv"
    assert cli.main(["reduce", "--p", "3", "--m", "20", "--n", "20", "--out", str(target)]) == 2
    assert list(tmp_path.iterdir()) == []


def test_report_without_artifacts(tmp_path, capsys):
    status, _, err = run(["report", str(tmp_path)], capsys)
    assert status == 1 and json.loads(err)["code"] == "missing_artifact"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "kleinlab", "klein-check", "--p", "3"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "bijection" in proc.stdout
