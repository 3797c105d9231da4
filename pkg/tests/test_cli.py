import csv
import json
import math
import subprocess
import sys

import pytest

from hyperdioph.cli import SCHEMA_VERSION, _gather_multi, main, parse_real

TOP_KEYS = {"checks", "counts", "discrepancy", "experiment", "fit", "params", "schema_version", "theoretical", "verdict"}


def run(capsys, *args):
    with pytest.raises(SystemExit) as exc:
        main(list(args))
    out = capsys.readouterr()
    return exc.value.code, out.out, out.err


def report(capsys, *args):
    code, out, _ = run(capsys, *args)
    return code, json.loads(out)


def test_heis_ball_example(capsys):
    code, rep = report(capsys, "heis-ball", "--r-max", "50", "--steps", "8")
    assert code == 0 and rep["verdict"] == "pass"
    assert rep["fit"]["exponent"] == pytest.approx(4, abs=0.1)
    assert rep["fit"]["constant"] == pytest.approx(math.pi ** 2 / 8, rel=0.02)


def test_farey_example(capsys):
    code, rep = report(capsys, "farey", "--s", "1000", "--bins", "50", "--window", "0", "1")
    assert code == 0
    assert rep["params"]["window"] == [0.0, 1.0]
    assert rep["discrepancy"] <= 0.01


def test_perp_example(capsys):
    code, rep = report(capsys, "perp", "--horoball-height", "1", "--geodesic", "0", "1")
    assert code == 0
    assert rep["theoretical"]["length"] == pytest.approx(math.log(2), abs=1e-15)


def test_report_schema(capsys):
    _, rep = report(capsys, "farey", "--s", "50")
    assert set(rep) == TOP_KEYS
    assert rep["schema_version"] == SCHEMA_VERSION
    assert all({"name", "passed", "rule", "measured", "expected"} <= set(c) for c in rep["checks"])
    assert "wall_time" not in rep
    _, rep = report(capsys, "--timing", "farey", "--s", "50")
    assert rep["wall_time"] >= 0


def test_failing_check_exits_one(capsys):
    # an impossible discrepancy ceiling
    code, rep = report(capsys, "farey", "--s", "50", "--max-discrepancy", "0")
    assert code == 1 and rep["verdict"] == "fail"


@pytest.mark.parametrize(
    "args",
    [
        ["farey", "--bogus"],
        ["farey", "--s", "abc"],
        ["gaussian", "--window", "0", "1"],
        ["perp", "--horoball-height", "1"],
        ["nosuch"],
        ["approx", "--target", "3/7"],
        ["perp", "--horoball-height", "1", "--geodesic", "0", "3"],
    ],
)
def test_usage_errors_exit_two(capsys, args):
    code, _, _ = run(capsys, *args)
    assert code == 2


def test_files_written(capsys, tmp_path):
    code, _, _ = run(capsys, "--out", str(tmp_path), "--quiet", "farey", "--s", "30", "--bins", "5")
    assert code == 0
    with open(tmp_path / "farey_points.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0][:3] == ["value_re", "value_im", "height"]
    assert len(rows) - 1 == json.loads((tmp_path / "farey_report.json").read_text())["counts"][0][1]
    with open(tmp_path / "farey_histogram.csv") as fh:
        hist = list(csv.reader(fh))
    assert hist[0] == ["bin_lo", "bin_hi", "mass_empirical", "mass_target"]
    assert len(hist) == 6
    assert math.fsum(float(r[2]) for r in hist[1:]) == pytest.approx(1)


def test_csv_report(capsys, tmp_path):
    code, out, _ = run(capsys, "--format", "csv", "--out", str(tmp_path), "perp", "--horoball-height", "2", "--geodesic", "-1", "1")
    assert code == 0
    rows = dict(csv.reader(out.splitlines()[1:]))
    assert float(rows["theoretical.length"]) == pytest.approx(math.log(2), abs=1e-12)
    assert (tmp_path / "perp_report.csv").exists()


def test_window_gathering():
    assert _gather_multi(["farey", "--window", "0", "1", "--bins", "3"]) == ["farey", "--window=0,1", "--bins", "3"]
    assert _gather_multi(["perp", "--geodesic", "-1", "inf"]) == ["perp", "--geodesic=-1,inf"]
    assert _gather_multi(["gaussian", "--window", "0", "1/2", "0", "1"]) == ["gaussian", "--window=0,1/2,0,1"]


def test_parse_real():
    assert parse_real("phi") == pytest.approx((1 + math.sqrt(5)) / 2)
    assert parse_real("sqrt2") == pytest.approx(math.sqrt(2))
    assert parse_real("3/4") == 0.75
    assert math.isinf(parse_real("inf"))


def test_console_script_runs():
    out = subprocess.run(
        [sys.executable, "-m", "hyperdioph.cli", "perp", "--horoball-height", "1", "--geodesic", "0", "1"],
        capture_output=True, text=True, check=False,
    )
    assert out.returncode == 0
    assert json.loads(out.stdout)["verdict"] == "pass"
