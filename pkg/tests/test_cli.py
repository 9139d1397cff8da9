import csv
import json

import pytest

from mipslsh.cli import main, parse_range, strip_run_flags


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_rho_curves_example(tmp_path):
    out = tmp_path / "rho.csv"
    assert main(["rho-curves", "--S", "0.5", "--c-grid", "0.1:0.9:0.1", "--out", str(out)]) == 0
    rows = _rows(out)
    assert rows[0][:3] == ["S", "c", "rho_simple"]
    assert len(rows) == 10
    manifest = json.loads((tmp_path / "rho.csv.manifest.json").read_text())
    assert manifest["argv"] == ["rho-curves", "--S", "0.5", "--c-grid", "0.1:0.9:0.1"]


def test_verify_example(capsys):
    code = main(["verify", "--lemma", "l2-nonuniversal", "--m", "3", "--U", "0.83",
                 "--S", "0.9", "--c", "0.98", "--n", "20000"])
    rec = json.loads(capsys.readouterr().out)
    assert code == 0
    assert rec["margin"] > 0 and rec["pass"] is True


def test_verify_all_marks_skipped(capsys):
    code = main(["verify", "--lemma", "all", "--S", "0.9", "--c", "0.5", "--n", "2000"])
    recs = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    assert code == 0
    assert len(recs) == 5
    assert any("skipped" in r for r in recs)


def test_benchmark_example(capsys):
    code = main(["benchmark", "--scheme", "simple-lsh", "--K", "256", "--T", "10", "--synthetic",
                 "--n-users", "50", "--n-items", "100", "--f", "10", "--n-queries", "10"])
    assert code == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "scheme,T,K,recall,precision"
    assert len(lines) == 11


def test_collision_command(capsys):
    assert main(["collision", "--scheme", "simple-alsh", "--x=-0.5,0", "--q", "0,0.5", "--n", "1000"]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["analytic"] == pytest.approx(0.5)


@pytest.mark.parametrize("argv", [
    ["verify", "--lemma", "l2-nonuniversal", "--S", "0.9", "--c", "0.5"],
    ["verify", "--lemma", "l2-bounded", "--S", "0.9", "--c", "1.5"],
    ["rho-curves", "--S", "1.0"],
    ["collision", "--scheme", "simple-lsh", "--x", "2,0", "--q", "1,0"],
    ["collision", "--scheme", "simple-lsh", "--x", "0.5", "--q", "1,0"],
    ["benchmark", "--ratings", "/nonexistent/file"],
])
def test_errors_exit_nonzero(argv, capsys):
    assert main(argv) == 2
    assert "error" in capsys.readouterr().err


def test_bad_range_is_usage_error():
    with pytest.raises(SystemExit):
        main(["rho-curves", "--c-grid", "0.9:0.1:0.1"])


def test_parse_range():
    assert parse_range("0.1:0.3:0.1") == [0.1, 0.2, 0.3]
    assert parse_range("1,2.5") == [1.0, 2.5]


def test_strip_run_flags():
    assert strip_run_flags(["x", "--out", "f", "--threads=3", "-v", "--seed", "1"]) == ["x", "--seed", "1"]


@pytest.mark.parametrize("argv", [
    ["rho-curves", "--S", "0.5", "0.9", "--c-grid", "0.2,0.6"],
    ["collision", "--scheme", "l2-alsh", "--x", "0.3,0.4", "--q", "0.6,0.8", "--n", "5000", "--seed", "3"],
    ["verify", "--lemma", "sign-bounded", "--m", "2", "--U", "0.75", "--S", "0.5", "--c", "0.5", "--n", "5000"],
    ["benchmark", "--scheme", "all", "--K", "32", "64", "--T", "1", "5", "--n-users", "40",
     "--n-items", "80", "--f", "6", "--n-queries", "15", "--seed", "2"],
])
def test_replay_byte_identical(tmp_path, argv):
    first = tmp_path / "first.out"
    assert main(argv + ["--out", str(first), "--threads", "1"]) == 0
    second = tmp_path / "second.out"
    assert main(["replay", f"{first}.manifest.json", "--out", str(second), "--threads", "3"]) == 0
    assert first.read_bytes() == second.read_bytes()
