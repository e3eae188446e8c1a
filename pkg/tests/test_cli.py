import csv
import io
import json
import math
import subprocess
import sys

import pytest

from nextprime.cli import parse_int, render, run

LIMIT = ["--limit", "2e5"]


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_seq_csv_ends_with_a7(capsys):
    code, out, _ = call(capsys, "seq", "--from", "1", "--to", "7", "--format", "csv", *LIMIT)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "n,a_n"
    assert lines[-1] == "7,4"
    assert [int(l.split(",")[1]) for l in lines[1:]] == [1, 1, 2, 1, 2, 1, 4]


@pytest.mark.parametrize("ns", ["3,4,5,9", "2"])
def test_verify_examples_exit_zero(capsys, ns):
    code, out, _ = call(capsys, "verify", "--n", ns, "--exact", "--format", "json", *LIMIT)
    assert code == 0
    rows = json.loads(out)["rows"]
    assert all(r["passed"] for r in rows)


def test_global_options_before_subcommand(capsys):
    code, out, _ = call(capsys, "--limit", "1000", "--format", "csv", "count", "--a", "1", "--x", "10")
    assert code == 0
    assert out.splitlines() == ["a,x,count", "1,10,5"]


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["bogus"],
        ["seq", "--from", "1"],
        ["seq", "--from", "1", "--to", "5", "--wat"],
        ["sum", "--n", "1.5"],
        ["seq", "--from", "9", "--to", "3"],
        ["--limit", "1", "seq", "--from", "1", "--to", "1"],
        ["asympt", "--which", "sum", "--grid", "100,10"],
        ["asympt", "--which", "nope"],
        ["--limit", "1000", "verify", "--n", "5", "--exact-cap", "5000"],
    ],
)
def test_usage_errors_exit_one(capsys, argv):
    code, out, err = call(capsys, *argv)
    assert code == 1
    assert out == ""
    assert err


@pytest.mark.parametrize(
    "argv",
    [
        ["--limit", "1000", "sum", "--n", "5000"],
        ["--limit", "1000", "seq", "--from", "1", "--to", "999"],
        ["--limit", "1000", "asympt", "--which", "sum", "--grid", "10,2000"],
        ["--limit", "1000", "prod", "--n", "500", "--exact", "--exact-cap", "100"],
        ["--limit", "1000", "checkpoint", "--resume", "/nonexistent/cp.json", "--upto", "5"],
    ],
)
def test_computation_errors_exit_two(capsys, argv):
    code, _, err = call(capsys, *argv)
    assert code == 2
    assert "nextprime:" in err


def test_verify_reports_errors_with_exit_two(capsys):
    code, out, _ = call(capsys, "--limit", "1000", "--format", "json", "verify", "--n", "10,5000")
    assert code == 2
    rows = json.loads(out)["rows"]
    assert rows[0]["passed"] and not rows[1]["passed"]


def test_sum_modes(capsys):
    code, out, _ = call(capsys, *LIMIT, "--format", "csv", "sum", "--n", "7", "--both")
    assert code == 0 and out.splitlines()[1] == "7,12,12"
    _, out, _ = call(capsys, *LIMIT, "--format", "csv", "sum", "--n", "4")
    assert out.splitlines()[1] == "4,5,"
    _, out, _ = call(capsys, *LIMIT, "--format", "csv", "sum", "--n", "3", "--brute")
    assert out.splitlines()[1] == "3,,4"


def test_prod_modes(capsys):
    _, out, _ = call(capsys, *LIMIT, "--format", "csv", "prod", "--n", "9", "--exact")
    assert out.splitlines() == ["n,p_prev", "9,48"]
    _, out, _ = call(capsys, *LIMIT, "--format", "csv", "prod", "--n", "9")
    n, v = out.splitlines()[1].split(",")
    assert float(v) == pytest.approx(math.log(48), rel=1e-15)


def test_csv_and_json_carry_same_numbers(capsys):
    base = [*LIMIT, "asympt", "--which", "harmonic", "--grid", "1e3,1e4,1e5"]
    _, c, _ = call(capsys, *base, "--format", "csv")
    _, j, _ = call(capsys, *base, "--format", "json")
    rows = list(csv.DictReader(io.StringIO(c)))
    obj = json.loads(j)
    assert obj["columns"] == list(rows[0])
    assert len(rows) == len(obj["rows"]) == 3
    for rc, rj in zip(rows, obj["rows"]):
        assert int(rc["x"]) == rj["x"]
        for key in ("raw", "normalizer", "ratio", "residual"):
            assert float(rc[key]) == rj[key]  # %.17g round-trips exactly
        assert rc["label"] == rj["label"]


def test_gaps2_fit_in_json(capsys):
    code, out, _ = call(
        capsys, "--limit", "2e6", "--format", "json", "asympt", "--which", "gaps2", "--grid", "1e3,1e4,1e5"
    )
    assert code == 0
    fit = json.loads(out)["fit"]
    assert 1.0 < fit["slope"] < 23 / 18 and fit["points_used"] == 3


def test_repeat_runs_are_byte_identical(capsys):
    argv = [*LIMIT, "--format", "csv", "asympt", "--which", "logsum", "--grid", "100,1000,10000"]
    _, first, _ = call(capsys, *argv)
    _, second, _ = call(capsys, *argv)
    assert first == second


def test_threads_do_not_change_output(capsys):
    argv = ["--format", "csv", "asympt", "--which", "lemma6", "--grid", "1e3,1e4"]
    _, one, _ = call(capsys, *LIMIT, "--threads", "1", *argv)
    _, four, _ = call(capsys, *LIMIT, "--threads", "4", *argv)
    assert one == four


@pytest.mark.parametrize("which", ["sum", "lemma6", "panaitopol"])
def test_resume_matches_uninterrupted(capsys, tmp_path, which):
    grid = ["--grid", "10,100,1000,10000"]
    _, full, _ = call(capsys, *LIMIT, "--format", "csv", "asympt", "--which", which, *grid)
    cp = str(tmp_path / "cp.json")
    code, part, _ = call(
        capsys, *LIMIT, "--format", "csv", "asympt", "--which", which, *grid, "--save", cp, "--stop-after", "2"
    )
    assert code == 0 and len(part.splitlines()) == 3
    _, resumed, _ = call(capsys, *LIMIT, "--format", "csv", "asympt", "--which", which, *grid, "--resume", cp)
    assert resumed == full


def test_output_file(capsys, tmp_path):
    dest = tmp_path / "seq.csv"
    code, out, _ = call(capsys, *LIMIT, "--format", "csv", "--output", str(dest), "seq", "--from", "5", "--to", "8")
    assert code == 0 and out == ""
    assert dest.read_text().splitlines() == ["n,a_n", "5,2", "6,1", "7,4", "8,3"]


def test_checkpoint_subcommand(capsys, tmp_path):
    cp, cp2 = tmp_path / "a.json", tmp_path / "b.json"
    code, direct, _ = call(capsys, *LIMIT, "--format", "csv", "checkpoint", "--save", str(tmp_path / "d.json"), "--upto", "5000")
    assert code == 0
    call(capsys, *LIMIT, "--format", "csv", "checkpoint", "--save", str(cp), "--upto", "1234")
    code, resumed, _ = call(
        capsys, *LIMIT, "--format", "csv", "checkpoint", "--resume", str(cp), "--upto", "5000", "--to", str(cp2)
    )
    assert code == 0 and resumed == direct
    assert json.loads(cp.read_text())["aggregate"]["k"] == 1234
    assert json.loads(cp2.read_text())["aggregate"]["k"] == 5000
    _, out, _ = call(capsys, *LIMIT, "--format", "csv", "checkpoint", "--save", str(cp), "--upto", "11", "--mode", "prime")
    row = out.splitlines()[1].split(",")
    assert row[:5] == ["5", "13", "11", "29", "3"]


def test_corrupted_checkpoint_exit_two(capsys, tmp_path):
    cp = tmp_path / "cp.json"
    call(capsys, *LIMIT, "checkpoint", "--save", str(cp), "--upto", "100")
    cp.write_text(cp.read_text()[:-20])
    code, _, err = call(capsys, *LIMIT, "checkpoint", "--resume", str(cp), "--upto", "200")
    assert code == 2 and "Corrupted" in err


def test_table_format_renders(capsys):
    code, out, _ = call(capsys, *LIMIT, "seq", "--from", "1", "--to", "3")
    assert code == 0
    assert out.splitlines()[0].split() == ["n", "a_n"]
    assert set(out.splitlines()[1]) <= {"-", " "}


def test_render_and_parse_helpers():
    assert parse_int("1e6") == 10**6 and parse_int("10_000") == 10_000
    assert render(["v"], [(0.1,)], "csv") == "v\n0.10000000000000001\n"
    assert json.loads(render(["v"], [(None,)], "json")) == {"columns": ["v"], "rows": [{"v": None}]}


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "nextprime", "--limit", "100", "--format", "csv", "seq", "--from", "1", "--to", "7"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[-1] == "7,4"
