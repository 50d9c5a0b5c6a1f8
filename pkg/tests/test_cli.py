import json
import os

import pytest

from gnewton.cli import main

QUARTIC_TEXT = "f1 = x2*x1^3 - 1\nf2 = x1*x2^3 - 1\n"


def run(args):
    return main(args)


def test_solve_converged_exit_zero(capsys):
    assert run(["solve", "--problem", "quartic2", "--s", "cube", "--x0", "2,2"]) == 0
    out = capsys.readouterr().out
    assert "Converged" in out
    assert "iterations: 6" in out


def test_solve_singular_exit_one(capsys):
    assert run(["solve", "--problem", "quartic2", "--s", "cube", "--x0", "0,0"]) == 1
    assert "SingularJacobian" in capsys.readouterr().out


def test_solve_unknown_problem_exit_two(capsys):
    assert run(["solve", "--problem", "nosuch", "--s", "cube", "--x0", "1,1"]) == 2


def test_solve_bad_vector_exit_two():
    assert run(["solve", "--problem", "quartic2", "--s", "cube", "--x0", "1"]) == 2


def test_solve_json_trace(tmp_path, capsys):
    path = tmp_path / "trace.json"
    assert run(["solve", "--problem", "quartic2", "--s", "identity",
                "--x0", "1.5,0.7", "--json", str(path)]) == 0
    data = json.loads(path.read_text())
    assert data["status"] == "Converged"
    assert data["solution_index"] == 0
    assert len(data["iterates"]) == data["iterations_used"] + 1


def test_file_problem_matches_builtin(tmp_path, capsys):
    path = tmp_path / "quartic.txt"
    path.write_text(QUARTIC_TEXT)
    j1 = tmp_path / "a.json"
    j2 = tmp_path / "b.json"
    assert run(["solve", "--problem", "quartic2", "--s", "cube",
                "--x0", "2,2", "--json", str(j1)]) == 0
    assert run(["solve", "--problem", f"file:{path}", "--s", "cube",
                "--x0", "2,2", "--json", str(j2)]) == 0
    a = json.loads(j1.read_text())
    b = json.loads(j2.read_text())
    assert a["iterates"] == b["iterates"]


def test_basin_writes_ppm_and_counts(tmp_path, capsys):
    out = tmp_path / "q.ppm"
    counts = tmp_path / "q.csv"
    assert run(["basin", "--problem", "quartic2", "--s", "identity",
                "--domain", "-3:3,-3:3", "--grid", "20x10",
                "--out", str(out), "--counts", str(counts), "--threads", "1"]) == 0
    blob = out.read_bytes()
    assert blob.startswith(b"P6\n20 10\n255\n")
    assert len(blob) == len(b"P6\n20 10\n255\n") + 20 * 10 * 3
    rows = counts.read_text().strip().splitlines()
    assert len(rows) == 10
    assert all(len(r.split(",")) == 20 for r in rows)


def test_basin_single_pixel_dark_blue(tmp_path):
    out = tmp_path / "one.ppm"
    assert run(["basin", "--problem", "quartic2", "--s", "identity",
                "--domain", "0.5:1.5,0.5:1.5", "--grid", "1x1",
                "--out", str(out), "--threads", "1"]) == 0
    assert out.read_bytes() == b"P6\n1 1\n255\n" + bytes((0, 0, 128))


def test_basin_inverted_domain_exit_two(tmp_path, capsys):
    assert run(["basin", "--problem", "quartic2", "--s", "identity",
                "--domain", "3:-3,-3:3", "--grid", "4x4",
                "--out", str(tmp_path / "x.ppm")]) == 2


def test_bench_deterministic_json(tmp_path, capsys):
    args = ["bench", "--problem", "quartic2", "--s", "cube",
            "--domain", "-3:3,-3:3", "--samples", "500", "--seed", "7",
            "--threads", "1"]
    assert run(args + ["--json", str(tmp_path / "r1.json")]) == 0
    assert run(args + ["--json", str(tmp_path / "r2.json")]) == 0
    assert (tmp_path / "r1.json").read_bytes() == (tmp_path / "r2.json").read_bytes()
    data = json.loads((tmp_path / "r1.json").read_text())
    assert data["samples"] == 500
    assert 0.0 <= data["success_rate"] <= 1.0
    assert data["config"]["seed"] == 7


def test_bench_zero_samples_exit_two():
    assert run(["bench", "--problem", "quartic2", "--s", "cube",
                "--domain", "-3:3,-3:3", "--samples", "0"]) == 2


def test_lambda_quartic(capsys):
    assert run(["lambda", "--problem", "quartic2", "--s", "identity",
                "--solution", "1"]) == 0
    out = capsys.readouterr().out
    assert "lambda" in out
    assert "contains estimate: yes" in out


def test_lambda_json(tmp_path):
    path = tmp_path / "lam.json"
    assert run(["lambda", "--problem", "quartic2", "--s", "cube",
                "--solution", "1", "--json", str(path)]) == 0
    data = json.loads(path.read_text())
    assert abs(data["lambda"] - 0.35) <= 0.1
    assert abs(data["bound_hi"] - 0.8) <= 0.1
    assert data["contained"] is True


def test_lambda_singular_cell_exit_one(capsys):
    assert run(["lambda", "--problem", "sigproc2", "--s", "cube",
                "--solution", "5"]) == 1
    assert "NonFiniteEvaluation" in capsys.readouterr().err


def test_lambda_bad_solution_index():
    assert run(["lambda", "--problem", "quartic2", "--s", "cube",
                "--solution", "9"]) == 2


def test_table_bench_shape(tmp_path, capsys):
    out = tmp_path / "t.csv"
    assert run(["table", "--problem", "quartic2", "--which", "bench",
                "--samples", "60", "--seed", "2", "--out", str(out),
                "--threads", "1"]) == 0
    rows = out.read_text().strip().splitlines()
    # header + 5 generalizers x 3 domains
    assert len(rows) == 1 + 15
    assert rows[0].startswith("problem,s,half_width")


def test_table_lambda_shape(tmp_path):
    out = tmp_path / "t4.csv"
    assert run(["table", "--problem", "jennrich2", "--which", "lambda",
                "--out", str(out)]) == 0
    rows = out.read_text().strip().splitlines()
    # 2 solutions x (identity, exp)
    assert len(rows) == 1 + 4


def test_table_missing_out_exit_two():
    assert run(["table", "--problem", "quartic2", "--which", "bench"]) == 2
