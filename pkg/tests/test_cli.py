import json

import pytest

from parac.bench import BENCH_FIELDS, SCHEMA, non_timing
from parac.cli import EXIT_USAGE, main
from parac.errors import NotAPermutation, NotConnected
from parac.io import read_csv, write_laplacian

from conftest import edgeless, path3


@pytest.fixture
def p3file(tmp_path):
    p = tmp_path / "p3.mtx"
    write_laplacian(path3(), p)
    return p


def _json(capsys):
    return json.loads(capsys.readouterr().out)


def test_factor_p3_stats(p3file, tmp_path, capsys):
    rc = main(["factor", "--input", str(p3file), "--ordering", "natural",
               "--backend", "seq", "--seed", "0",
               "--output", str(tmp_path / "f"), "--stats",
               str(tmp_path / "s.json"), "--trace", str(tmp_path / "t.json")])
    assert rc == 0
    stats = _json(capsys)
    assert stats["nnz_G"] == 5 and stats["fill_ratio"] == 10 / 7
    assert stats["schedule_depth"] == 3
    assert json.loads((tmp_path / "s.json").read_text()) == stats
    assert (tmp_path / "f.G.mtx").exists() and (tmp_path / "f.D.mtx").exists()
    assert stats["config"]["input"] == str(p3file)


def test_factor_workers_checksum(capsys):
    sums = []
    for w in ("1", "8"):
        assert main(["factor", "--gen", "poisson3d:n=8,variant=uniform",
                     "--ordering", "nnz-sort", "--backend", "par-left",
                     "--workers", w, "--seed", "1"]) == 0
        sums.append(_json(capsys)["checksum"])
    assert sums[0] == sums[1]


def test_bad_ordering_file(p3file, tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("0 0 2")
    rc = main(["factor", "--input", str(p3file), "--ordering",
               f"file:{bad}"])
    assert rc == NotAPermutation.exit_code


def test_solve_exact_p3(p3file, tmp_path, capsys):
    rc = main(["solve", "--input", str(p3file), "--backend", "exact",
               "--ordering", "natural", "--report", str(tmp_path / "r.json")])
    rep = _json(capsys)["report"]
    assert rc == 0 and rep["converged"] and rep["iterations"] <= 2


def test_solve_from_factor_file(p3file, tmp_path, capsys):
    main(["factor", "--input", str(p3file), "--backend", "exact",
          "--output", str(tmp_path / "f")])
    capsys.readouterr()
    (tmp_path / "b.mtx").write_text(
        "%%MatrixMarket matrix array real general\n3 1\n1.0\n0.0\n-1.0\n")
    rc = main(["solve", "--input", str(p3file), "--factor",
               str(tmp_path / "f"), "--rhs-mode", "given", "--rhs",
               str(tmp_path / "b.mtx"), "--solution", str(tmp_path / "x")])
    assert rc == 0 and _json(capsys)["report"]["iterations"] <= 2
    assert (tmp_path / "x").exists()


def test_solve_unconverged_exit(capsys):
    rc = main(["solve", "--gen", "poisson3d:n=6,variant=contrast",
               "--ordering", "random", "--tol", "1e-14", "--max-iters", "1"])
    rep = _json(capsys)["report"]
    assert rc != 0 and rep["converged"] is False and rep["iterations"] == 1


def test_solve_disconnected(tmp_path, capsys):
    write_laplacian(edgeless(3), tmp_path / "e.mtx")
    rc = main(["solve", "--input", str(tmp_path / "e.mtx")])
    assert rc == NotConnected.exit_code


def test_analyze_rows(p3file, tmp_path, capsys):
    assert main(["analyze", "--input", str(p3file), "--ordering", "natural",
                 "--output", str(tmp_path / "a.csv")]) == 0
    (row,) = read_csv(tmp_path / "a.csv")
    assert (row["classical_height"], row["sampled_height"],
            row["critical_path"], row["schedule_depth"]) == ("3", "3", "3",
                                                            "3")
    assert float(row["fill_ratio"]) == 10 / 7
    write_laplacian(edgeless(5), tmp_path / "e.mtx")
    main(["analyze", "--input", str(tmp_path / "e.mtx"), "--output",
          str(tmp_path / "e.csv")])
    (row,) = read_csv(tmp_path / "e.csv")
    assert [row[k] for k in ("classical_height", "sampled_height",
                             "critical_path", "fill_ratio",
                             "schedule_depth")] == ["1", "1", "1", "2.0", "1"]


def test_bench_rows_and_determinism(p3file, tmp_path, capsys):
    args = ["bench", "--inputs", "poisson3d:n=4", "random:n=30,m=60",
            str(p3file), "--orderings", "random", "nnz-sort", "--workers",
            "1", "2", "4", "8", "--repeats", "1", "--warmup", "0",
            "--seed", "3", "--quiet"]
    assert main(args + ["--output", str(tmp_path / "a.csv")]) == 0
    assert main(args + ["--output", str(tmp_path / "b.csv")]) == 0
    a, b = read_csv(tmp_path / "a.csv"), read_csv(tmp_path / "b.csv")
    assert len(a) == 24 and list(a[0]) == BENCH_FIELDS
    assert all(r["schema"] == SCHEMA and r["error"] == "" for r in a)
    assert [non_timing(r) for r in a] == [non_timing(r) for r in b]
    assert all(float(r["speedup"]) > 0 for r in a)


def test_bench_records_cell_errors(tmp_path, capsys):
    rc = main(["bench", "--inputs", "poisson3d:n=3", "nosuch:n=3",
               "--orderings", "random", "--workers", "1", "--repeats", "1",
               "--output", str(tmp_path / "c.csv"), "--quiet"])
    rows = read_csv(tmp_path / "c.csv")
    assert rc == 0 and len(rows) == 2
    assert rows[0]["error"] == "" and "unknown generator" in rows[1]["error"]


def test_check_expectation(capsys):
    rc = main(["check-expectation", "--lists", "50", "--trials", "2000",
               "--n", "8"])
    out = capsys.readouterr().out
    assert rc == 0 and out.count("PASS") == 2


def test_check_expectation_single_edge(tmp_path, capsys):
    rc = main(["check-expectation", "--lists", "10", "--trials", "50",
               "--gen", "random:n=2,seed=1", "--report",
               str(tmp_path / "r.json")])
    res = json.loads((tmp_path / "r.json").read_text())
    assert rc == 0 and res[1]["max_deviation"] == 0.0


def test_seed_env(monkeypatch, capsys):
    argv = ["factor", "--gen", "random:n=40,m=100", "--ordering", "random"]
    monkeypatch.setenv("PARAC_SEED", "7")
    main(argv)
    env = _json(capsys)
    main(argv + ["--seed", "7"])
    flag = _json(capsys)
    main(argv + ["--seed", "8"])
    other = _json(capsys)
    assert env["checksum"] == flag["checksum"] != other["checksum"]
    assert env["config"]["seed"] == 7 and other["config"]["seed"] == 8


def test_gen_and_usage(tmp_path, capsys):
    assert main(["gen", "--gen", "poisson3d:n=3", "--output",
                 str(tmp_path / "g.mtx")]) == 0
    assert main(["factor"]) == EXIT_USAGE
    assert main(["nonsense"]) == EXIT_USAGE
    assert main(["factor", "--input", str(tmp_path / "missing.mtx")]) == 74
