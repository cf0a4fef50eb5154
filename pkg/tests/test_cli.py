from __future__ import annotations

import csv
import json

import pytest

from hrgcover.cli import CSV_COLUMNS, ExperimentSpec, GraphSource, StartupError, main, parse_seeds, relative_error
from hrgcover.cover import ExactResult, ExactStatus
from hrgcover.graph import read_coordinates


def read_csv(path):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        return reader.fieldnames, list(reader)


def test_generate_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["generate", "--n", "100", "--c", "0", "--seed", "1", "--output", str(a)]) == 0
    assert main(["generate", "--n", "100", "--c", "0", "--seed", "1", "--output", str(b)]) == 0
    for ext in (".edges", ".coords"):
        assert (tmp_path / f"a{ext}").read_bytes() == (tmp_path / f"b{ext}").read_bytes()


def test_generate_metadata(tmp_path):
    out = tmp_path / "g"
    assert main(["generate", "--n", "1000", "--c", "0.5", "--seed", "3", "--mode", "poisson", "--output", str(out)]) == 0
    with open(f"{out}.coords") as fh:
        radii, _, meta = read_coordinates(fh)
    assert meta["mode"] == "poisson"
    assert meta["rng"] == "numpy.random.PCG64"
    assert int(meta["realized_n"]) == len(radii)
    assert int(meta["n"]) == 1000 and float(meta["C"]) == 0.5 and meta["seed"] == "3"


def test_solve_on_generated_files(tmp_path):
    out = tmp_path / "g"
    main(["generate", "--n", "300", "--c", "-1", "--seed", "2", "--output", str(out)])
    csv_path = tmp_path / "solve.csv"
    rc = main([
        "solve", "--input", f"{out}.edges", "--coords", f"{out}.coords",
        "--algorithms", "standard,adapted-degree,adapted-radius,exact", "--tau", "3", "--output", str(csv_path),
    ])  # fmt: skip
    assert rc == 0
    header, rows = read_csv(csv_path)
    assert header == CSV_COLUMNS
    assert [r["algorithm"] for r in rows] == ["standard", "adapted-degree", "adapted-radius", "exact"]
    sizes = {r["algorithm"]: int(r["cover_size"]) for r in rows}
    assert sizes["adapted-degree"] <= sizes["standard"]
    assert min(sizes.values()) == sizes["exact"]
    meta = json.loads((tmp_path / "solve.csv.meta.json").read_text())
    assert meta["errors"] == [] and len(meta["config_hash"]) == 16


def test_evaluate_csv_schema_and_ratios(tmp_path):
    csv_path = tmp_path / "eval.csv"
    assert main(["evaluate", "--n", "400", "--c", "-1", "--seeds", "0-2", "--output", str(csv_path)]) == 0
    header, rows = read_csv(csv_path)
    assert header == CSV_COLUMNS
    assert len(rows) == 6
    # deterministic order: algorithm, then seed
    assert [(r["algorithm"], r["seed"]) for r in rows] == [
        (a, s) for a in ("standard", "adapted-degree") for s in ("0", "1", "2")
    ]
    for r in rows:
        assert r["opt_status"] == "optimal"
        assert float(r["ratio"]) >= 1.0 and r["ratio_is_bound"] == "false"
        assert int(r["cover_size"]) == int(r["greedy_count"]) + int(r["exact_cover_count"])
    std = {r["seed"]: r for r in rows if r["algorithm"] == "standard"}
    for r in rows:
        if r["algorithm"] != "adapted-degree":
            continue
        s = std[r["seed"]]
        if s["cover_size"] == s["lower_bound"]:
            assert r["relative_error"] == ""
        else:
            assert 0.0 <= float(r["relative_error"]) <= 1.0


def test_parallel_jobs_give_identical_output(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    base = ["solve", "--n", "500", "--c", "0", "--seeds", "0-3"]
    assert main(base + ["--output", str(a)]) == 0
    assert main(base + ["--jobs", "2", "--output", str(b)]) == 0
    strip = lambda rows: [{k: v for k, v in r.items() if k != "time_ms"} for r in rows]  # noqa: E731
    assert strip(read_csv(a)[1]) == strip(read_csv(b)[1])


def test_relative_error_rules():
    opt = ExactResult(ExactStatus.OPTIMAL, list(range(10)), 10, 10)
    assert relative_error(10, 10, opt) is None
    assert relative_error(10, 12, opt) == 0.0
    assert relative_error(11, 12, opt) == 0.5
    bound = ExactResult(ExactStatus.LOWER_BOUND_ONLY, None, 9, 12)
    assert relative_error(10, 12, bound) is None


def test_radius_without_coords_is_startup_error(tmp_path, capsys):
    edges = tmp_path / "x.edges"
    edges.write_text("0 1\n1 2\n")
    rc = main(["solve", "--input", str(edges), "--algorithms", "adapted-radius"])
    assert rc == 2
    assert "needs vertex coordinates" in capsys.readouterr().err
    with pytest.raises(StartupError):
        ExperimentSpec("solve", [GraphSource("x", edges=str(edges))], ["adapted-radius"])


def test_unknown_algorithm_is_startup_error():
    with pytest.raises(StartupError):
        ExperimentSpec("solve", [], ["greedy-ish"])


def test_unreadable_input_is_recorded_per_row(tmp_path, capsys):
    bad = tmp_path / "bad.edges"
    bad.write_text("0 1\nnot an edge\n")
    csv_path = tmp_path / "out.csv"
    assert main(["solve", "--input", str(bad), "--output", str(csv_path)]) == 1
    _, rows = read_csv(csv_path)
    assert {r["opt_status"] for r in rows} == {"error"}
    meta = json.loads((tmp_path / "out.csv.meta.json").read_text())
    assert "line 2" in meta["errors"][0]["error"]


def test_diagnose_partition_and_small_n_error(tmp_path, capsys):
    csv_path = tmp_path / "diag.csv"
    rc = main(["diagnose", "--n", "10000", "--c", "2", "--tau", "1", "--output", str(csv_path)])
    assert rc == 0
    _, rows = read_csv(csv_path)
    r = rows[0]
    assert int(r["inner_disk"]) + int(r["narrow_run_vertices"]) + int(r["wide_run_vertices"]) == 10000
    assert r["outer_span_violations"] == "0"

    rc = main(["diagnose", "--n", "10000", "--c", "0", "--tau", "0.5", "--output", str(csv_path)])
    assert rc == 1
    _, rows = read_csv(csv_path)
    assert "minimum admissible n" in rows[0]["error"]


def test_calibrate_prints_value(capsys):
    assert main(["calibrate", "--n", "1000", "--avg-degree", "6", "--seeds", "2"]) == 0
    C = float(capsys.readouterr().out)
    assert -20 <= C <= 10


def test_parse_seeds():
    assert parse_seeds("0-3,7, 9") == [0, 1, 2, 3, 7, 9]
    assert parse_seeds("5") == [5]
