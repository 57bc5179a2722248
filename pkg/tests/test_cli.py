import csv
import json
import os

import pytest

from modtv.cli import (
    EXIT_GRAPH,
    EXIT_OK,
    EXIT_PARAMETERS,
    build_parser,
    format_summary,
    main,
)
from modtv.records import TIMING_FIELDS, RunRecord, aggregate

DATA = os.path.join(os.path.dirname(__file__), "data")
BARBELL = os.path.join(DATA, "barbell.txt")
BARBELL_ONE_BASED = os.path.join(DATA, "barbell_one_based.txt")


def run_json(capsys, argv):
    code = main(argv)
    return code, json.loads(capsys.readouterr().out)


def test_solve_barbell_partition_and_swap(capsys, tmp_path):
    community = tmp_path / "community.txt"

    code, record = run_json(
        capsys,
        ["-q", "solve", "--graph", BARBELL, "--method", "ps", "--seed", "7",
         "--community-out", str(community)],
    )

    assert code == EXIT_OK
    assert record["q"] == pytest.approx(0.178571, abs=1e-6)
    assert record["size"] == 3
    assert record["method"] == "ps"
    assert record["seed"] == 7
    assert record["n"] == 6 and record["m"] == 7
    assert record["params"]["global"]["sigma"] == 75.0
    assert sorted(community.read_text().split()) in (["0", "1", "2"], ["3", "4", "5"])


@pytest.mark.parametrize("indexing", [[], ["--indexing", "one-based"]])
def test_community_keeps_one_based_ids(capsys, tmp_path, indexing):
    community = tmp_path / "community.txt"

    code, record = run_json(
        capsys,
        ["-q", "solve", "--graph", BARBELL_ONE_BASED, "--method", "ps",
         "--community-out", str(community)] + indexing,
    )

    assert code == EXIT_OK
    assert record["size"] == 3
    assert sorted(community.read_text().split()) in (["1", "2", "3"], ["4", "5", "6"])


@pytest.mark.parametrize("method", ["linear", "fastatvo", "multistart"])
def test_solve_methods(capsys, method):
    code, record = run_json(
        capsys, ["-q", "solve", "--graph", BARBELL, "--method", method]
    )

    assert code == EXIT_OK
    assert record["method"] == method
    assert record["q"] == pytest.approx(5.0 / 28.0, abs=1e-9)


def test_solve_writes_output_file(capsys, tmp_path):
    out = tmp_path / "record.json"

    code = main(["-q", "solve", "--graph", BARBELL, "--out", str(out)])

    assert code == EXIT_OK
    assert capsys.readouterr().out == ""
    record = RunRecord.from_dict(json.loads(out.read_text()))
    assert record.dataset == BARBELL


def test_solve_from_start_file(capsys, tmp_path):
    start = tmp_path / "start.txt"
    start.write_text("0.9\n0.8\n0.7\n-0.7\n-0.8\n-0.9\n")

    code, record = run_json(
        capsys,
        ["-q", "solve", "--graph", BARBELL, "--start", "file", "--start-file", str(start)],
    )

    assert code == EXIT_OK
    assert record["params"]["start"] == "file"
    assert record["q"] == pytest.approx(5.0 / 28.0, abs=1e-9)


def test_solve_is_deterministic(capsys):
    argv = ["-q", "solve", "--graph", BARBELL, "--method", "ps", "--seed", "3", "--start",
            "random", "--ps-iters", "4"]

    _, first = run_json(capsys, argv)
    _, second = run_json(capsys, argv)

    for name in TIMING_FIELDS:
        first.pop(name)
        second.pop(name)
    assert first == second


def test_bench(capsys, tmp_path):
    summary = tmp_path / "summary.csv"

    code, records = run_json(
        capsys,
        ["-q", "bench", "--graph", BARBELL, "--methods", "linear,fastatvo", "--seeds", "2",
         "--start", "random", "--csv", str(summary)],
    )

    assert code == EXIT_OK
    assert isinstance(records, list)
    assert [(r["method"], r["seed"]) for r in records] == [
        ("linear", 0), ("linear", 1), ("fastatvo", 0), ("fastatvo", 1)
    ]

    with open(summary, newline="") as stream:
        rows = list(csv.DictReader(stream))
    expected = aggregate(RunRecord.from_dict(r) for r in records)
    assert [row["method"] for row in rows] == ["linear", "fastatvo"]
    for row, recomputed in zip(rows, expected):
        assert int(row["runs"]) == 2
        assert float(row["q_mean"]) == pytest.approx(recomputed["q_mean"])
        q = [r["q"] for r in records if r["method"] == row["method"]]
        assert recomputed["q_mean"] == pytest.approx(sum(q) / 2)
    assert float(rows[0]["q_ratio_linear"]) == pytest.approx(1.0)
    assert float(rows[1]["q_ratio_linear"]) == pytest.approx(
        float(rows[1]["q_mean"]) / float(rows[0]["q_mean"])
    )


def test_summary_table_shows_ratio_to_linear():
    rows = [
        {"dataset": "data/g.txt", "method": "linear", "runs": 2, "q_mean": 0.2, "q_std": 0.0,
         "fraction_mean": 0.5, "q_ratio_linear": 1.0},
        {"dataset": "data/g.txt", "method": "ps", "runs": 2, "q_mean": 0.3, "q_std": 0.01,
         "fraction_mean": 0.4, "q_ratio_linear": 1.5},
        {"dataset": "data/h.txt", "method": "ps", "runs": 1, "q_mean": 0.3, "q_std": 0.0,
         "fraction_mean": 0.4, "q_ratio_linear": None},
    ]

    header, linear, ps, alone = format_summary(rows).splitlines()

    assert header.split()[-1] == "Q/lin"
    assert linear.split()[-1] == "1.000"
    assert ps.split()[-1] == "1.500"
    assert alone.split()[0] == "h.txt" and alone.split()[-1] == "-"


def test_oracle(capsys):
    code, report = run_json(capsys, ["-q", "oracle"])

    assert code == EXIT_OK
    assert report["passed"]
    assert report["max_modularity"] == pytest.approx(5.0 / 28.0)


def test_oracle_on_file(capsys):
    triangle = os.path.join(DATA, "triangle.txt")

    code, report = run_json(capsys, ["-q", "oracle", "--graph", triangle])

    assert code == EXIT_OK
    assert report["n"] == 3
    assert report["max_modularity"] == pytest.approx(0.0, abs=1e-14)


def test_missing_graph_file(capsys):
    code = main(["-q", "solve", "--graph", os.path.join(DATA, "missing.txt")])

    assert code == EXIT_GRAPH
    assert "error" in capsys.readouterr().err


def test_malformed_graph_file():
    assert main(["-q", "solve", "--graph", os.path.join(DATA, "malformed.txt")]) == EXIT_GRAPH


def test_graph_without_edges():
    assert main(["-q", "solve", "--graph", os.path.join(DATA, "comments_only.txt")]) == EXIT_GRAPH


@pytest.mark.parametrize(
    "extra",
    [["--sigma", "150"], ["--a", "0"], ["--p", "1.0"], ["--start", "file"]],
)
def test_invalid_parameters(extra):
    assert main(["-q", "solve", "--graph", BARBELL] + extra) == EXIT_PARAMETERS


def test_bad_method_is_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["solve", "--graph", BARBELL, "--method", "louvain"])

    assert info.value.code == 2


def test_bad_method_list_is_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["bench", "--graph", BARBELL, "--methods", "ps,louvain"])

    assert info.value.code == 2


def test_method_list_default():
    args = build_parser().parse_args(["bench", "--graph", BARBELL])

    assert args.methods == ["linear", "fastatvo", "multistart", "ps"]
    assert args.graph == [BARBELL]
