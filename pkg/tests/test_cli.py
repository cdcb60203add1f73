"""Command-line interface: exit codes, output shapes, determinism."""

import json

import pytest

from semrank.cli import main
from semrank.fileio import load_dataset, load_graph

# Small dataset flags shared by most invocations to keep the suite fast.
_DATA = ["--num-points", "30", "--clusters", "3", "--seed", "7"]
_SMALL = [*_DATA, "--pool-size", "10", "--k", "3", "--graph-k", "3"]


def _run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestGenerate:
    def test_writes_a_loadable_dataset(self, tmp_path, capsys):
        out = tmp_path / "data.tsv"
        code, _, err = _run(["generate", *_DATA, "--out", str(out)], capsys)
        assert code == 0
        assert err == ""
        dataset = load_dataset(out)
        assert len(dataset.points) == 30
        assert set(dataset.labels.values()) == {0, 1, 2}

    def test_out_flag_is_required(self, capsys):
        code, _, err = _run(["generate", *_DATA], capsys)
        assert code == 1
        assert "semrank generate: error:" in err


class TestCompress:
    def test_csv_to_stdout(self, capsys):
        code, out, err = _run(
            ["compress", *_DATA, "--pool-size", "10", "--k", "3"], capsys
        )
        assert code == 0
        assert err == ""
        lines = out.splitlines()
        assert lines[0] == "method,relevance,diversity,items"
        method, _, _, items = lines[1].split(",")
        assert method == "semantic_compression"
        assert len(items.split(";")) == 3

    def test_reads_a_saved_dataset(self, tmp_path, capsys):
        data = tmp_path / "data.tsv"
        assert main(["generate", *_DATA, "--out", str(data)]) == 0
        capsys.readouterr()
        code, out, _ = _run(
            ["compress", "--data", str(data), *_DATA, "--pool-size", "10", "--k", "3"],
            capsys,
        )
        assert code == 0
        assert "semantic_compression" in out

    def test_selection_size_beyond_pool_is_a_runtime_error(self, capsys):
        code, _, err = _run(
            ["compress", *_DATA, "--pool-size", "5", "--k", "10"], capsys
        )
        assert code == 2
        assert err.startswith("error: ")


class TestBuildGraphAndPpr:
    def test_graph_round_trips_and_ppr_ranks(self, tmp_path, capsys):
        graph_path = tmp_path / "graph.tsv"
        code, _, _ = _run(
            ["build-graph", *_DATA, "--graph-k", "3", "--out", str(graph_path)], capsys
        )
        assert code == 0
        graph = load_graph(graph_path)
        assert len(graph.nodes) == 30

        code, out, err = _run(
            ["ppr", "--graph", str(graph_path), "--seeds", "p00,p01"], capsys
        )
        assert code == 0
        assert err == ""
        lines = out.splitlines()
        assert lines[0] == "node,score"
        scores = [float(line.split(",")[1]) for line in lines[1:]]
        assert len(scores) == 30
        assert abs(sum(scores) - 1.0) < 1e-5
        assert scores == sorted(scores, reverse=True)

    def test_ppr_json_format(self, tmp_path, capsys):
        graph_path = tmp_path / "graph.tsv"
        assert main(["build-graph", *_DATA, "--out", str(graph_path)]) == 0
        capsys.readouterr()
        code, out, _ = _run(
            ["ppr", "--graph", str(graph_path), "--seeds", "p00", "--format", "json"],
            capsys,
        )
        assert code == 0
        payload = json.loads(out)
        assert {"node", "score"} == set(payload[0])

    def test_missing_graph_file_is_a_runtime_error(self, tmp_path, capsys):
        code, _, err = _run(
            ["ppr", "--graph", str(tmp_path / "nope.tsv"), "--seeds", "p00"], capsys
        )
        assert code == 2
        assert err.startswith("error: ")

    def test_unknown_seed_is_a_runtime_error(self, tmp_path, capsys):
        graph_path = tmp_path / "graph.tsv"
        assert main(["build-graph", *_DATA, "--out", str(graph_path)]) == 0
        capsys.readouterr()
        code, _, err = _run(
            ["ppr", "--graph", str(graph_path), "--seeds", "zz"], capsys
        )
        assert code == 2
        assert "seed node 'zz' is not in the graph" in err


class TestRetrieve:
    def test_hybrid_row_with_default_beta(self, capsys):
        code, out, _ = _run(["retrieve", *_SMALL], capsys)
        assert code == 0
        assert out.splitlines()[1].startswith("hybrid,")

    def test_beta_one_tags_pure_graph_ranking(self, capsys):
        code, out, _ = _run(["retrieve", *_SMALL, "--beta", "1.0"], capsys)
        assert code == 0
        assert out.splitlines()[1].startswith("graph_ppr,")


class TestExperiment:
    def test_reports_all_three_methods(self, capsys):
        code, out, err = _run(["experiment", *_SMALL], capsys)
        assert code == 0
        assert err == ""
        lines = out.splitlines()
        assert lines[0] == "method,relevance,diversity,items"
        assert [line.split(",")[0] for line in lines[1:]] == [
            "topk_ann",
            "semantic_compression",
            "graph_ppr",
        ]

    def test_identical_flags_give_identical_bytes(self, tmp_path, capsys):
        for name in ("a", "b"):
            code, _, _ = _run(
                [
                    "experiment",
                    *_SMALL,
                    "--out",
                    str(tmp_path / f"{name}.csv"),
                    "--plot",
                    str(tmp_path / f"{name}.svg"),
                ],
                capsys,
            )
            assert code == 0
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
        assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()
        assert (tmp_path / "a.svg").read_bytes().startswith(b"<svg ")

    def test_json_format(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        code, _, _ = _run(["experiment", *_SMALL, "--format", "json", "--out", str(out)], capsys)
        assert code == 0
        payload = json.loads(out.read_text(encoding="utf-8"))
        assert {entry["method"] for entry in payload["results"]} == {
            "topk_ann",
            "semantic_compression",
            "graph_ppr",
        }

    def test_dash_out_means_stdout(self, capsys):
        code, out, _ = _run(["experiment", *_SMALL, "--out", "-"], capsys)
        assert code == 0
        assert out.startswith("method,relevance,diversity,items\n")


class TestSweepLambda:
    def test_csv_has_one_row_per_weight(self, capsys):
        code, out, _ = _run(
            ["sweep-lambda", *_SMALL, "--lambdas", "0,0.5,2", "--runs", "2"], capsys
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "lambda,relevance,diversity"
        assert [line.split(",")[0] for line in lines[1:]] == ["0.0", "0.5", "2.0"]


class TestExitCodes:
    def test_no_arguments_is_a_usage_error(self, capsys):
        code, _, err = _run([], capsys)
        assert code == 1
        assert "semrank: error:" in err

    def test_unknown_flag_is_a_usage_error(self, capsys):
        code, _, err = _run(["experiment", "--bogus"], capsys)
        assert code == 1
        assert "error:" in err

    def test_bad_choice_is_a_usage_error(self, capsys):
        code, _, err = _run(["experiment", "--symbolic-mode", "ultra"], capsys)
        assert code == 1
        assert "invalid choice" in err

    def test_impossible_placement_is_a_runtime_error(self, tmp_path, capsys):
        code, _, err = _run(
            [
                "generate",
                "--num-points",
                "40",
                "--clusters",
                "40",
                "--out",
                str(tmp_path / "data.tsv"),
            ],
            capsys,
        )
        assert code == 2
        assert err.startswith("error: could not place centroid")
