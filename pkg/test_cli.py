"""
Tests for the command-line interface and its exit-code contract.
"""
import io
import json
from pathlib import Path

import pytest

from ultracenter import main
from ultracenter.config import CAP_ENV, CONFIG_ENV, WORKERS_ENV
from ultracenter.formats import space_to_json

BAD_BASE = {
    "points": ["p", "q", "r"],
    "matrix": [["0", "2", "1"], ["2", "0", "1"], ["1", "1", "0"]],
}


def write_space(tmp_path: Path, name: str, rows, points=("a", "b", "c", "d")) -> str:
    path = tmp_path / name
    path.write_text(json.dumps({"points": list(points), "matrix": rows}))
    return str(path)


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in (CONFIG_ENV, CAP_ENV, WORKERS_ENV):
        monkeypatch.delenv(name, raising=False)


@pytest.fixture
def x4_file(tmp_path, x4):
    path = tmp_path / "x4.json"
    path.write_text(space_to_json(x4))
    return str(path)


@pytest.fixture
def y4_file(tmp_path, y4):
    path = tmp_path / "y4.json"
    path.write_text(space_to_json(y4))
    return str(path)


class TestValidate:
    def test_valid(self, x4_file, capsys):
        assert main(["validate", x4_file]) == 0
        assert "valid ultrametric space" in capsys.readouterr().out

    def test_not_ultrametric(self, tmp_path, capsys):
        rows = [["0", "3/2", "1"], ["3/2", "0", "1"], ["1", "1", "0"]]
        path = write_space(tmp_path, "triple.json", rows, points=("p", "q", "r"))
        assert main(["validate", path, "--format", "json"]) == 1
        report = json.loads(capsys.readouterr().out)
        assert report["valid"] is False
        assert report["violations"][0]["rule"] == "strong_triangle"
        assert report["violations"][0]["location"] == [0, 1, 2]

    def test_truncated(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text('{"points": ["a", "b"], "matrix": [["0", "1"]')
        assert main(["validate", str(path)]) == 2
        assert "Invalid JSON" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert main(["validate", str(tmp_path / "nope.json")]) == 2

    def test_two_inputs(self, x4_file):
        assert main(["validate", x4_file, "--input", x4_file]) == 2

    def test_stdin_csv(self, monkeypatch, capsys):
        monkeypatch.setattr("sys.stdin", io.StringIO("p,q\n0,1\n1,0\n"))
        assert main(["validate", "-"]) == 0


class TestCenter:
    def test_y4_text(self, y4_file, capsys):
        assert main(["center", y4_file]) == 0
        out = capsys.readouterr().out
        assert "C = {0, 2, 3}" in out
        assert "all three center algorithms agree" in out
        assert "recursive" in out

    def test_x4_json(self, x4_file, capsys):
        assert main(["center", "--input", x4_file, "--format", "json"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["center"] == ["0", "3"]
        assert data["algorithms"]["tree"] == ["0", "3"]
        assert data["bound"] == 3

    def test_not_ultrametric_is_domain_error(self, tmp_path, capsys):
        rows = [["0", "2", "1"], ["2", "0", "1"], ["1", "1", "0"]]
        path = write_space(tmp_path, "bad.json", rows, points=("p", "q", "r"))
        assert main(["center", path]) == 1
        assert "strong_triangle" in capsys.readouterr().err

    def test_breach_exits_three(self, x4_file, monkeypatch, capsys):
        import ultracenter.center as center_module

        monkeypatch.setattr(center_module, "center_recursive", lambda space: ())
        assert main(["center", x4_file]) == 3
        err = capsys.readouterr().err
        assert "Internal invariant breach" in err
        assert "Traceback" in err


class TestTreeAndPartition:
    def test_tree_dot(self, x4_file, capsys):
        assert main(["tree", x4_file, "--dot"]) == 0
        assert capsys.readouterr().out.startswith("digraph representing_tree {")

    def test_tree_text(self, x4_file, capsys):
        assert main(["tree", x4_file, "--format", "text"]) == 0
        out = capsys.readouterr().out
        assert "depth 0: 3" in out
        assert "depth 1: 1 2" in out

    def test_partition(self, x4_file, capsys):
        assert main(["partition", x4_file]) == 0
        assert json.loads(capsys.readouterr().out)["parts"] == [["a", "c"], ["b", "d"]]
        assert main(["partition", x4_file, "--format", "dot"]) == 0
        assert "graph diametrical" in capsys.readouterr().out

    def test_partition_dot_limit(self, tmp_path, x4_file):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"export": {"dot_max_points": 2}}))
        assert main(["--config", str(config), "partition", x4_file, "-f", "dot"]) == 1

    def test_single_point_tree(self, tmp_path):
        path = write_space(tmp_path, "one.json", [["0"]], points=("p",))
        assert main(["tree", path]) == 1


class TestGenerate:
    def test_binary_words(self, capsys):
        assert main(["generate", '{"kind":"binary_word","n":3}']) == 0
        data = json.loads(capsys.readouterr().out)
        assert len(data["points"]) == 8

    def test_bad_spec(self, capsys):
        assert main(["generate", '{"kind":"binary_word"}']) == 2

    def test_budget(self, tmp_path):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"constructions": {"max_points": 4}}))
        spec = '{"kind":"binary_word","n":3}'
        assert main(["--config", str(config), "generate", spec]) == 1

    @pytest.mark.parametrize(
        "spec",
        [
            {"kind": "double", "base": BAD_BASE, "t_star": "5"},
            {"kind": "add_point", "base": BAD_BASE},
            {"kind": "add_point", "base": BAD_BASE, "times": 2},
        ],
    )
    def test_non_ultrametric_base(self, spec, capsys):
        assert main(["generate", json.dumps(spec)]) == 1
        captured = capsys.readouterr()
        assert captured.out == ""
        assert "strong_triangle" in captured.err
        assert "Traceback" not in captured.err

    def test_unwritable_output(self, tmp_path, capsys):
        target = tmp_path / "missing" / "out.json"
        spec = '{"kind":"binary_word","n":1}'
        assert main(["generate", spec, "-o", str(target)]) == 2
        assert "Cannot write" in capsys.readouterr().err
        assert not target.exists()

    def test_round_trip(self, tmp_path, capsys):
        space_path = tmp_path / "space.json"
        tree_path = tmp_path / "tree.json"
        again_path = tmp_path / "again.json"
        base = {"points": ["a", "b"], "matrix": [["0", "1/2"], ["1/2", "0"]]}
        spec = json.dumps({"kind": "add_point", "base": base, "times": 3})
        assert main(["generate", spec, "-o", str(space_path)]) == 0
        assert main(["validate", str(space_path)]) == 0
        assert main(["center", str(space_path)]) == 0
        assert main(["tree", str(space_path), "-o", str(tree_path)]) == 0
        assert main(["realize", str(tree_path), "-o", str(again_path)]) == 0
        assert again_path.read_bytes() == space_path.read_bytes()
        capsys.readouterr()

    def test_csv_output(self, capsys):
        spec = '{"kind":"realize_set","values":["0","2","3"]}'
        assert main(["generate", spec, "-f", "csv"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 5


class TestExplore:
    def test_bound_check(self, capsys):
        assert main(["bound-check", "8"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 9
        assert lines[0].split()[0] == "n"
        assert [int(line.split()[1]) for line in lines[1:]] == [1, 2, 2, 3, 3, 3, 3, 4]
        assert len({len(line) for line in lines}) == 1

    def test_bound_check_json(self, capsys):
        assert main(["bound-check", "4", "--format", "json"]) == 0
        rows = json.loads(capsys.readouterr().out)["rows"]
        assert [row["max_center_size"] for row in rows] == [1, 2, 2, 3]

    def test_enumerate(self, capsys):
        assert main(["enumerate", "4"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 6
        first = json.loads(lines[0])
        assert first["n"] == 4
        assert "tree" in first

    def test_enumerate_is_independent_of_workers(self, capsys):
        assert main(["--workers", "1", "enumerate", "5"]) == 0
        serial = capsys.readouterr().out
        assert main(["--workers", "2", "enumerate", "5"]) == 0
        assert capsys.readouterr().out == serial

    def test_cap(self, capsys, monkeypatch):
        assert main(["--cap", "3", "enumerate", "4"]) == 1
        monkeypatch.setenv(CAP_ENV, "3")
        assert main(["enumerate", "4"]) == 1
        assert main(["--cap", "4", "enumerate", "4"]) == 0

    def test_bad_workers(self):
        assert main(["--workers", "0", "enumerate", "3"]) == 2

    def test_conjectures(self, capsys):
        assert main(["conjecture", "1", "--l", "2", "-f", "json"]) == 0
        assert json.loads(capsys.readouterr().out)["verdict"] == "no-counterexample"
        assert main(["conjecture", "2", "--l", "1", "--alphabet", "3"]) == 0
        assert "no-counterexample" in capsys.readouterr().out
        assert main(["conjecture", "3", "--values", "0,2,3", "-f", "json"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["verdict"] == "witness-verified"
        assert len(data["witness"]["points"]) == 4
        assert main(["conjecture", "3"]) == 2
        assert main(["conjecture", "3", "--values", "1,2"]) == 1

    def test_selfcheck(self, capsys):
        args = ["selfcheck", "--seed", "3", "--count", "15", "--max-points", "20"]
        assert main(args) == 0
        assert "15 spaces" in capsys.readouterr().out


def test_bad_config(tmp_path, monkeypatch, x4_file):
    config = tmp_path / "config.json"
    config.write_text("{")
    monkeypatch.setenv(CONFIG_ENV, str(config))
    assert main(["validate", x4_file]) == 2


def test_no_command(capsys):
    assert main([]) == 2
