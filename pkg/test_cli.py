"""
Tests for the command-line front-end and the problem-spec documents.
"""

import json
import logging
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from src.bvp.catalog import example1, example_catalog
from src.bvp.problems import check_theorem
from src.cli.__main__ import main
from src.cli.spec_document import load_document, parse_document, to_document, write_solution_csv
from src.functions.bvfun import GridFunction
from src.utils.errors import MalformedInputError

SPECS = Path(__file__).parent / "config" / "specs"


@pytest.fixture(autouse=True)
def drop_cli_handler():
    """main() installs a stderr handler on the root logger; remove it after each test."""
    yield
    root = logging.getLogger()
    for handler in list(root.handlers):
        if type(handler) is logging.StreamHandler:
            root.removeHandler(handler)


def _write(tmp_path, document, name="doc.json"):
    path = tmp_path / name
    path.write_text(json.dumps(document))
    return str(path)


class TestCommands:
    """Exit codes and artifacts of every command."""

    def test_examples(self, tmp_path):
        out = tmp_path / "reference.csv"
        assert main(["examples", "--out", str(out), "--log-level", "WARNING"]) == 0
        frame = pd.read_csv(out)
        assert list(frame.columns) == ["quantity", "expected", "computed", "abs_error", "status"]
        assert (frame["status"] == "pass").all()

    def test_solve_spec(self, tmp_path):
        out = tmp_path / "solution.csv"
        assert main(["solve", "--spec", str(SPECS / "example3_multipoint.json"), "--out", str(out)]) == 0
        frame = pd.read_csv(out)
        assert list(frame.columns) == ["t", "x", "exact"]
        assert len(frame) == 257
        np.testing.assert_allclose(frame["x"], frame["exact"], atol=1e-9)

    def test_solve_is_deterministic(self, tmp_path):
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (first, second):
            assert main(["solve", "--example", "example1-multipoint", "--grid", "64", "--out", str(out)]) == 0
        assert first.read_bytes() == second.read_bytes()

    def test_solve_to_stdout(self, capsys):
        assert main(["solve", "--example", "example3-dx", "--grid", "32"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "t,x,exact"
        assert len(lines) == 34

    def test_check_failure(self, capsys):
        assert main(["check", "--example", "example3-dA"]) == 1
        err = capsys.readouterr().err
        assert "status=hypothesis_failure code=1 label=(B6)" in err

    def test_check_report(self, capsys):
        assert main(["check", "--spec", str(SPECS / "example1_dA.json"), "--format", "report"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["theorem"]["verdict"] == "pass"
        assert report["theorem"]["details"]["exact"] == "4/5"
        assert report["constants"]["c_path"] == "(B6)"

    def test_verify(self, capsys):
        assert main(["verify", "--spec", str(SPECS / "example3_dx.json"), "--format", "report"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["source"] == "closed form"
        assert report["passed"]

    def test_eig(self, tmp_path):
        out = tmp_path / "eig.csv"
        assert main(["eig", "--spec", str(SPECS / "periodic_half_pi.json"), "--out", str(out)]) == 0
        frame = pd.read_csv(out)
        assert np.ptp(frame["x"]) == pytest.approx(0.0, abs=1e-12)

    def test_examples_reads_seed_and_grid_cap(self, tmp_path, monkeypatch):
        calls = []

        def record(*args, **kwargs):
            calls.append(kwargs)
            return []

        monkeypatch.setattr("src.cli.__main__.reference_values", record)
        config = _write(tmp_path, {"seed": 7, "sup_abs_max_grid": 64}, "solver.json")
        out = tmp_path / "reference.csv"
        assert main(["examples", "--config", config, "--out", str(out)]) == 0
        assert calls == [{"seed": 7, "max_grid": 64}]

    def test_eig_reads_grid_cap(self, tmp_path, monkeypatch):
        import src.cli.__main__ as cli

        real = cli.eigenpair_search
        seen = []

        def spy(*args, **kwargs):
            seen.append(kwargs["max_grid"])
            return real(*args, **kwargs)

        monkeypatch.setattr(cli, "eigenpair_search", spy)
        config = _write(tmp_path, {"sup_abs_max_grid": 64}, "solver.json")
        out = tmp_path / "eig.csv"
        assert main(["eig", "--spec", str(SPECS / "periodic_half_pi.json"), "--config", config,
                     "--out", str(out)]) == 0
        assert seen == [64]

    @pytest.mark.parametrize("document", [{"seed": -1}, {"sup_abs_max_grid": 16}])
    def test_invalid_config_file(self, tmp_path, document):
        config = _write(tmp_path, document, "solver.json")
        assert main(["examples", "--config", config]) == 3

    def test_eig_needs_threshold_for_nonlocal(self, capsys):
        assert main(["eig", "--example", "example3-dx"]) == 3
        assert "status=malformed_input code=3" in capsys.readouterr().err

    def test_shape_functions_not_summing_to_one(self, tmp_path, capsys):
        document = to_document(example1())
        document["functionals"]["v"] = {"breakpoints": ["0", "1"], "pieces": [["1"]]}
        assert main(["solve", "--spec", _write(tmp_path, document)]) == 3
        assert "status=malformed_input code=3 label=(A9)" in capsys.readouterr().err

    def test_bad_schema(self, tmp_path, capsys):
        document = to_document(example1())
        document["schema"] = 2
        assert main(["check", "--spec", _write(tmp_path, document)]) == 3
        assert "status=malformed_input" in capsys.readouterr().err

    @pytest.mark.parametrize("flags", [["--grid", "100"], ["--grid", "4"], ["--tol", "0.5"], ["--max-iter", "0"]])
    def test_invalid_settings(self, flags):
        assert main(["solve", "--example", "example3-dx", *flags]) == 3

    def test_missing_source(self):
        assert main(["solve"]) == 3

    def test_unknown_example(self, capsys):
        assert main(["check", "--example", "example2"]) == 3
        assert "unknown example" in capsys.readouterr().err


class TestSpecDocument:
    """Parsing and writing problem-spec documents."""

    @pytest.mark.parametrize("spec", example_catalog(), ids=lambda spec: spec.name)
    def test_catalog_round_trip(self, spec):
        document = json.loads(json.dumps(to_document(spec, {"grid": 128, "tol": 1e-9})))
        parsed, solver = parse_document(document)
        assert parsed.to_dict() == spec.to_dict()
        assert parsed.nonlinearity.to_dict() == spec.nonlinearity.to_dict()
        assert solver == {"grid": 128, "tol": 1e-9}

    def test_shipped_documents(self):
        for path in sorted(SPECS.glob("*.json")):
            spec, solver = load_document(path)
            assert solver["grid"] == 256
            assert spec.name == path.stem.replace("_", "-").replace("half-pi", "0.5pi")

    def test_example1_document_keeps_fractions(self):
        spec, _ = load_document(SPECS / "example1_dA.json")
        assert check_theorem(spec).details["exact"] == "4/5"

    @pytest.mark.parametrize("mutate", [
        lambda d: d.update(schema=None),
        lambda d: d.pop("problem"),
        lambda d: d["problem"].update(kind="elliptic"),
        lambda d: d["problem"].update(lam="abc"),
        lambda d: d["problem"].update(lam="inf"),
        lambda d: d["problem"].update(lam=0.5),
        lambda d: d.update(nonlinearity={"kind": "table"}),
        lambda d: d.update(nonlinearity={"kind": "catalog", "name": "cube"}),
        lambda d: d["functionals"]["alpha"].update(nodes=[["1"]]),
        lambda d: d.update(solver={"grid": "1.5"}),
        lambda d: d.update(solver={"colour": "1"}),
    ])
    def test_malformed_documents(self, mutate):
        document = to_document(example1())
        mutate(document)
        with pytest.raises(MalformedInputError):
            parse_document(document)

    def test_unreadable_documents(self, tmp_path):
        with pytest.raises(MalformedInputError):
            load_document(tmp_path / "missing.json")
        broken = tmp_path / "broken.json"
        broken.write_text("{not json")
        with pytest.raises(MalformedInputError):
            load_document(broken)

    def test_solution_csv(self, tmp_path):
        x = GridFunction(np.array([0.0, 0.25, 1.0 / 3.0]))
        text = write_solution_csv(x, tmp_path / "x.csv", exact=np.array([0.0, 0.25, 0.5]))
        assert text.splitlines() == ["t,x,exact", "0,0,0", "0.5,0.25,0.25", "1,0.333333333333333,0.5"]
        assert (tmp_path / "x.csv").read_text() == text
