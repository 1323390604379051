"""
Tests for solver configuration loading and validation.
"""

import json

import pytest

from src.utils.solver_config import DEFAULT_CONFIG, get_config_path, load_solver_config, validate_solver_config


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    monkeypatch.delenv("HAMMERSTEIN_GRID", raising=False)
    monkeypatch.delenv("HAMMERSTEIN_TOL", raising=False)


class TestLoadSolverConfig:

    def test_missing_file_gives_defaults(self, tmp_path):
        assert load_solver_config(str(tmp_path / "absent.json")) == DEFAULT_CONFIG

    def test_file_values_and_comments(self, tmp_path):
        path = tmp_path / "solver.json"
        path.write_text(json.dumps({"_comment": "local run", "grid": 512, "tol": 1e-10}))
        config = load_solver_config(str(path))
        assert config["grid"] == 512
        assert config["tol"] == 1e-10
        assert config["max_iter"] == DEFAULT_CONFIG["max_iter"]
        assert "_comment" not in config

    def test_broken_file_gives_defaults(self, tmp_path):
        path = tmp_path / "solver.json"
        path.write_text("{grid: 512")
        assert load_solver_config(str(path)) == DEFAULT_CONFIG

    def test_environment_overrides(self, tmp_path, monkeypatch):
        monkeypatch.setenv("HAMMERSTEIN_GRID", "128")
        monkeypatch.setenv("HAMMERSTEIN_TOL", "not-a-number")
        config = load_solver_config(str(tmp_path / "absent.json"))
        assert config["grid"] == 128
        assert config["tol"] == DEFAULT_CONFIG["tol"]

    def test_shipped_files(self):
        assert get_config_path().name == "solver_config.json"
        for path in (get_config_path(), get_config_path().with_name("solver_config.example.json")):
            valid, errors = validate_solver_config(load_solver_config(str(path)))
            assert valid, errors


class TestValidateSolverConfig:

    def test_defaults_are_valid(self):
        assert validate_solver_config(dict(DEFAULT_CONFIG)) == (True, [])

    @pytest.mark.parametrize("key, value", [
        ("grid", 100), ("grid", 4), ("grid", 256.0), ("tol", 0.0), ("tol", 0.5), ("tol", "small"),
        ("max_iter", 0), ("max_iter", None), ("sup_abs_max_grid", 16), ("seed", -1), ("seed", 1.5),
    ])
    def test_invalid_values(self, key, value):
        config = dict(DEFAULT_CONFIG)
        config[key] = value
        valid, errors = validate_solver_config(config)
        assert not valid
        assert len(errors) == 1
        assert key in errors[0]
