"""
Tests for run configuration resolution.
"""

import json

import pytest

from ..cli.config import RunConfig, SliceChoice, Suite, parse_complex_pair, resolve_config
from ..errors import ConfigurationError


class TestResolveConfig:
    """Test cases for flag, environment and file precedence."""

    @pytest.fixture
    def config_file(self, tmp_path):
        path = tmp_path / "biham.json"
        path.write_text(json.dumps({"n": 4, "seed": 7, "trials": 5, "radius": 0.1}))
        return path

    def test_defaults(self):
        config = resolve_config({}, environ={})
        assert config.n == 3
        assert config.seed == 42
        assert config.trials == 100
        assert config.tol == 1e-10
        assert config.tol_reg == 1e-8
        assert config.fd_step is None
        assert config.suite is Suite.ALL
        assert config.slice is SliceChoice.BOTH
        assert config.radius == 0.2
        assert config.z_end_complex == 0.5

    def test_precedence(self, config_file):
        environ = {"BIHAM_SEED": "11", "BIHAM_TRIALS": "9"}
        config = resolve_config({"trials": 3, "n": None}, config_file, environ)
        assert config.trials == 3
        assert config.seed == 11
        assert config.n == 4
        assert config.radius == 0.1

    def test_empty_environment_values_are_ignored(self):
        assert resolve_config({}, environ={"BIHAM_N": ""}).n == 3

    @pytest.mark.parametrize("flags", [
        {"n": 1},
        {"trials": 0},
        {"steps": 0},
        {"tol": 0.0},
        {"tol_reg": -1.0},
        {"fd_step": 0.5},
        {"radius": 1.5},
        {"format": "csv"},
        {"log_level": "loud"},
        {"seed": -1},
        {"z_end": "1,2,3"},
    ])
    def test_invalid_values(self, flags):
        with pytest.raises(ConfigurationError):
            resolve_config(flags, environ={})

    def test_unknown_file_key(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"colour": "red"}))
        with pytest.raises(ConfigurationError):
            resolve_config({}, path, environ={})

    def test_unreadable_file(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ConfigurationError):
            resolve_config({}, path, environ={})
        with pytest.raises(ConfigurationError):
            resolve_config({}, tmp_path / "missing.json", environ={})

    def test_environment_strings(self):
        environ = {"BIHAM_Z_END": "0.5,0.25", "BIHAM_OBSERVABLES": "glGl;g[1,2]",
                   "BIHAM_LOG_LEVEL": "debug", "BIHAM_SUITE": "hierarchy"}
        config = resolve_config({}, environ=environ)
        assert config.z_end_complex == 0.5 + 0.25j
        assert config.observables == ["glGl", "g[1,2]"]
        assert config.log_level == "DEBUG"
        assert config.suite is Suite.HIERARCHY

    def test_configuration_error_is_value_error(self):
        with pytest.raises(ValueError):
            resolve_config({"n": 0}, environ={})


class TestParseComplexPair:
    """Test cases for complex number parsing."""

    @pytest.mark.parametrize("value,expected", [
        ("0.5", (0.5, 0.0)),
        ("1, -2", (1.0, -2.0)),
        (2, (2.0, 0.0)),
        (1 - 1j, (1.0, -1.0)),
        ([0.0, 3.0], (0.0, 3.0)),
    ])
    def test_accepted_forms(self, value, expected):
        assert parse_complex_pair(value) == expected

    def test_rejects_garbage(self):
        with pytest.raises(ValueError):
            parse_complex_pair({"re": 1})

    def test_model_default_is_valid(self):
        assert RunConfig().z_end == (0.5, 0.0)
