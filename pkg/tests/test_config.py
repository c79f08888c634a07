"""Unit tests for the config module."""

import pytest

from exactdom import config as config_module
from exactdom.config import RunConfig, _parse_target_params
from exactdom.errors import ConfigFileError, ParameterValidationError
from exactdom.main import build_parser
from exactdom.models import OperatorId


def _config(argv, tmp_path=None, monkeypatch=None):
    if monkeypatch is not None:
        monkeypatch.chdir(tmp_path)
    return RunConfig.from_args(build_parser().parse_args(argv))


class TestTargetParams:
    def test_real_and_complex(self):
        assert _parse_target_params(["A=1", "mu=0.5+0.2j"]) == {"A": 1.0, "mu": 0.5 + 0.2j}

    def test_missing_equals(self):
        with pytest.raises(ParameterValidationError, match="name=value"):
            _parse_target_params(["A"])

    def test_not_a_number(self):
        with pytest.raises(ParameterValidationError, match="not a number"):
            _parse_target_params(["A=one"])


class TestFromArgs:
    def test_defaults(self, tmp_path, monkeypatch):
        cfg = _config(["dominant"], tmp_path, monkeypatch)
        assert cfg.operator == "psi1"
        assert cfg.target == "janowski"
        assert cfg.rmax == 0.95
        assert cfg.rings == 64
        assert cfg.thetas == 256
        assert cfg.config_source is None
        assert cfg.violations() == []

    def test_preset_fills_parameters(self, tmp_path, monkeypatch):
        cfg = _config(["dominant", "--preset", "arctan-shifted"], tmp_path, monkeypatch)
        assert cfg.operator_id == OperatorId.PSI2
        assert cfg.target == "shifted-halfplane"
        assert cfg.alpha == pytest.approx(-2.0 / 3.0)
        assert cfg.gamma == 0.25
        assert cfg.preset == "arctan-shifted"

    def test_flags_beat_file_beat_preset(self, tmp_path, monkeypatch):
        (tmp_path / "exactdom.yml").write_text("preset: exp-mixed\nalpha: -0.5\nrings: 12\n")
        cfg = _config(["dominant", "--rings", "8"], tmp_path, monkeypatch)
        assert cfg.preset == "exp-mixed"
        assert cfg.target == "exp"
        assert cfg.alpha == -0.5
        assert cfg.rings == 8
        assert cfg.config_source.endswith("exactdom.yml")

    def test_explicit_config_path(self, tmp_path, monkeypatch):
        path = tmp_path / "sweep.yml"
        path.write_text("target: sqrt\ntarget_params:\n  kappa: 0.5\n")
        cfg = _config(["bound", "--config", str(path)], tmp_path, monkeypatch)
        assert cfg.build_target().params == {"kappa": 0.5}

    def test_other_target_drops_preset_params(self, tmp_path, monkeypatch):
        cfg = _config(["dominant", "--preset", "halfplane-identity", "--target", "exp"], tmp_path, monkeypatch)
        assert cfg.target_params == {}
        assert cfg.build_target().params == {"mu": 1.0}

    def test_complex_beta_parts(self, tmp_path, monkeypatch):
        cfg = _config(["bound", "--beta-im", "0.5"], tmp_path, monkeypatch)
        assert cfg.beta == 1.0 + 0.5j

    def test_unknown_preset(self, tmp_path, monkeypatch):
        with pytest.raises(ParameterValidationError, match="Available presets"):
            _config(["dominant", "--preset", "example-7"], tmp_path, monkeypatch)

    def test_missing_config_path(self, tmp_path, monkeypatch):
        with pytest.raises(ConfigFileError, match="config file not found"):
            _config(["bound", "--config", str(tmp_path / "absent.yml")], tmp_path, monkeypatch)

    def test_file_without_known_keys_warns(self, tmp_path, monkeypatch):
        (tmp_path / "exactdom.yml").write_text("colour: blue\n")
        warnings = []
        monkeypatch.setattr(config_module.log, "warning", lambda msg, *args: warnings.append(msg % args))
        cfg = _config(["dominant"], tmp_path, monkeypatch)
        assert cfg.target == "janowski"
        assert len(warnings) == 1
        assert "no recognised keys" in warnings[0]


class TestDerived:
    def test_grid(self):
        grid = RunConfig(command="dominant", rmax=0.9, rings=4, thetas=16).grid()
        assert grid.shape == (16, 4)

    def test_bound_case_from_target(self):
        assert RunConfig(command="bound", target="sector").bound_case() == "4"
        assert RunConfig(command="bound", target="janowski-reversed").bound_case() == "1r"

    def test_bound_case_without_match(self):
        with pytest.raises(ParameterValidationError, match="no bound case"):
            RunConfig(command="bound", target="shifted-halfplane").bound_case()

    def test_echo(self):
        echo = RunConfig(command="bound").echo()
        assert echo["command"] == "bound"
        assert echo["grid"] == {"rmax": 0.95, "rings": 64, "thetas": 256}


class TestViolations:
    def test_collects_everything(self):
        cfg = RunConfig(command="dominant", alpha=0.5, beta=0j, rmax=1.2, thetas=4)
        found = cfg.violations()
        assert len(found) == 4
        assert any("alpha" in v for v in found)
        assert any("beta" in v for v in found)
        assert any("rmax" in v for v in found)
        assert any("thetas" in v for v in found)

    def test_janowski_order(self):
        cfg = RunConfig(command="dominant", target_params={"A": -1.0, "B": 1.0})
        assert any("-1 <= B < A <= 1" in v for v in cfg.violations())

    def test_psi2_needs_gamma(self):
        found = RunConfig(command="dominant", operator="psi2").violations()
        assert found == ["gamma must be non-zero for psi2"]

    def test_psi2_tan_reach(self):
        cfg = RunConfig(command="dominant", operator="psi2", gamma=4.0)
        assert any("pi/2" in v for v in cfg.violations())

    def test_unknown_operator(self):
        assert any("operator must be one of" in v for v in RunConfig(command="bound", operator="psi3").violations())

    def test_unknown_suite(self):
        assert any("Available suites" in v for v in RunConfig(command="verify", suite="everything").violations())

    def test_suite_ignored_outside_verify(self):
        assert RunConfig(command="bound", suite="everything").violations() == []

    def test_case_target_mismatch(self):
        found = RunConfig(command="bound", case="2").violations()
        assert found == ["case 2 needs target 'exp' (got 'janowski')"]

    def test_bad_tail_mode(self):
        assert any("lambda4_tail" in v for v in RunConfig(command="bound", lambda4_tail="lazy").violations())
