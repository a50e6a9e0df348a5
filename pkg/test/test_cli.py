#!/usr/bin/env python3
"""
Tests for the fano-mck command line: exit codes, output formats and the JSON report.
"""

import json

import pytest
from typer.testing import CliRunner

from fano_mck import __version__
from fano_mck.cli import app

runner = CliRunner()

PASSING_SCENARIO = """
[scenario]
name = cli-pass
variety = y18
format = json

[check.model]
kind = model

[check.cube-relation]
kind = normalize
m = 1
expr = h(1)^3 - 18*o(1)
rhs = 0

[check.yf]
kind = yf
"""

FAILING_SCENARIO = """
[scenario]
name = cli-fail
variety = y18

[check.wrong-sign]
kind = normalize
m = 2
expr = tau(1,2)^2
rhs = 4*o(1)*o(2)

[check.model]
kind = model
"""


@pytest.fixture
def scenario_file(tmp_path):
    def write(text: str, name: str = "scenario.ini"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return write


class TestGlobalOptions:

    def test_version(self):
        result = runner.invoke(app, ["--version"])
        assert result.exit_code == 0
        assert f"fano-mck version {__version__}" in result.output

    def test_unknown_format(self):
        result = runner.invoke(app, ["model-info", "--format", "xml"])
        assert result.exit_code == 2


class TestRun:
    """Scenario files from the command line."""

    def test_passing_scenario_uses_scenario_format(self, scenario_file):
        result = runner.invoke(app, ["run", str(scenario_file(PASSING_SCENARIO))])
        assert result.exit_code == 0, result.output
        data = json.loads(result.output)
        assert data["status"] == "pass"
        assert [check["name"] for check in data["checks"]] == ["model", "cube-relation", "yf"]

    def test_json_report_written_to_file(self, scenario_file, tmp_path):
        out = tmp_path / "reports" / "report.json"
        result = runner.invoke(app, ["run", str(scenario_file(PASSING_SCENARIO)), "--out", str(out)])
        assert result.exit_code == 0
        data = json.loads(out.read_text(encoding="utf-8"))
        assert set(data) == {"version", "scenario", "status", "millis", "checks"}
        assert data["version"] == __version__
        assert data["scenario"]["name"] == "cli-pass"
        for check in data["checks"]:
            assert set(check) == {"name", "kind", "status", "values", "millis"}
        assert data["checks"][0]["values"]["top_integral"] == "18"

    def test_failing_scenario_exits_one(self, scenario_file):
        result = runner.invoke(app, ["run", str(scenario_file(FAILING_SCENARIO)), "--format", "text"])
        assert result.exit_code == 1
        assert "[FAIL] wrong-sign" in result.output
        assert "[PASS] model" in result.output
        assert "overall: FAIL" in result.output

    def test_malformed_scenario_exits_two(self, scenario_file):
        result = runner.invoke(app, ["run", str(scenario_file("[scenario]\nvariety = p3\n"))])
        assert result.exit_code == 2
        assert "error" in result.output

    def test_missing_scenario_exits_two(self, tmp_path):
        result = runner.invoke(app, ["run", str(tmp_path / "absent.ini")])
        assert result.exit_code == 2


class TestSingleCommands:
    """normalize, verify, basis and model-info."""

    def test_normalize(self):
        result = runner.invoke(app, ["normalize", "--m", "2", "--expr", "tau(1,2)^2"])
        assert result.exit_code == 0
        assert "normal_form: -4*o(1)*o(2)" in result.output

    def test_normalize_json(self):
        result = runner.invoke(app, ["normalize", "--m", "3", "--expr", "tau(1,2)*tau(1,3)*tau(2,3)", "-f", "json"])
        assert result.exit_code == 0
        values = json.loads(result.output)["checks"][0]["values"]
        assert values["normal_form"] == "-4*o(1)*o(2)*o(3)"

    def test_normalize_large_power(self):
        result = runner.invoke(app, ["normalize", "--m", "2", "--expr", "(h(1) + tau(1,2))^100000000"])
        assert result.exit_code == 0
        assert "normal_form: 0" in result.output

    def test_normalize_rejects_invalid_expression(self):
        result = runner.invoke(app, ["normalize", "--m", "2", "--expr", "tau(1,1)"])
        assert result.exit_code == 2

    def test_verify_matching_sum(self):
        result = runner.invoke(app, ["verify", "matching-sum", "--k", "3", "--b", "4", "--format", "json"])
        assert result.exit_code == 0
        values = json.loads(result.output)["checks"][0]["values"]
        assert values["verdict"] == "zero"
        assert values["first_vanishing_k"] == 3

    @pytest.mark.parametrize("check", ["mck", "lieberman", "pure-degree", "abel-jacobi", "delta-h", "yf", "middle-iso"])
    def test_verify_passes(self, check):
        result = runner.invoke(app, ["verify", check])
        assert result.exit_code == 0, result.output

    def test_verify_unknown_check(self):
        result = runner.invoke(app, ["verify", "riemann"])
        assert result.exit_code == 2

    def test_verify_needs_parameters(self):
        result = runner.invoke(app, ["verify", "injectivity"])
        assert result.exit_code == 2

    def test_basis(self):
        result = runner.invoke(app, ["basis", "--m", "2", "--codim", "3", "--format", "json"])
        assert result.exit_code == 0
        values = json.loads(result.output)
        assert values["count"] == 5
        assert "tau(1,2)" in values["monomials"]

    def test_basis_text(self):
        result = runner.invoke(app, ["basis", "--m", "1", "--codim", "3"])
        assert result.exit_code == 0
        assert "  o(1)" in result.output

    def test_model_info(self):
        result = runner.invoke(app, ["model-info", "--variety", "z4"])
        assert result.exit_code == 0
        assert "degree: 4" in result.output
        assert "two quadrics" in result.output

    def test_model_info_unknown_variety(self):
        result = runner.invoke(app, ["model-info", "--variety", "p3"])
        assert result.exit_code == 2
