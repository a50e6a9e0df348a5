#!/usr/bin/env python3
"""
Tests for scenario parsing, the check registry, the scenario runner and report rendering.
"""

import importlib
import json
import time
from fractions import Fraction
from pathlib import Path

import pytest
from eliot import start_action

from fano_mck.datatypes import CHECK_OPERATIONS
from fano_mck.errors import ScenarioError
from fano_mck.verification import (
    CHECK_HANDLERS,
    CheckResult,
    Report,
    Scenario,
    ScenarioRunner,
    Settings,
    get_runner,
    load_scenario,
    parse_scenario,
    render,
    to_json,
    to_text,
)
from fano_mck.verification.items import jsonable
from fano_mck.verification.runner import WALL_TIME_EXCEEDED

SMALL_SCENARIO = """
[scenario]
name = small
variety = y18
format = json

[limits]
max_seconds = 300

[check.model]
kind = model

[check.normal-form]
kind = normalize
m = 2
expr = tau(1,2)^2
rhs = 0 - 4*o(1)*o(2)

[check.matching]
kind = matching-sum
k = 3
b = 4

[check.yf]
kind = yf
"""


def _scenario(*checks: dict, variety: str = "y18", **limits) -> Scenario:
    return Scenario.model_validate({"name": "test", "variety": variety, "limits": limits, "checks": list(checks)})


class TestScenarioParsing:
    """INI scenario files validated by pydantic."""

    def test_small_scenario(self):
        with start_action(action_type="test_small_scenario"):
            scenario = parse_scenario(SMALL_SCENARIO)
            assert scenario.name == "small"
            assert scenario.format == "json"
            assert scenario.limits.max_seconds == 300
            assert [check.label for check in scenario.checks] == ["model", "normal-form", "matching", "yf"]
            assert scenario.checks[1].rhs == "0 - 4*o(1)*o(2)"
            assert scenario.checks[2].parameters() == {"k": 3, "b": 4}

    def test_echo(self):
        echo = parse_scenario(SMALL_SCENARIO).echo()
        assert echo["variety"] == "y18"
        assert echo["checks"][2] == {"name": "matching", "kind": "matching-sum", "k": 3, "b": 4}

    def test_custom_variety_is_canonicalized(self):
        scenario = parse_scenario("[scenario]\nvariety = Custom( 3, 18, 6 )\n")
        assert scenario.variety == "custom(3,18,6)"
        assert scenario.checks == []

    @pytest.mark.parametrize(
        "text",
        [
            "variety = y18\n",
            "[scenario]\n",
            "[scenario]\nvariety = p3\n",
            "[scenario]\nvariety = y18\n[extras]\nx = 1\n",
            "[scenario]\nvariety = y18\n[check.]\nkind = model\n",
            "[scenario]\nvariety = y18\n[check.a]\nkind = nonsense\n",
            "[scenario]\nvariety = y18\n[check.a]\nkind = model\ncolour = red\n",
            "[scenario]\nvariety = y18\n[check.a]\nkind = injectivity\n",
            "[scenario]\nvariety = y18\n[check.a]\nkind = matching-sum\nk = 2\nb = 3\n",
            "[scenario]\nvariety = y18\n[check.a]\nkind = normalize\nm = 2\nexpr = tau(1,1)\n",
            "[scenario]\nvariety = y18\n[check.a]\nkind = normalize\nm = 2\nexpr = h(1\n",
            "[scenario]\nvariety = y18\n[check.a]\nkind = yf\nlhs = sym2(Y)\n",
            "[scenario]\nvariety = y18\n[check.a]\nkind = mck\nplanted = true\n",
            "[scenario]\nvariety = ab2\n[check.a]\nkind = relations\n",
            "[scenario]\nvariety = custom(3,18,0)\n[check.a]\nkind = lieberman\n",
            "[scenario]\nvariety = z4\n[limits]\nmax_seconds = -1\n",
            "[scenario]\nvariety = y18\n[check.a]\nkind = model\n[check.a]\nkind = mck\n",
        ],
    )
    def test_malformed(self, text):
        with pytest.raises(ScenarioError):
            parse_scenario(text)

    def test_error_names_the_source(self):
        with pytest.raises(ScenarioError) as error:
            parse_scenario("[scenario]\nvariety = p3\n", "bad.ini")
        assert "bad.ini" in str(error.value)

    def test_load_missing_file(self, tmp_path):
        with pytest.raises(ScenarioError):
            load_scenario(tmp_path / "absent.ini")

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "small.ini"
        path.write_text(SMALL_SCENARIO, encoding="utf-8")
        assert load_scenario(path) == parse_scenario(SMALL_SCENARIO)


class TestCheckRegistry:
    """Every check kind resolves to a library operation and a handler."""

    def test_operations_resolve(self):
        for kind, path in CHECK_OPERATIONS.items():
            module_name, _, attribute = path.rpartition(".")
            assert callable(getattr(importlib.import_module(module_name), attribute)), kind

    def test_every_kind_has_a_handler(self):
        assert set(CHECK_HANDLERS) == set(CHECK_OPERATIONS)


class TestRunner:
    """Ordering, isolation and resource guards."""

    @pytest.mark.asyncio
    async def test_runs_in_order(self):
        with start_action(action_type="test_runs_in_order"):
            report = await ScenarioRunner(Settings()).run(parse_scenario(SMALL_SCENARIO))
            assert [check.name for check in report.checks] == ["model", "normal-form", "matching", "yf"]
            assert report.status == "pass"
            assert report.exit_code == 0
            assert report.check("normal-form").values["normal_form"] == "-4*o(1)*o(2)"
            assert report.check("matching").values["is_zero"] is True

    @pytest.mark.asyncio
    async def test_parallel_keeps_scenario_order(self):
        scenario = parse_scenario(SMALL_SCENARIO)
        sequential = await ScenarioRunner(Settings()).run(scenario)
        parallel = await ScenarioRunner(Settings(parallel=True)).run(scenario)
        assert [c.name for c in parallel.checks] == [c.name for c in sequential.checks]
        assert [c.values for c in parallel.checks] == [c.values for c in sequential.checks]

    @pytest.mark.asyncio
    async def test_failure_does_not_stop_later_checks(self):
        scenario = _scenario(
            {"label": "wrong", "kind": "normalize", "m": 2, "expr": "tau(1,2)^2", "rhs": "4*o(1)*o(2)"},
            {"label": "model", "kind": "model"},
        )
        report = await ScenarioRunner(Settings()).run(scenario)
        assert [c.status for c in report.checks] == ["fail", "pass"]
        assert report.check("wrong").values["expected"] == "4*o(1)*o(2)"
        assert report.status == "fail"
        assert report.exit_code == 1

    @pytest.mark.asyncio
    async def test_exception_becomes_fail_result(self, monkeypatch):
        def broken(spec, model, settings):
            raise RuntimeError("handler exploded")

        monkeypatch.setitem(CHECK_HANDLERS, "mck", broken)
        report = await ScenarioRunner(Settings()).run(
            _scenario({"label": "mck", "kind": "mck"}, {"label": "model", "kind": "model"})
        )
        failed = report.check("mck")
        assert failed.status == "fail"
        assert failed.values["error_type"] == "RuntimeError"
        assert "handler exploded" in failed.values["error"]
        assert report.check("model").passed

    @pytest.mark.asyncio
    async def test_resource_limit_is_a_fail_result(self):
        report = await ScenarioRunner(Settings()).run(
            _scenario({"label": "inj", "kind": "injectivity", "m": 3}, {"label": "model", "kind": "model"}, max_injectivity_m=2)
        )
        assert report.check("inj").status == "fail"
        assert report.check("inj").values["error_type"] == "ResourceLimitError"
        assert report.check("model").status == "pass"

    @pytest.mark.asyncio
    async def test_abort_skips_the_rest(self):
        report = await ScenarioRunner(Settings(parallel=True)).run(
            _scenario(
                {"label": "model", "kind": "model"},
                {"label": "inj", "kind": "injectivity", "m": 3},
                {"label": "mck", "kind": "mck"},
                max_injectivity_m=2,
                abort_on_resource_limit=True,
            )
        )
        assert [c.status for c in report.checks] == ["pass", "fail", "skipped"]
        assert "inj" in report.check("mck").values["reason"]
        assert report.status == "fail"

    @pytest.mark.asyncio
    async def test_wall_time_cap(self, monkeypatch):
        def slow(spec, model, settings):
            time.sleep(0.05)
            return {"passed": True}

        monkeypatch.setitem(CHECK_HANDLERS, "model", slow)
        report = await ScenarioRunner(Settings(max_seconds=0.001)).run(_scenario({"label": "model", "kind": "model"}))
        result = report.check("model")
        assert result.status == "fail"
        assert result.values["reason"] == WALL_TIME_EXCEEDED

    def test_scenario_limits_override_settings(self):
        runner = ScenarioRunner(Settings(max_coefficients=10))
        settings = runner.settings_for(_scenario(max_seconds=5))
        assert settings.max_coefficients == 10
        assert settings.max_seconds == 5

    def test_run_sync_and_singleton(self):
        assert get_runner() is get_runner()
        report = ScenarioRunner(Settings()).run_sync(_scenario({"label": "andthis", "kind": "andthis"}))
        assert report.check("andthis").passed


def _report() -> Report:
    return Report(
        version="0.1.0",
        scenario={"name": "demo", "variety": "y18", "checks": []},
        checks=[
            CheckResult(name="model", kind="model", status="pass", values={"betti": [1, 0, 1], "passed": True}, millis=3),
            CheckResult(name="inj", kind="injectivity", status="fail", values={"codim": {"3": {"rank": 5}}}, millis=7),
            CheckResult(name="mck", kind="mck", status="skipped", values={"reason": "aborted"}),
        ],
        millis=12,
    )


class TestRendering:
    """The JSON schema and the text table."""

    def test_jsonable(self):
        value = jsonable({1: Fraction(-1, 4), "pairs": ((1, 2),), "flags": {3, 1}, "ok": True, "none": None})
        assert value == {"1": "-1/4", "pairs": [[1, 2]], "flags": [1, 3], "ok": True, "none": None}

    def test_json_schema(self):
        data = json.loads(to_json(_report()))
        assert set(data) == {"version", "scenario", "status", "millis", "checks"}
        assert data["status"] == "fail"
        assert set(data["checks"][0]) == {"name", "kind", "status", "values", "millis"}
        assert data["checks"][2]["status"] == "skipped"

    def test_skipped_checks_do_not_fail_a_report(self):
        report = Report(
            version="0.1.0",
            scenario={},
            checks=[CheckResult(name="a", kind="model", status="skipped")],
        )
        assert report.status == "pass"

    def test_text_table(self):
        text = to_text(_report())
        assert text.startswith("fano-mck 0.1.0  scenario demo on y18")
        assert "[FAIL] inj" in text
        assert "SKIPPED" in text
        assert "betti: [1, 0, 1]" in text
        assert text.rstrip().endswith("overall: FAIL (12 ms)")

    def test_render_dispatch(self):
        report = _report()
        assert render(report, "json") == to_json(report)
        assert render(report, "text") == to_text(report)


SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"


class TestShippedScenarios:
    """The scenario files under scenarios/."""

    @pytest.mark.parametrize("path", sorted(SCENARIO_DIR.glob("*.ini")), ids=lambda p: p.stem)
    def test_parses(self, path):
        assert load_scenario(path).checks

    @pytest.mark.asyncio
    async def test_planted_impurity_fails(self):
        report = await ScenarioRunner(Settings()).run(load_scenario(SCENARIO_DIR / "planted_impurity.ini"))
        assert [c.status for c in report.checks] == ["pass", "fail", "pass"]
        assert report.exit_code == 1

    @pytest.mark.asyncio
    async def test_custom_motive_mutation_fails(self):
        report = await ScenarioRunner(Settings()).run(load_scenario(SCENARIO_DIR / "custom_motive.ini"))
        assert report.check("square").passed
        assert report.check("wrong-twist").status == "fail"

    @pytest.mark.asyncio
    async def test_acceptance_y18(self):
        with start_action(action_type="test_acceptance_y18") as action:
            report = await ScenarioRunner(Settings(max_seconds=600)).run(load_scenario(SCENARIO_DIR / "acceptance_y18.ini"))
            action.log(message_type="acceptance_statuses", statuses={c.name: c.status for c in report.checks})
            assert report.status == "pass", [c.name for c in report.checks if not c.passed]
            assert report.check("injectivity-3").values["total_dimension"] == 512
            assert report.check("matching-sum-6").values["is_zero"] is True
            assert report.check("triangle").values["normal_form"] == "-4*o(1)*o(2)*o(3)"
