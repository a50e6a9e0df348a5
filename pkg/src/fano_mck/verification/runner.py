"""Scenario runner: executes checks in order (or concurrently), isolating failures."""

import asyncio
import time
from typing import Optional

from eliot import start_action

from fano_mck import __version__
from fano_mck.algebra.cohomology import VarietyModel, model_from_spec
from fano_mck.errors import ResourceLimitError
from fano_mck.verification.checks import run_check
from fano_mck.verification.items import CheckResult, Report, jsonable
from fano_mck.verification.scenario import CheckSpec, Scenario
from fano_mck.verification.settings import Settings, load_settings

WALL_TIME_EXCEEDED = "wall-time cap exceeded"


class ScenarioRunner:
    """Runs scenarios against the exact algebra; one failing check never aborts the others."""

    def __init__(self, settings: Optional[Settings] = None) -> None:
        self.settings = settings or load_settings()

    def settings_for(self, scenario: Scenario) -> Settings:
        return self.settings.merged(scenario.limits.model_dump())

    def execute(self, spec: CheckSpec, model: VarietyModel, settings: Settings) -> CheckResult:
        """Run one check synchronously; exceptions become fail results."""
        with start_action(action_type="runner_check", name=spec.label, kind=spec.kind) as action:
            started = time.perf_counter()
            try:
                values = jsonable(run_check(spec, model, settings))
                status = "pass" if values.get("passed") else "fail"
            except ResourceLimitError as e:
                if settings.abort_on_resource_limit:
                    raise
                values = {"error": str(e), "error_type": type(e).__name__, "passed": False}
                status = "fail"
            except Exception as e:
                values = {"error": str(e), "error_type": type(e).__name__, "passed": False}
                status = "fail"
            millis = int((time.perf_counter() - started) * 1000)
            if millis > settings.max_seconds * 1000:
                values = {**values, "reason": WALL_TIME_EXCEEDED, "passed": False}
                status = "fail"
            action.add_success_fields(status=status, millis=millis)
            return CheckResult(name=spec.label, kind=spec.kind, status=status, values=values, millis=millis)

    async def run(self, scenario: Scenario) -> Report:
        """Run every check of a scenario; the report lists results in scenario order."""
        settings = self.settings_for(scenario)
        with start_action(
            action_type="runner_run", scenario=scenario.name, variety=scenario.variety, parallel=settings.parallel
        ) as action:
            started = time.perf_counter()
            model = model_from_spec(scenario.variety)
            if settings.parallel and not settings.abort_on_resource_limit:
                results = list(
                    await asyncio.gather(
                        *(asyncio.to_thread(self.execute, spec, model, settings) for spec in scenario.checks)
                    )
                )
            else:
                results = await self._run_sequential(scenario.checks, model, settings)
            report = Report(
                version=__version__,
                scenario=scenario.echo(),
                checks=results,
                millis=int((time.perf_counter() - started) * 1000),
            )
            action.add_success_fields(status=report.status)
            return report

    async def _run_sequential(self, checks: list[CheckSpec], model: VarietyModel, settings: Settings) -> list[CheckResult]:
        results: list[CheckResult] = []
        for position, spec in enumerate(checks):
            try:
                results.append(await asyncio.to_thread(self.execute, spec, model, settings))
            except ResourceLimitError as e:
                results.append(
                    CheckResult(
                        name=spec.label,
                        kind=spec.kind,
                        status="fail",
                        values={"error": str(e), "error_type": type(e).__name__, "passed": False},
                    )
                )
                for rest in checks[position + 1:]:
                    results.append(
                        CheckResult(
                            name=rest.label,
                            kind=rest.kind,
                            status="skipped",
                            values={"reason": f"aborted after resource limit in {spec.label}"},
                        )
                    )
                break
        return results

    def run_sync(self, scenario: Scenario) -> Report:
        return asyncio.run(self.run(scenario))


_runner: Optional[ScenarioRunner] = None


def get_runner() -> ScenarioRunner:
    """Get the singleton ScenarioRunner instance."""
    global _runner
    if _runner is None:
        _runner = ScenarioRunner()
    return _runner
