from .settings import Settings, load_settings
from .items import CheckResult, Report
from .scenario import CheckSpec, Limits, Scenario, load_scenario, parse_scenario
from .checks import CHECK_HANDLERS, run_check
from .runner import ScenarioRunner, get_runner
from .render import render, to_json, to_text
