"""Text tables and the JSON report schema.

JSON schema (stable): {version, scenario, status, millis, checks: [{name, kind, status, values, millis}]}.
Rationals inside values are "p/q" strings.
"""

import json
from typing import Any

from fano_mck.datatypes import OutputFormat
from fano_mck.verification.items import Report, jsonable


def to_json(report: Report) -> str:
    return json.dumps(report.model_dump(mode="json"), indent=2, sort_keys=False, ensure_ascii=False)


def _lines(value: Any, indent: int) -> list[str]:
    pad = "  " * indent
    if isinstance(value, dict):
        lines = []
        for key, item in value.items():
            if isinstance(item, (dict, list)) and item and not _flat(item):
                lines.append(f"{pad}{key}:")
                lines.extend(_lines(item, indent + 1))
            else:
                lines.append(f"{pad}{key}: {_scalar(item)}")
        return lines
    if isinstance(value, list):
        return [line for item in value for line in _lines(item, indent)] if not _flat(value) else [pad + _scalar(value)]
    return [pad + _scalar(value)]


def _flat(value: Any) -> bool:
    items = value.values() if isinstance(value, dict) else value
    return all(not isinstance(item, dict) for item in items) and all(
        not isinstance(item, list) or _flat(item) for item in items
    )


def _scalar(value: Any) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if value is None:
        return "-"
    if isinstance(value, (list, dict)):
        return json.dumps(jsonable(value), ensure_ascii=False)
    return str(value)


def to_text(report: Report) -> str:
    scenario = report.scenario
    header = f"fano-mck {report.version}  scenario {scenario.get('name', '?')} on {scenario.get('variety', '?')}"
    width = max([len(check.name) for check in report.checks] + [5])
    lines = [header, "", f"{'check':<{width}}  {'kind':<12}  {'status':<7}  {'ms':>7}"]
    lines.append("-" * len(lines[-1]))
    for check in report.checks:
        lines.append(f"{check.name:<{width}}  {check.kind:<12}  {check.status.upper():<7}  {check.millis:>7}")
    for check in report.checks:
        lines += ["", f"[{check.status.upper()}] {check.name}"]
        lines += _lines({key: value for key, value in check.values.items() if key != "passed"}, 1)
    lines += ["", f"overall: {report.status.upper()} ({report.millis} ms)"]
    return "\n".join(lines) + "\n"


def render(report: Report, output_format: OutputFormat = "text") -> str:
    return to_json(report) if output_format == "json" else to_text(report)
