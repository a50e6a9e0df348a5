"""Report records: one CheckResult per scenario check, wrapped in a Report."""

from fractions import Fraction
from typing import Any, Optional

from pydantic import BaseModel, Field, computed_field

from fano_mck.datatypes import CheckKind, CheckStatus


def jsonable(value: Any) -> Any:
    """Rationals become "p/q" strings, tuples and sets become lists; keys become strings."""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, dict):
        return {str(key): jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(item) for item in value]
    if isinstance(value, (set, frozenset)):
        return sorted(jsonable(item) for item in value)
    return value


class CheckResult(BaseModel):
    """Outcome of a single check."""

    name: str
    kind: CheckKind
    status: CheckStatus
    values: dict[str, Any] = Field(default_factory=dict)
    millis: int = 0

    @property
    def passed(self) -> bool:
        return self.status == "pass"


class Report(BaseModel):
    version: str
    scenario: dict[str, Any]
    checks: list[CheckResult] = Field(default_factory=list)
    millis: int = 0

    @computed_field
    @property
    def status(self) -> CheckStatus:
        """pass iff every non-skipped check passed."""
        return "fail" if any(check.status == "fail" for check in self.checks) else "pass"

    @property
    def exit_code(self) -> int:
        return 1 if self.status == "fail" else 0

    def check(self, name: str) -> Optional[CheckResult]:
        return next((check for check in self.checks if check.name == name), None)
