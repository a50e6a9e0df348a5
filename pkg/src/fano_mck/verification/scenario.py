"""Scenario files: INI sections read with configparser, validated by pydantic.

    [scenario]
    name = acceptance-y18
    variety = y18
    format = json

    [limits]
    max_seconds = 60

    [check.injectivity-3]
    kind = injectivity
    m = 3
"""

import configparser
from pathlib import Path
from typing import Any, Literal, Optional, Union

from eliot import start_action
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from fano_mck.datatypes import (
    NEEDS_ODD_PART,
    NEEDS_TATE_ODD,
    CheckKind,
    OutputFormat,
    VarietySpec,
    parse_variety,
)
from fano_mck.dsl import check_tautological, parse
from fano_mck.errors import FanoMckError, ScenarioError

PurityConventionIn = Literal["weight", "kunneth"]

MOTIVE_KINDS: frozenset[CheckKind] = frozenset({"yf", "zf", "andthis", "sym-square-split", "middle-iso"})
CHECK_SECTION_PREFIX = "check."


class CheckSpec(BaseModel):
    """One [check.<label>] section."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    label: str
    kind: CheckKind
    m: Optional[int] = Field(default=None, ge=1)
    k: Optional[int] = Field(default=None, ge=1)
    b: Optional[int] = Field(default=None, ge=2)
    expr: Optional[str] = None
    total: Optional[int] = Field(default=None, ge=0)
    lhs: Optional[str] = None
    rhs: Optional[str] = None
    convention: Optional[PurityConventionIn] = None
    against: Optional[VarietySpec] = None
    planted: bool = False

    def parameters(self) -> dict[str, Any]:
        """The parameters actually set, for echoing into reports."""
        return self.model_dump(exclude={"label", "kind"}, exclude_defaults=True)


class Limits(BaseModel):
    model_config = ConfigDict(extra="forbid")

    max_coefficients: Optional[int] = Field(default=None, ge=1)
    max_seconds: Optional[float] = Field(default=None, gt=0)
    max_injectivity_m: Optional[int] = Field(default=None, ge=1)
    parallel: Optional[bool] = None
    abort_on_resource_limit: Optional[bool] = None


class Scenario(BaseModel):
    """An ordered list of checks against one variety."""

    name: str = "scenario"
    variety: VarietySpec
    format: OutputFormat = "text"
    limits: Limits = Field(default_factory=Limits)
    checks: list[CheckSpec] = Field(default_factory=list)

    @model_validator(mode="after")
    def _checks_fit_variety(self) -> "Scenario":
        labels = [check.label for check in self.checks]
        if len(set(labels)) != len(labels):
            raise ValueError("check labels must be unique")
        for check in self.checks:
            problem = check_problem(check, self.variety)
            if problem:
                raise ValueError(f"check {check.label!r} ({check.kind}): {problem}")
        return self

    def echo(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "variety": self.variety,
            "checks": [{"name": check.label, "kind": check.kind, **check.parameters()} for check in self.checks],
        }


def check_problem(check: CheckSpec, variety: str) -> Optional[str]:
    """Why ``check`` cannot run on ``variety``, or None when it can."""
    kind, _, _, b = parse_variety(variety)
    if check.kind in NEEDS_TATE_ODD and kind != "tate-odd":
        return "needs a tate-odd variety"
    if check.kind in NEEDS_ODD_PART and b == 0:
        return "needs a variety with a nonzero odd part"
    if check.kind in ("pure-degree", "abel-jacobi") and b != 4:
        return "the abelian surface model pairs with an odd part of rank 4"
    if check.kind == "injectivity" and check.m is None:
        return "needs m"
    if check.kind == "matching-sum":
        if check.k is None:
            return "needs k"
        odd_rank = check.b or b or 4
        if odd_rank % 2:
            return f"odd rank must be even, got {odd_rank}"
    if check.kind == "normalize":
        if check.m is None or not check.expr:
            return "needs m and expr"
        if check.lhs:
            return "lhs does not apply to normalize"
        return _expression_problem(check)
    if (check.lhs or check.rhs) and check.kind not in MOTIVE_KINDS:
        return "lhs and rhs apply to motive checks (rhs also to normalize)"
    if check.kind in MOTIVE_KINDS and bool(check.lhs) != bool(check.rhs):
        return "give both lhs and rhs or neither"
    if check.convention and check.kind != "pure-degree":
        return "convention applies to pure-degree only"
    if check.planted and check.kind != "pure-degree":
        return "planted applies to pure-degree only"
    return None


def _expression_problem(check: CheckSpec) -> Optional[str]:
    for text in (check.expr, check.rhs):
        if not text:
            continue
        try:
            check_tautological(parse(text), check.m)
        except FanoMckError as e:
            return str(e)
    return None


def _check_spec(section: str, fields: dict[str, str]) -> dict[str, Any]:
    label = section[len(CHECK_SECTION_PREFIX):].strip()
    if not label:
        raise ScenarioError(f"[{section}] needs a label after '{CHECK_SECTION_PREFIX}'")
    return {"label": label, **fields}


def parse_scenario(text: str, source: Union[str, Path] = "<string>") -> Scenario:
    """Parse scenario text; every problem surfaces as ScenarioError naming the source."""
    parser = configparser.ConfigParser(interpolation=None)
    with start_action(action_type="scenario_parse", source=str(source)) as action:
        try:
            parser.read_string(text, source=str(source))
        except configparser.Error as e:
            raise ScenarioError(f"{source}: {e}") from e
        if not parser.has_section("scenario"):
            raise ScenarioError(f"{source}: missing [scenario] section")
        checks = []
        for section in parser.sections():
            if section.startswith(CHECK_SECTION_PREFIX):
                checks.append(_check_spec(section, dict(parser[section])))
            elif section not in ("scenario", "limits"):
                raise ScenarioError(f"{source}: unknown section [{section}]")
        data: dict[str, Any] = {**dict(parser["scenario"]), "checks": checks}
        if parser.has_section("limits"):
            data["limits"] = dict(parser["limits"])
        try:
            scenario = Scenario.model_validate(data)
        except ValidationError as e:
            raise ScenarioError(f"{source}: {e}") from e
        action.add_success_fields(name=scenario.name, checks=len(scenario.checks))
        return scenario


def load_scenario(path: Union[str, Path]) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioError(f"cannot read scenario {path}: {e}") from e
    return parse_scenario(text, path)
