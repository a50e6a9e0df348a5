"""Check registry: each check kind dispatches to one library operation and returns its values.

Every handler returns a values dict carrying a boolean ``passed``.
"""

from typing import Any, Callable

from fano_mck.algebra import motives
from fano_mck.algebra.cohomology import VarietyModel, compare_betti, model_from_spec, model_integrity
from fano_mck.algebra.correspondences import (
    canonical_p,
    check_abel_jacobi,
    check_lieberman,
    check_mck,
    check_pure_degree,
    ck_projectors,
    delta_h_decomposition,
    planted_impurity,
    projectors_report,
)
from fano_mck.algebra.tautological import (
    bootstrap_relations,
    format_normal_form,
    injectivity_report,
    matching_sum,
    normalize,
    relation_table,
    relations_report,
)
from fano_mck.datatypes import CheckKind
from fano_mck.dsl import parse_taut
from fano_mck.verification.scenario import CheckSpec
from fano_mck.verification.settings import Settings

CheckHandler = Callable[[CheckSpec, VarietyModel, Settings], dict[str, Any]]

CHECK_HANDLERS: dict[CheckKind, CheckHandler] = {}

ABELIAN_SURFACE = "ab2"
DEFAULT_PURITY_TOTAL = 6


def check(kind: CheckKind) -> Callable[[CheckHandler], CheckHandler]:
    def register(handler: CheckHandler) -> CheckHandler:
        CHECK_HANDLERS[kind] = handler
        return handler
    return register


@check("model")
def _model(spec: CheckSpec, model: VarietyModel, settings: Settings) -> dict[str, Any]:
    values = model_integrity(model)
    betti = values["betti"]
    values["palindromic"] = betti == betti[::-1]
    values["passed"] = values["poincare_nondegenerate"] and values["palindromic"]
    return values


@check("projectors")
def _projectors(spec: CheckSpec, model: VarietyModel, settings: Settings) -> dict[str, Any]:
    return projectors_report(model)


@check("mck")
def _mck(spec: CheckSpec, model: VarietyModel, settings: Settings) -> dict[str, Any]:
    return check_mck(model)


@check("lieberman")
def _lieberman(spec: CheckSpec, model: VarietyModel, settings: Settings) -> dict[str, Any]:
    return check_lieberman(model, bootstrap_relations(model).c_tri)


@check("relations")
def _relations(spec: CheckSpec, model: VarietyModel, settings: Settings) -> dict[str, Any]:
    return relations_report(model)


@check("injectivity")
def _injectivity(spec: CheckSpec, model: VarietyModel, settings: Settings) -> dict[str, Any]:
    return injectivity_report(spec.m, model, settings.max_injectivity_m, settings.max_coefficients)


@check("matching-sum")
def _matching_sum(spec: CheckSpec, model: VarietyModel, settings: Settings) -> dict[str, Any]:
    values = matching_sum(spec.k, spec.b or model.odd_rank or 4, settings.max_coefficients).values()
    values["passed"] = values["exterior_bound_holds"]
    return values


@check("delta-h")
def _delta_h(spec: CheckSpec, model: VarietyModel, settings: Settings) -> dict[str, Any]:
    return delta_h_decomposition(model)


@check("pure-degree")
def _pure_degree(spec: CheckSpec, model: VarietyModel, settings: Settings) -> dict[str, Any]:
    surface = model_from_spec(ABELIAN_SURFACE)
    p = canonical_p(surface, model)
    if spec.planted:
        p = p + planted_impurity(surface, model)
    total = spec.total if spec.total is not None else DEFAULT_PURITY_TOTAL
    values = check_pure_degree(p, ck_projectors(surface), ck_projectors(model), total, spec.convention or "weight")
    values["planted"] = spec.planted
    return values


@check("abel-jacobi")
def _abel_jacobi(spec: CheckSpec, model: VarietyModel, settings: Settings) -> dict[str, Any]:
    return check_abel_jacobi(model_from_spec(ABELIAN_SURFACE), model)


@check("betti-zy")
def _betti_zy(spec: CheckSpec, model: VarietyModel, settings: Settings) -> dict[str, Any]:
    values = compare_betti(model, model_from_spec(spec.against or "z4"))
    values["passed"] = values["equal"]
    return values


def _motive(default: Callable[[], dict[str, Any]]) -> CheckHandler:
    def handler(spec: CheckSpec, model: VarietyModel, settings: Settings) -> dict[str, Any]:
        if spec.lhs and spec.rhs:
            return motives.verify_expressions(spec.lhs, spec.rhs)
        return default()
    return handler


for _kind, _default in (
    ("yf", motives.verify_yf),
    ("zf", motives.verify_zf),
    ("andthis", motives.verify_abelian_surface),
    ("sym-square-split", motives.verify_symmetric_square_split),
    ("middle-iso", motives.verify_middle_isomorphism),
):
    check(_kind)(_motive(_default))


@check("normalize")
def _normalize(spec: CheckSpec, model: VarietyModel, settings: Settings) -> dict[str, Any]:
    rt = relation_table(model)
    form = normalize(parse_taut(spec.expr, spec.m, rt.dimension), rt)
    values: dict[str, Any] = {
        "m": spec.m,
        "expr": spec.expr,
        "normal_form": format_normal_form(form),
        "terms": len(form),
    }
    if spec.rhs:
        expected = normalize(parse_taut(spec.rhs, spec.m, rt.dimension), rt)
        values["expected"] = format_normal_form(expected)
        values["passed"] = form == expected
    else:
        values["passed"] = True
    return values


def run_check(spec: CheckSpec, model: VarietyModel, settings: Settings) -> dict[str, Any]:
    return CHECK_HANDLERS[spec.kind](spec, model, settings)
