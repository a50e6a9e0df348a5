"""Turn cycle ASTs into tautological expressions or cohomology classes."""

from typing import Optional

from fano_mck.algebra.cohomology import GradedClass, VarietyModel, cup, cup_power, power_model
from fano_mck.algebra.correspondences import ck_projectors, diagonal, small_diagonal
from fano_mck.algebra.tautological import TautExpr, generator_class
from fano_mck.dsl.parser import CycleAst, Generator, Number, Power, generators, parse, validate
from fano_mck.errors import CycleValidationError

TAUTOLOGICAL_NAMES = frozenset({"h", "o", "tau"})


def check_tautological(node: CycleAst, m: int) -> CycleAst:
    """Validate indices against m and reject generators outside h, o, tau."""
    validate(node, m)
    for generator in generators(node):
        if generator.name not in TAUTOLOGICAL_NAMES:
            raise CycleValidationError(f"{generator.name} is not a tautological generator")
    return node


def to_taut_expr(node: CycleAst, m: int, dimension: Optional[int] = None) -> TautExpr:
    """Expression in h, o, tau on X^m; other generators are rejected.

    With ``dimension`` known, powers drop monomials of more than dimension * m factors, which vanish.
    """
    check_tautological(node, m)
    max_length = None if dimension is None else dimension * m
    return _taut(node, m, max_length)


def _taut(node: CycleAst, m: int, max_length: Optional[int]) -> TautExpr:
    if isinstance(node, Number):
        return TautExpr.constant(m, node.value)
    if isinstance(node, Generator):
        return TautExpr.generator(m, node.name, *node.indices)
    if isinstance(node, Power):
        return _taut(node.base, m, max_length).power(node.exponent, max_length)
    left, right = _taut(node.left, m, max_length), _taut(node.right, m, max_length)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    return (left * right).truncated(max_length)


def parse_taut(text: str, m: int, dimension: Optional[int] = None) -> TautExpr:
    return to_taut_expr(parse(text), m, dimension)


def to_class(node: CycleAst, model: VarietyModel, m: int) -> GradedClass:
    """Realize any cycle expression as a class on the m-fold power of the model."""
    validate(node, m, max_weight=model.top_degree)
    return _class(node, model, m)


def _class(node: CycleAst, model: VarietyModel, m: int) -> GradedClass:
    space = power_model(model, m)
    if isinstance(node, Number):
        return space.unit() * node.value
    if isinstance(node, Generator):
        return _generator(node, model, m)
    if isinstance(node, Power):
        return cup_power(_class(node.base, model, m), node.exponent)
    left, right = _class(node.left, model, m), _class(node.right, model, m)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    return cup(left, right)


def _generator(node: Generator, model: VarietyModel, m: int) -> GradedClass:
    if node.name in TAUTOLOGICAL_NAMES:
        if model.kind != "tate-odd":
            raise CycleValidationError(f"{node.name} needs a tate-odd model")
        indices = tuple(sorted(node.indices)) if node.name == "tau" else node.indices
        return generator_class(model, m, (node.name, *indices))
    if node.name == "delta":
        return diagonal(model).cls
    if node.name == "delta_sm":
        return small_diagonal(model)
    weight = node.indices[0]
    return ck_projectors(model).get(weight).cls


def parse_class(text: str, model: VarietyModel, m: int) -> GradedClass:
    return to_class(parse(text), model, m)
