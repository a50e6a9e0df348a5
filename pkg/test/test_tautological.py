#!/usr/bin/env python3
"""
Tests for the tautological ring: bootstrapped relations, normal forms, monomial
bases, realization in cohomology, injectivity and matching sums.
"""

import pytest
from eliot import start_action
from hypothesis import given
from hypothesis import strategies as st

from fano_mck.algebra.cohomology import cup, make_model, model_from_spec
from fano_mck.algebra.tautological import (
    NormalMonomial,
    TautExpr,
    basis,
    bootstrap_relations,
    evaluate,
    evaluate_expr,
    evaluate_normal_form,
    format_normal_form,
    generator_class,
    injectivity_report,
    matching_sum,
    matching_sum_bruteforce,
    normal_form_to_expr,
    normalize,
    partial_matchings,
    perfect_matchings,
    relation_table,
    relations_report,
)
from fano_mck.dsl import parse_taut
from fano_mck.errors import FactorIndexError, ModelError, RelationBootstrapError, ResourceLimitError


@pytest.fixture(scope="module")
def y18():
    return model_from_spec("y18")


@pytest.fixture(scope="module")
def rt(y18):
    return bootstrap_relations(y18)


def nf(text: str, m: int, rt) -> str:
    return format_normal_form(normalize(parse_taut(text, m), rt))


class TestRelations:
    """Relation scalars derived from the model."""

    def test_bootstrap_on_y18(self, rt):
        with start_action(action_type="test_bootstrap_on_y18"):
            assert rt.c_sq == -4
            assert rt.c_tri == 1
            assert rt.degree == 18
            assert not rt.tau_free

    def test_bootstrap_on_z4(self):
        table = bootstrap_relations(model_from_spec("z4"))
        assert abs(table.c_sq) == 4
        assert table.degree == 4

    def test_relations_report(self, y18):
        with start_action(action_type="test_relations_report") as action:
            values = relations_report(y18)
            action.log(message_type="relations_report", **values)
            assert values["c_sq"] == "-4"
            assert values["c_sq_abs_matches_stated"]
            assert not values["sign_matches_stated"]
            assert values["c_tri_abs_one"]
            assert values["h_power_n_equals_d_o"]
            assert values["tau_squared"] and values["tau_triple"]
            assert values["passed"]

    def test_bootstrap_rejects_models_without_tau(self):
        with pytest.raises(RelationBootstrapError):
            bootstrap_relations(model_from_spec("custom(2,5,0)"))
        with pytest.raises(RelationBootstrapError):
            bootstrap_relations(model_from_spec("ab2"))
        with pytest.raises(ModelError):
            relation_table(model_from_spec("ab2"))

    def test_tau_free_table(self):
        table = relation_table(model_from_spec("custom(3,18,0)"))
        assert table.tau_free
        assert normalize(parse_taut("tau(1,2)", 2), table) == {}


class TestNormalForms:
    """Rewriting examples."""

    def test_examples(self, rt):
        with start_action(action_type="test_normal_form_examples"):
            assert nf("h(1)^3", 1, rt) == "18*o(1)"
            assert nf("h(1)^3 - 18*o(1)", 1, rt) == "0"
            assert nf("tau(1,2)*h(1)", 2, rt) == "0"
            assert nf("tau(1,2)*o(2)", 2, rt) == "0"
            assert nf("tau(1,2)^2", 2, rt) == "-4*o(1)*o(2)"
            assert nf("tau(1,2)*tau(1,3)", 3, rt) == "tau(2,3)*o(1)"
            assert nf("o(1)^2 + h(1)*o(1)", 1, rt) == "0"
            assert nf("h(1)^4", 1, rt) == "0"

    def test_three_taus_on_a_triangle(self, rt):
        # tau12 tau13 tau23 = c_tri tau23^2 o1 = c_tri c_sq o1 o2 o3
        assert nf("tau(1,2)*tau(1,3)*tau(2,3)", 3, rt) == "-4*o(1)*o(2)*o(3)"

    def test_taut_expr_validation(self):
        with pytest.raises(FactorIndexError):
            TautExpr.generator(2, "h", 3)
        with pytest.raises(FactorIndexError):
            TautExpr.generator(2, "tau", 1, 1)
        assert TautExpr.generator(3, "tau", 3, 1) == TautExpr.generator(3, "tau", 1, 3)

    def test_normal_monomial_invariants(self):
        with pytest.raises(ValueError):
            NormalMonomial(m=2, n=3, matching=((1, 2),), local=(1, 0))
        with pytest.raises(ValueError):
            NormalMonomial(m=3, n=3, matching=((1, 2), (2, 3)), local=(0, 0, 0))
        monomial = NormalMonomial(m=3, n=3, matching=((1, 3),), local=(0, 2, 0))
        assert monomial.codim == 5
        assert monomial.pretty() == "tau(1,3)*h(2)^2"


class TestBasis:
    """Monomial bases."""

    def test_counts(self, rt):
        assert [monomial.pretty() for monomial in basis(1, 3, rt)] == ["o(1)"]
        assert len(basis(2, 3, rt)) == 5
        assert [monomial.pretty() for monomial in basis(2, 6, rt)] == ["o(1)*o(2)"]
        assert {monomial.pretty() for monomial in basis(2, 3, rt)} == {
            "o(1)", "o(2)", "h(1)^2*h(2)", "h(1)*h(2)^2", "tau(1,2)"
        }

    def test_partial_matchings(self):
        assert len(partial_matchings(4)) == 10
        assert partial_matchings(2) == [(), ((1, 2),)]

    def test_bad_codimension(self, rt):
        with pytest.raises(FactorIndexError):
            basis(2, 7, rt)


class TestRealization:
    """Evaluation of normal monomials in H*(Y^m)."""

    def test_evaluate_point(self, y18):
        o1 = NormalMonomial(m=1, n=3, local=(3,))
        assert evaluate(o1, y18) == y18.o()

    def test_tau_squared_realizes_c_sq(self, y18, rt):
        tau = generator_class(y18, 2, ("tau", 1, 2))
        o_o = cup(generator_class(y18, 2, ("o", 1)), generator_class(y18, 2, ("o", 2)))
        assert cup(tau, tau) == o_o * rt.c_sq

    def test_injectivity_m1_m2(self, y18):
        with start_action(action_type="test_injectivity_m1_m2") as action:
            first = injectivity_report(1, y18)
            assert [first["codims"][str(c)]["count"] for c in range(4)] == [1, 1, 1, 1]
            assert first["passed"]
            second = injectivity_report(2, y18)
            action.log(message_type="injectivity_m2", codims=second["codims"])
            assert second["codims"]["3"] == {"count": 5, "rank": 5, "ambient": 20}
            assert second["total_dimension"] == 64
            assert second["passed"]

    def test_injectivity_m3(self, y18):
        report = injectivity_report(3, y18)
        assert report["total_dimension"] == 512
        assert report["passed"]

    def test_injectivity_on_curve(self):
        assert injectivity_report(2, model_from_spec("curve2"))["passed"]

    def test_injectivity_guards(self, y18):
        with pytest.raises(ResourceLimitError):
            injectivity_report(3, y18, max_m=2)
        with pytest.raises(ResourceLimitError):
            injectivity_report(2, y18, max_coefficients=10)


class TestMatchingSum:
    """Sum over perfect matchings of products of tau classes."""

    def test_perfect_matching_counts(self):
        assert sum(1 for _ in perfect_matchings(tuple(range(12)))) == 10395
        assert list(perfect_matchings((1, 2))) == [((1, 2),)]

    @pytest.mark.parametrize("k,zero", [(1, False), (2, False), (3, True), (4, True)])
    def test_vanishing_follows_exterior_power(self, k, zero):
        with start_action(action_type="test_matching_sum", k=k):
            result = matching_sum(k, 4)
            assert result.is_zero is zero
            assert result.exterior_bound_zero is zero
            assert result.values()["exterior_bound_holds"]
            assert result.values()["first_vanishing_k"] == 3

    def test_matching_sum_twelve_slots(self):
        result = matching_sum(6, 4)
        assert result.matchings == 10395
        assert result.multiplicity == 2**6 * 720
        assert result.coefficient_space == 4**12
        assert result.is_zero
        assert result.values()["verdict"] == "zero"

    def test_single_matching_is_tau(self):
        result = matching_sum(1, 2)
        assert not result.is_zero
        assert result.summed == generator_class(make_model("tate-odd", 3, 1, 2), 2, ("tau", 1, 2))
        assert result.permutation_sum == result.summed * 2

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_bruteforce_agrees(self, k):
        assert matching_sum_bruteforce(k, 4) == matching_sum(k, 4).summed

    def test_guards(self):
        with pytest.raises(ResourceLimitError):
            matching_sum(6, 6, max_coefficients=10**6)
        with pytest.raises(ModelError):
            matching_sum(2, 3)


def _relabel(e: TautExpr, permutation: list[int]) -> TautExpr:
    terms = {}
    for monomial, value in e.terms.items():
        moved = tuple((g[0], *(permutation[i - 1] for i in g[1:])) for g in monomial)
        moved = tuple(("tau", *sorted(g[1:])) if g[0] == "tau" else g for g in moved)
        terms[moved] = value
    return TautExpr(e.m, terms)


@st.composite
def generators(draw, m: int):
    kind = draw(st.sampled_from(["h", "o", "tau"] if m > 1 else ["h", "o"]))
    if kind == "tau":
        i, j = draw(st.lists(st.integers(min_value=1, max_value=m), min_size=2, max_size=2, unique=True))
        return TautExpr.generator(m, "tau", i, j)
    return TautExpr.generator(m, kind, draw(st.integers(min_value=1, max_value=m)))


@st.composite
def expressions(draw, m: int, max_factors: int = 4, max_terms: int = 3):
    total = TautExpr(m)
    for _ in range(draw(st.integers(min_value=1, max_value=max_terms))):
        term = TautExpr.constant(m, draw(st.integers(min_value=-3, max_value=3)))
        for _ in range(draw(st.integers(min_value=0, max_value=max_factors))):
            term = term * draw(generators(m))
        total = total + term
    return total


class TestRewritingProperties:
    """Confluence, homomorphism and relabeling properties of the rewrite system."""

    @given(st.data())
    def test_confluence_in_any_association_order(self, data):
        rt = bootstrap_relations(model_from_spec("y18"))
        m = data.draw(st.integers(min_value=1, max_value=4))
        factors = data.draw(st.lists(generators(m), min_size=1, max_size=6))
        order = data.draw(st.permutations(range(len(factors))))
        left = TautExpr.constant(m)
        for factor in factors:
            left = left * factor
        right = TautExpr.constant(m)
        for index in order:
            right = normal_form_to_expr(normalize(right * factors[index], rt), m)
        assert normalize(left, rt) == normalize(right, rt)

    @given(st.data())
    def test_normal_form_is_idempotent(self, data):
        rt = bootstrap_relations(model_from_spec("y18"))
        m = data.draw(st.integers(min_value=1, max_value=4))
        e = data.draw(expressions(m))
        form = normalize(e, rt)
        assert normalize(normal_form_to_expr(form, m), rt) == form

    @given(st.data())
    def test_realization_is_a_ring_homomorphism(self, data):
        model = model_from_spec("y18")
        rt = bootstrap_relations(model)
        m = data.draw(st.integers(min_value=1, max_value=3))
        e = data.draw(expressions(m, max_factors=3, max_terms=2))
        f = data.draw(expressions(m, max_factors=2, max_terms=2))
        assert evaluate_normal_form(normalize(e * f, rt), model, m) == cup(evaluate_expr(e, model), evaluate_expr(f, model))

    @given(st.data())
    def test_relabeling_invariance(self, data):
        rt = bootstrap_relations(model_from_spec("y18"))
        m = data.draw(st.integers(min_value=2, max_value=4))
        permutation = data.draw(st.permutations(list(range(1, m + 1))))
        e = data.draw(expressions(m))
        relabeled_then_normalized = normalize(_relabel(e, permutation), rt)
        normalized_then_relabeled = normalize(_relabel(normal_form_to_expr(normalize(e, rt), m), permutation), rt)
        assert relabeled_then_normalized == normalized_then_relabeled
        assert (not relabeled_then_normalized) == (not normalize(e, rt))

    @given(st.permutations([1, 2, 3, 4]))
    def test_odd_basis_order_invariance(self, order):
        model = make_model("tate-odd", 3, 18, 4, tuple(order), "y18-reordered")
        table = bootstrap_relations(model)
        assert table.c_sq == -4
        assert table.c_tri == 1
        assert injectivity_report(2, model)["passed"]
