"""Tautological ring of X^m: generators h(i), o(i), tau(i,j), normal forms, realization in cohomology.

Relations (scalars bootstrapped from the model):
    o_i^2 = 0, h_i o_i = 0, h_i^n = d o_i
    tau_ij h_i = tau_ij o_i = 0
    tau_ij^2 = c_sq o_i o_j
    tau_ij tau_ik = c_tri tau_jk o_i
"""

from fractions import Fraction
from functools import lru_cache
from itertools import product as cartesian
from math import comb, factorial, prod
from typing import Any, Iterator, Optional, Sequence, Union

from eliot import start_action
from pydantic import BaseModel, ConfigDict, Field, model_validator

from fano_mck.algebra.cohomology import (
    GradedClass,
    VarietyModel,
    cup,
    kunneth_dimension,
    make_model,
    power_model,
    pullback,
    tensor,
)
from fano_mck.algebra.correspondences import tau
from fano_mck.algebra.linalg import Scalar, SparseMatrix, format_rational, rank
from fano_mck.errors import FactorIndexError, ModelError, ModelMismatchError, RelationBootstrapError, ResourceLimitError

Generator = tuple  # ("h", i) | ("o", i) | ("tau", i, j)
Monomial = tuple[Generator, ...]

DEFAULT_MAX_COEFFICIENTS = 10**8


class TautExpr:
    """Formal linear combination of commutative monomials in h(i), o(i), tau(i,j) on X^m."""

    __slots__ = ("m", "terms")

    def __init__(self, m: int, terms: Optional[dict[Monomial, Scalar]] = None):
        if m < 1:
            raise FactorIndexError(f"ambient power must be positive, got {m}")
        self.m = m
        collected: dict[Monomial, Fraction] = {}
        for monomial, value in (terms or {}).items():
            key = tuple(sorted(monomial))
            collected[key] = collected.get(key, 0) + Fraction(value)
        self.terms = {key: value for key, value in collected.items() if value}

    @classmethod
    def constant(cls, m: int, value: Scalar = 1) -> "TautExpr":
        return cls(m, {(): value})

    @classmethod
    def generator(cls, m: int, name: str, *indices: int) -> "TautExpr":
        for i in indices:
            if not 1 <= i <= m:
                raise FactorIndexError(f"index {i} outside 1..{m}")
        if name in ("h", "o") and len(indices) == 1:
            return cls(m, {((name, indices[0]),): 1})
        if name == "tau" and len(indices) == 2 and indices[0] != indices[1]:
            i, j = sorted(indices)
            return cls(m, {(("tau", i, j),): 1})
        raise FactorIndexError(f"bad generator {name}{indices}")

    def _check(self, other: "TautExpr") -> None:
        if self.m != other.m:
            raise ModelMismatchError(f"expressions on X^{self.m} and X^{other.m}")

    def __add__(self, other: "TautExpr") -> "TautExpr":
        self._check(other)
        terms = dict(self.terms)
        for key, value in other.terms.items():
            terms[key] = terms.get(key, 0) + value
        return TautExpr(self.m, terms)

    def __sub__(self, other: "TautExpr") -> "TautExpr":
        return self + other * -1

    def __mul__(self, other: Union["TautExpr", Scalar]) -> "TautExpr":
        if not isinstance(other, TautExpr):
            return TautExpr(self.m, {key: value * Fraction(other) for key, value in self.terms.items()})
        self._check(other)
        terms: dict[Monomial, Fraction] = {}
        for a, x in self.terms.items():
            for b, y in other.terms.items():
                key = tuple(sorted(a + b))
                terms[key] = terms.get(key, 0) + x * y
        return TautExpr(self.m, terms)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "TautExpr":
        return self.power(exponent)

    def power(self, exponent: int, max_length: Optional[int] = None) -> "TautExpr":
        """Binomial expansion around the constant term, dropping monomials with more than ``max_length`` factors."""
        if exponent < 0:
            raise ValueError("negative exponent")
        constant = self.terms.get((), Fraction(0))
        rest = TautExpr(self.m, {key: value for key, value in self.terms.items() if key})
        result = TautExpr(self.m)
        step = TautExpr.constant(self.m)
        for k in range(exponent + 1):
            if not step.terms:
                break
            result = result + step * (comb(exponent, k) * constant ** (exponent - k))
            step = (step * rest).truncated(max_length)
        return result

    def truncated(self, max_length: Optional[int]) -> "TautExpr":
        if max_length is None:
            return self
        return TautExpr(self.m, {key: value for key, value in self.terms.items() if len(key) <= max_length})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TautExpr):
            return NotImplemented
        return self.m == other.m and self.terms == other.terms

    def __repr__(self) -> str:
        return f"TautExpr(m={self.m}, {format_monomials(self.terms)})"


def format_monomials(terms: dict[Monomial, Fraction]) -> str:
    if not terms:
        return "0"
    parts = []
    for monomial in sorted(terms):
        names = [f"{g[0]}({','.join(str(i) for i in g[1:])})" for g in monomial] or ["1"]
        parts.append(f"{format_rational(terms[monomial])}*{'*'.join(names)}")
    return " + ".join(parts)


class NormalMonomial(BaseModel):
    """tau-matching plus local states; local[i] = a means h(i+1)^a for a < n and o(i+1) for a = n."""
    model_config = ConfigDict(frozen=True)

    m: int = Field(ge=1)
    n: int = Field(ge=1)
    matching: tuple[tuple[int, int], ...] = ()
    local: tuple[int, ...]

    @model_validator(mode="after")
    def _disjoint(self) -> "NormalMonomial":
        if len(self.local) != self.m:
            raise ValueError(f"local states for {len(self.local)} indices on X^{self.m}")
        matched = [i for pair in self.matching for i in pair]
        if len(set(matched)) != len(matched) or any(not 1 <= i <= self.m for i in matched):
            raise ValueError(f"matching {self.matching} is not a partial matching of 1..{self.m}")
        if any(i >= j for i, j in self.matching) or list(self.matching) != sorted(self.matching):
            raise ValueError(f"matching {self.matching} is not normalized")
        for i in matched:
            if self.local[i - 1]:
                raise ValueError(f"matched index {i} carries a local state")
        if any(not 0 <= a <= self.n for a in self.local):
            raise ValueError(f"local states {self.local} outside 0..{self.n}")
        return self

    @property
    def codim(self) -> int:
        return self.n * len(self.matching) + sum(self.local)

    def sort_key(self) -> tuple:
        return self.matching, self.local

    def pretty(self) -> str:
        factors = [f"tau({i},{j})" for i, j in self.matching]
        for i, a in enumerate(self.local, start=1):
            if a == self.n:
                factors.append(f"o({i})")
            elif a == 1:
                factors.append(f"h({i})")
            elif a > 1:
                factors.append(f"h({i})^{a}")
        return "*".join(factors) or "1"


NormalForm = dict[NormalMonomial, Fraction]


class RelationTable(BaseModel):
    """Relation scalars; tau-free tables kill every tau."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    dimension: int
    degree: Fraction
    odd_rank: int
    c_sq: Fraction = Fraction(0)
    c_tri: Fraction = Fraction(0)
    tau_free: bool = False


def format_normal_form(form: NormalForm) -> str:
    if not form:
        return "0"
    parts = []
    for monomial in sorted(form, key=NormalMonomial.sort_key):
        coefficient = form[monomial]
        parts.append(monomial.pretty() if coefficient == 1 else f"{format_rational(coefficient)}*{monomial.pretty()}")
    return " + ".join(parts)


# rewriting

def normalize_monomial(monomial: Monomial, m: int, rt: RelationTable) -> Optional[tuple[Fraction, NormalMonomial]]:
    """Rewrite one monomial; None when it reduces to zero. Each tau step removes one tau."""
    n = rt.dimension
    h = [0] * (m + 1)
    o = [0] * (m + 1)
    taus: list[tuple[int, int]] = []
    for generator in monomial:
        if generator[0] == "h":
            h[generator[1]] += 1
        elif generator[0] == "o":
            o[generator[1]] += 1
        else:
            taus.append((generator[1], generator[2]))
    if taus and rt.tau_free:
        return None
    coefficient = Fraction(1)
    while True:
        taus.sort()
        counts: dict[int, int] = {}
        for pair in taus:
            for i in pair:
                counts[i] = counts.get(i, 0) + 1
        shared = [i for i, c in counts.items() if c >= 2]
        if not shared:
            break
        i = min(shared)
        first, second = [pair for pair in taus if i in pair][:2]
        taus.remove(first)
        taus.remove(second)
        if first == second:
            coefficient *= rt.c_sq
            o[first[0]] += 1
            o[first[1]] += 1
        else:
            j = first[0] if first[1] == i else first[1]
            k = second[0] if second[1] == i else second[1]
            coefficient *= rt.c_tri
            taus.append((min(j, k), max(j, k)))
            o[i] += 1
        if not coefficient:
            return None
    for pair in taus:
        if any(h[i] or o[i] for i in pair):
            return None
    local = []
    for i in range(1, m + 1):
        a, b = h[i], o[i]
        if b >= 2 or (b == 1 and a >= 1) or a > n:
            return None
        if b == 1:
            local.append(n)
        elif a == n:
            coefficient *= rt.degree
            local.append(n)
        else:
            local.append(a)
    return coefficient, NormalMonomial(m=m, n=n, matching=tuple(taus), local=tuple(local))


def normalize(e: TautExpr, rt: RelationTable) -> NormalForm:
    """Canonical form of an expression: a linear combination of normal monomials."""
    with start_action(action_type="tautological_normalize", m=e.m, terms=len(e.terms)) as action:
        form: NormalForm = {}
        for monomial, value in e.terms.items():
            reduced = normalize_monomial(monomial, e.m, rt)
            if reduced is None:
                continue
            coefficient, normal = reduced
            form[normal] = form.get(normal, 0) + value * coefficient
        form = {key: form[key] for key in sorted(form, key=NormalMonomial.sort_key) if form[key]}
        action.add_success_fields(normal_terms=len(form))
        return form


def normal_form_to_expr(form: NormalForm, m: int) -> TautExpr:
    result = TautExpr(m)
    for monomial, value in form.items():
        result = result + monomial_expr(monomial) * value
    return result


def monomial_expr(monomial: NormalMonomial) -> TautExpr:
    generators: list[Generator] = [("tau", i, j) for i, j in monomial.matching]
    for i, a in enumerate(monomial.local, start=1):
        generators += [("o", i)] if a == monomial.n else [("h", i)] * a
    return TautExpr(monomial.m, {tuple(generators): 1})


# monomial basis

def partial_matchings(m: int) -> list[tuple[tuple[int, int], ...]]:
    """All partial matchings of 1..m, ordered lexicographically by their sorted pairs."""
    found = []

    def extend(start: int, used: frozenset, pairs: tuple) -> None:
        found.append(pairs)
        for i in range(start, m + 1):
            if i in used:
                continue
            for j in range(i + 1, m + 1):
                if j not in used:
                    extend(i + 1, used | {i, j}, pairs + ((i, j),))

    extend(1, frozenset(), ())
    return sorted(found)


def basis(m: int, codim: int, rt: RelationTable) -> list[NormalMonomial]:
    """Every normal monomial of the given codimension on X^m."""
    n = rt.dimension
    if m < 1 or not 0 <= codim <= n * m:
        raise FactorIndexError(f"need m >= 1 and 0 <= codim <= {n * m}, got m={m}, codim={codim}")
    result = []
    for matching in partial_matchings(m):
        if matching and rt.tau_free:
            continue
        remaining = codim - n * len(matching)
        if remaining < 0:
            continue
        matched = {i for pair in matching for i in pair}
        free = [i for i in range(1, m + 1) if i not in matched]
        for states in cartesian(range(n + 1), repeat=len(free)):
            if sum(states) != remaining:
                continue
            local = [0] * m
            for i, a in zip(free, states):
                local[i - 1] = a
            result.append(NormalMonomial(m=m, n=n, matching=matching, local=tuple(local)))
    return sorted(result, key=NormalMonomial.sort_key)


# realization in cohomology

@lru_cache(maxsize=None)
def generator_class(model: VarietyModel, m: int, generator: Generator) -> GradedClass:
    space = power_model(model, m)
    name = generator[0]
    if name == "h":
        return pullback(model.h(1), space, generator[1] - 1)
    if name == "o":
        return pullback(model.o(), space, generator[1] - 1)
    return pullback(tau(model).cls, space, (generator[1] - 1, generator[2] - 1))


def _realize(generators: Sequence[Generator], model: VarietyModel, m: int) -> GradedClass:
    result = power_model(model, m).unit()
    for generator in generators:
        result = cup(result, generator_class(model, m, generator))
        if result.is_zero():
            break
    return result


def evaluate(monomial: NormalMonomial, model: VarietyModel) -> GradedClass:
    """Realize a normal monomial as a class on the m-fold power of the model."""
    if model.kind != "tate-odd" or model.dimension != monomial.n:
        raise ModelMismatchError(f"monomial of dimension {monomial.n} cannot be realized on {model.display_name}")
    return _realize(next(iter(monomial_expr(monomial).terms)), model, monomial.m)


def evaluate_expr(e: TautExpr, model: VarietyModel) -> GradedClass:
    """Realize an expression term by term, without rewriting."""
    result = GradedClass(power_model(model, e.m), {})
    for monomial, value in e.terms.items():
        result = result + _realize(monomial, model, e.m) * value
    return result


def evaluate_normal_form(form: NormalForm, model: VarietyModel, m: int) -> GradedClass:
    result = GradedClass(power_model(model, m), {})
    for monomial, value in form.items():
        result = result + evaluate(monomial, model) * value
    return result


# relations

def _proportional(x: GradedClass, y: GradedClass) -> Optional[Fraction]:
    if y.is_zero():
        return Fraction(0) if x.is_zero() else None
    key, value = next(iter(y.items()))
    c = x.coefficient(key) / value
    return c if x == y * c else None


@lru_cache(maxsize=None)
def bootstrap_relations(model: VarietyModel) -> RelationTable:
    """Solve tau^2 = c_sq o⊗o on X^2 and tau_12 tau_13 = c_tri tau_23 o_1 on X^3 in the model."""
    if model.kind != "tate-odd":
        raise RelationBootstrapError(f"{model.display_name} is not a tate-odd model")
    if model.odd_rank == 0:
        raise RelationBootstrapError(f"{model.display_name} has no odd part, so tau vanishes")
    with start_action(action_type="tautological_bootstrap_relations", model=model.display_name) as action:
        t = tau(model).cls
        c_sq = _proportional(cup(t, t), tensor(model.o(), model.o()))
        if c_sq is None:
            raise RelationBootstrapError("tau^2 is not proportional to o⊗o")
        tau12, tau13, tau23 = (generator_class(model, 3, g) for g in (("tau", 1, 2), ("tau", 1, 3), ("tau", 2, 3)))
        o1 = generator_class(model, 3, ("o", 1))
        c_tri = _proportional(cup(tau12, tau13), cup(tau23, o1))
        if c_tri is None:
            raise RelationBootstrapError("tau_12 tau_13 is not proportional to tau_23 o_1")
        h1 = generator_class(model, 2, ("h", 1))
        o1_2 = generator_class(model, 2, ("o", 1))
        if not cup(t, h1).is_zero() or not cup(t, o1_2).is_zero():
            raise RelationBootstrapError("tau does not kill h and o on a shared index")
        action.add_success_fields(c_sq=format_rational(c_sq), c_tri=format_rational(c_tri))
        return RelationTable(
            dimension=model.dimension, degree=model.degree, odd_rank=model.odd_rank, c_sq=c_sq, c_tri=c_tri
        )


def relation_table(model: VarietyModel) -> RelationTable:
    """Bootstrapped table, or the tau-free table of a model without odd part."""
    if model.kind != "tate-odd":
        raise ModelError("the tautological ring needs a tate-odd model")
    if model.odd_rank == 0:
        return RelationTable(dimension=model.dimension, degree=model.degree, odd_rank=0, tau_free=True)
    return bootstrap_relations(model)


def relations_report(model: VarietyModel) -> dict[str, Any]:
    """Check every relation in the model on X, X^2, X^3 and compare c_sq with the usual statement +b."""
    with start_action(action_type="tautological_relations_report", model=model.display_name) as action:
        rt = bootstrap_relations(model)
        n, d = model.dimension, model.degree

        def g(m: int, *generator) -> GradedClass:
            return generator_class(model, m, generator)

        checks = {
            "o_squared_zero": cup(g(1, "o", 1), g(1, "o", 1)).is_zero(),
            "h_o_zero": cup(g(1, "h", 1), g(1, "o", 1)).is_zero(),
            "h_power_n_equals_d_o": _realize([("h", 1)] * n, model, 1) == g(1, "o", 1) * d,
            "tau_o_zero": cup(g(2, "tau", 1, 2), g(2, "o", 1)).is_zero(),
            "tau_h_zero": cup(g(2, "tau", 1, 2), g(2, "h", 2)).is_zero(),
            "tau_squared": cup(g(2, "tau", 1, 2), g(2, "tau", 1, 2))
            == cup(g(2, "o", 1), g(2, "o", 2)) * rt.c_sq,
            "tau_triple": cup(g(3, "tau", 1, 2), g(3, "tau", 1, 3)) == cup(g(3, "tau", 2, 3), g(3, "o", 1)) * rt.c_tri,
        }
        values: dict[str, Any] = {
            "d": format_rational(d),
            "c_sq": format_rational(rt.c_sq),
            "c_tri": format_rational(rt.c_tri),
            "c_sq_abs_matches_stated": abs(rt.c_sq) == model.odd_rank,
            "sign_matches_stated": rt.c_sq > 0,
            "c_tri_abs_one": abs(rt.c_tri) == 1,
            **checks,
        }
        values["passed"] = all(checks.values()) and values["c_sq_abs_matches_stated"] and values["c_tri_abs_one"]
        action.add_success_fields(passed=values["passed"], sign_matches_stated=values["sign_matches_stated"])
        return values


# injectivity

def evaluation_rank(monomials: Sequence[NormalMonomial], model: VarietyModel) -> int:
    rows = [dict(evaluate(monomial, model).items()) for monomial in monomials]
    rows = [row for row in rows if row]
    return rank(SparseMatrix.from_keyed_rows(rows)) if rows else 0


def injectivity_report(
    m: int,
    model: VarietyModel,
    max_m: Optional[int] = None,
    max_coefficients: int = DEFAULT_MAX_COEFFICIENTS,
) -> dict[str, Any]:
    """Per codimension: number of normal monomials against the rank of their realizations in H*(X^m)."""
    if m < 1:
        raise FactorIndexError(f"m must be positive, got {m}")
    if max_m is not None and m > max_m:
        raise ResourceLimitError(f"injectivity at m={m} exceeds the configured maximum {max_m}")
    space = power_model(model, m)
    total = space.total_dimension()
    if total > max_coefficients:
        raise ResourceLimitError(f"H*(X^{m}) has {total} coefficients, above the cap {max_coefficients}")
    with start_action(action_type="tautological_injectivity_report", m=m, model=model.display_name) as action:
        rt = relation_table(model)
        codims = {}
        passed = True
        for codim in range(model.dimension * m + 1):
            monomials = basis(m, codim, rt)
            r = evaluation_rank(monomials, model)
            codims[str(codim)] = {
                "count": len(monomials),
                "rank": r,
                "ambient": kunneth_dimension(space, 2 * codim),
            }
            action.log(message_type="injectivity_codim", codim=codim, count=len(monomials), rank=r)
            passed = passed and r == len(monomials)
        action.add_success_fields(passed=passed)
        return {"m": m, "total_dimension": total, "codims": codims, "passed": passed}


# matching sums

def perfect_matchings(slots: Sequence[int]) -> Iterator[tuple[tuple[int, int], ...]]:
    """Perfect matchings of ``slots`` by first-slot expansion."""
    if not slots:
        yield ()
        return
    first, rest = slots[0], slots[1:]
    for position, partner in enumerate(rest):
        remaining = rest[:position] + rest[position + 1:]
        for tail in perfect_matchings(remaining):
            yield ((first, partner),) + tail


def double_factorial(odd: int) -> int:
    return prod(range(odd, 0, -2)) if odd > 0 else 1


class MatchingSum(BaseModel):
    """Sum over perfect matchings of 2k slots of the product of tau classes, restricted to the odd component."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    k: int
    b: int
    matchings: int
    multiplicity: int
    coefficient_space: int
    terms: int
    is_zero: bool
    exterior_bound_zero: bool
    summed: GradedClass = Field(exclude=True)

    @property
    def permutation_sum(self) -> GradedClass:
        """The sum over all permutations of the 2k slots."""
        return self.summed * self.multiplicity

    def values(self) -> dict[str, Any]:
        return {
            **self.model_dump(),
            "verdict": "zero" if self.is_zero else "nonzero",
            "first_vanishing_k": self.b // 2 + 1,
            "exterior_bound_holds": self.is_zero == self.exterior_bound_zero,
        }


def carrier_model(b: int) -> VarietyModel:
    """Threefold carrying an odd middle part of rank b; the odd part of tau does not depend on d."""
    return make_model("tate-odd", 3, 1, b)


def _matching_guard(k: int, b: int, max_coefficients: int) -> None:
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    if b < 2 or b % 2:
        raise ModelError(f"odd rank must be even and at least 2, got {b}")
    if b ** (2 * k) > max_coefficients:
        raise ResourceLimitError(f"b^(2k) = {b ** (2 * k)} coefficients exceed the cap {max_coefficients}")


def _odd_component(x: GradedClass) -> GradedClass:
    return x.restrict(lambda key: all(x.space.parity_vector(key)))


def matching_sum(k: int, b: int, max_coefficients: int = DEFAULT_MAX_COEFFICIENTS) -> MatchingSum:
    """Memoized first-slot expansion of the matching sum on 2k slots."""
    _matching_guard(k, b, max_coefficients)
    with start_action(action_type="tautological_matching_sum", k=k, b=b) as action:
        model = carrier_model(b)
        m = 2 * k
        space = power_model(model, m)
        memo: dict[tuple[int, ...], GradedClass] = {(): space.unit()}

        def expand(slots: tuple[int, ...]) -> GradedClass:
            if slots in memo:
                return memo[slots]
            first, rest = slots[0], slots[1:]
            total = GradedClass(space, {})
            for position, partner in enumerate(rest):
                tail = expand(rest[:position] + rest[position + 1:])
                if not tail.is_zero():
                    total = total + cup(generator_class(model, m, ("tau", first + 1, partner + 1)), tail)
            memo[slots] = total
            return total

        result = _odd_component(expand(tuple(range(m))))
        action.log(message_type="matching_sum_states", states=len(memo))
        summary = MatchingSum(
            k=k,
            b=b,
            matchings=double_factorial(2 * k - 1),
            multiplicity=2**k * factorial(k),
            coefficient_space=b ** (2 * k),
            terms=len(result),
            is_zero=result.is_zero(),
            exterior_bound_zero=2 * k > b,
            summed=result,
        )
        action.add_success_fields(is_zero=summary.is_zero, terms=summary.terms)
        return summary


def matching_sum_bruteforce(k: int, b: int, max_coefficients: int = DEFAULT_MAX_COEFFICIENTS) -> GradedClass:
    """Enumerate every perfect matching and add up the tau products."""
    _matching_guard(k, b, max_coefficients)
    model = carrier_model(b)
    m = 2 * k
    total = GradedClass(power_model(model, m), {})
    for matching in perfect_matchings(tuple(range(1, m + 1))):
        total = total + _realize([("tau", i, j) for i, j in matching], model, m)
    return _odd_component(total)
