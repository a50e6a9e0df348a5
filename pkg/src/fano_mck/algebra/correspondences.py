"""Correspondences in cohomology: diagonals, Chow-Kuenneth projectors, composition and the MCK checks.

Conventions:
    act(f, x)      = (p2)_*((p1)^* x ∪ f)
    compose(f, g)  = (p13)_*((p12)^* f ∪ (p23)^* g), so act(compose(f, g), x) = act(g, act(f, x))
    transpose(a⊗b) = (-1)^{|a||b|} b⊗a

With these, the diagonal has the inverse Poincare pairing as coefficient matrix.
"""

from fractions import Fraction
from functools import lru_cache
from itertools import product as cartesian
from typing import Any, Literal, Optional, Sequence

from eliot import start_action

from fano_mck.algebra.cohomology import (
    GradedClass,
    VarietyModel,
    cup,
    integrate,
    pairing_matrix,
    power_model,
    product_model,
    pullback,
    pushforward,
    tensor,
)
from fano_mck.algebra.linalg import SparseMatrix, format_rational, rank, solve_linear
from fano_mck.errors import FactorIndexError, ModelError, ModelMismatchError, ProjectorValidationError

PurityConvention = Literal["weight", "kunneth"]


class Correspondence:
    """A class on source × target, read as a map H*(source) → H*(target)."""

    __slots__ = ("cls",)

    def __init__(self, cls: GradedClass):
        if cls.space.arity != 2:
            raise FactorIndexError(f"a correspondence lives on a two-factor product, got {cls.space.arity}")
        self.cls = cls

    @classmethod
    def zero(cls, source: VarietyModel, target: VarietyModel) -> "Correspondence":
        return cls(GradedClass(product_model([source, target]), {}))

    @property
    def source(self) -> VarietyModel:
        return self.cls.space.factors[0]

    @property
    def target(self) -> VarietyModel:
        return self.cls.space.factors[1]

    def is_zero(self) -> bool:
        return self.cls.is_zero()

    def __add__(self, other: "Correspondence") -> "Correspondence":
        return Correspondence(self.cls + other.cls)

    def __sub__(self, other: "Correspondence") -> "Correspondence":
        return Correspondence(self.cls - other.cls)

    def __mul__(self, scalar) -> "Correspondence":
        return Correspondence(self.cls * scalar)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Correspondence):
            return NotImplemented
        return self.cls == other.cls

    def __hash__(self) -> int:
        return hash(self.cls)

    def __repr__(self) -> str:
        return f"Correspondence({self.cls.pretty()})"


class ProjectorSet:
    """Weight-indexed projectors on X × X, validated on construction."""

    __slots__ = ("model", "projectors")

    def __init__(self, model: VarietyModel, projectors: dict[int, Correspondence], validate: bool = True):
        self.model = model
        self.projectors = dict(sorted(projectors.items()))
        if validate:
            validate_projectors(self)

    @property
    def weights(self) -> list[int]:
        return list(self.projectors)

    def __getitem__(self, weight: int) -> Correspondence:
        return self.projectors[weight]

    def get(self, weight: int) -> Correspondence:
        return self.projectors.get(weight) or Correspondence.zero(self.model, self.model)

    def transposed(self, weight: int) -> Correspondence:
        """The transpose of pi^weight, which is pi^{2n - weight}."""
        return self.get(self.model.top_degree - weight)


# calculus

def act(f: Correspondence, x: GradedClass) -> GradedClass:
    if x.space.factors != (f.source,):
        raise ModelMismatchError(f"cannot apply a correspondence from {f.source.display_name} to {x.space!r}")
    lifted = pullback(x, f.cls.space, 0)
    return pushforward(cup(lifted, f.cls), [1])


def compose(f: Correspondence, g: Correspondence) -> Correspondence:
    """First f, then g."""
    if f.target != g.source:
        raise ModelMismatchError(
            f"cannot compose {f.source.display_name}→{f.target.display_name} "
            f"with {g.source.display_name}→{g.target.display_name}"
        )
    space = product_model([f.source, f.target, g.target])
    joined = cup(pullback(f.cls, space, (0, 1)), pullback(g.cls, space, (1, 2)))
    return Correspondence(pushforward(joined, [0, 2]))


def transpose(f: Correspondence) -> Correspondence:
    swapped = product_model([f.target, f.source])
    return Correspondence(pullback(f.cls, swapped, (1, 0)))


def apply_on_factor(gamma: GradedClass, f: Correspondence, index: int) -> GradedClass:
    """Push ``gamma`` through ``f`` on one factor, keeping the factor order."""
    space = gamma.space
    space.check_factor(index)
    if space.factors[index] != f.source:
        raise ModelMismatchError(f"factor {index} is not the source of the correspondence")
    wide = product_model(list(space.factors) + [f.target])
    extra = space.arity
    joined = cup(pullback(gamma, wide, tuple(range(space.arity))), pullback(f.cls, wide, (index, extra)))
    kept = [extra if i == index else i for i in range(space.arity)]
    return pushforward(joined, kept)


def transport(gamma: GradedClass, maps: Sequence[Optional[Correspondence]]) -> GradedClass:
    """(f_1 ⊗ ... ⊗ f_m)_* gamma, applied factorwise; ``None`` means the identity on that factor."""
    if len(maps) != gamma.space.arity:
        raise FactorIndexError(f"{len(maps)} maps for a {gamma.space.arity}-factor class")
    result = gamma
    for index, f in enumerate(maps):
        if f is not None:
            result = apply_on_factor(result, f, index)
    return result


# distinguished classes

def _inverse_pairing(model: VarietyModel, target_degree: Optional[int] = None) -> dict[tuple[int, int], Fraction]:
    """Coefficients D[a][b] with sum_a G[c][a] D[a][b] = [b = c], for target basis b of the given degree."""
    G = pairing_matrix(model)
    columns = range(model.size) if target_degree is None else model.indices_in_degree(target_degree)
    coefficients = {}
    for b in columns:
        solution = solve_linear(G, [1 if c == b else 0 for c in range(model.size)])
        if not solution.consistent or not solution.unique:
            raise ModelError(f"Poincare pairing of {model.display_name} is degenerate")
        for a, value in enumerate(solution.values):
            if value:
                coefficients[(a, b)] = value
    return coefficients


@lru_cache(maxsize=None)
def diagonal(model: VarietyModel) -> Correspondence:
    space = product_model([model, model])
    return Correspondence(GradedClass(space, _inverse_pairing(model)))


@lru_cache(maxsize=None)
def kunneth_projector(model: VarietyModel, weight: int) -> Correspondence:
    """Solved projector acting as the identity on H^weight and zero elsewhere."""
    space = product_model([model, model])
    return Correspondence(GradedClass(space, _inverse_pairing(model, weight)))


@lru_cache(maxsize=None)
def tau(model: VarietyModel) -> Correspondence:
    """Projector onto the middle cohomology, solved from 'identity on H^n, zero elsewhere'."""
    if model.kind != "tate-odd":
        raise ModelError("tau is defined for tate-odd models")
    return kunneth_projector(model, model.dimension)


@lru_cache(maxsize=None)
def small_diagonal(model: VarietyModel) -> GradedClass:
    """Class on X^3 whose action (x ⊗ y) ↦ (p3)_*((x⊗y⊗1) ∪ Δ^sm) is the cup product."""
    inverse = _inverse_pairing(model)
    by_row: dict[int, list[tuple[int, Fraction]]] = {}
    for (a, b), value in inverse.items():
        by_row.setdefault(a, []).append((b, value))
    parities = model.parities()
    terms: dict[tuple[int, int, int], Fraction] = {}
    for (alpha, a_list), (beta, b_list) in cartesian(by_row.items(), repeat=2):
        sign = -1 if parities[alpha] and parities[beta] else 1
        for a, d_a in a_list:
            for b, d_b in b_list:
                term = model.product_term(a, b)
                if term is None:
                    continue
                gamma, m = term
                key = (alpha, beta, gamma)
                terms[key] = terms.get(key, 0) + sign * d_a * d_b * m
    return GradedClass(power_model(model, 3), terms)


def act_small_diagonal(model: VarietyModel, x: GradedClass, y: GradedClass) -> GradedClass:
    space = power_model(model, 3)
    source = tensor(x, y)
    return pushforward(cup(pullback(source, space, (0, 1)), small_diagonal(model)), [2])


# projector sets

def projector_identities(ps: ProjectorSet) -> dict[str, Any]:
    """Evaluate the projector identities; ``violations`` lists the failed ones in checking order."""
    model = ps.model
    with start_action(action_type="correspondences_projector_identities", model=model.display_name) as action:
        weights = ps.weights
        violations: list[tuple[str, Optional[str]]] = []
        idempotent, orthogonal = True, True
        for i in weights:
            for j in weights:
                composed = compose(ps[i], ps[j])
                expected = ps[i] if i == j else Correspondence.zero(model, model)
                if composed == expected:
                    continue
                if i == j:
                    idempotent = False
                    violations.append((f"pi^{i} ∘ pi^{i} = pi^{i}", None))
                else:
                    orthogonal = False
                    violations.append((f"pi^{i} ∘ pi^{j} = 0", None))
        total = Correspondence.zero(model, model)
        for weight in weights:
            total = total + ps[weight]
        sum_is_diagonal = total == diagonal(model)
        if not sum_is_diagonal:
            violations.append(("sum of projectors = diagonal", None))
        kunneth_action = True
        for index, element in enumerate(model.basis):
            x = model.space.basis_class((index,))
            for weight in weights:
                image = act(ps[weight], x)
                expected = x if element.degree == weight else GradedClass(model.space, {})
                if image != expected:
                    kunneth_action = False
                    violations.append(
                        (f"pi^{weight} acts as the Kuenneth projector", f"on basis element {element.label}")
                    )
        action.add_success_fields(weights=weights, violations=len(violations))
        return {
            "idempotent": idempotent,
            "orthogonal": orthogonal,
            "sum_is_diagonal": sum_is_diagonal,
            "kunneth_action": kunneth_action,
            "violations": violations,
        }


def validate_projectors(ps: ProjectorSet) -> None:
    """Raise ProjectorValidationError naming the first violated identity."""
    violations = projector_identities(ps)["violations"]
    if violations:
        identity, detail = violations[0]
        raise ProjectorValidationError(identity, detail)


def decomposable_part(model: VarietyModel) -> Correspondence:
    """(1/d) sum_j h^j ⊗ h^{n-j}."""
    n = model.dimension
    terms = {(model.index(_h(j)), model.index(_h(n - j))): Fraction(1) / model.degree for j in range(n + 1)}
    return Correspondence(GradedClass(product_model([model, model]), terms))


def _h(power: int) -> str:
    return "1" if power == 0 else ("h" if power == 1 else f"h^{power}")


@lru_cache(maxsize=None)
def ck_projectors(model: VarietyModel) -> ProjectorSet:
    """pi^{2j} = (1/d) h^{n-j} ⊗ h^j, pi^n = Δ - sum of the even ones; Kuenneth set for exterior models."""
    with start_action(action_type="correspondences_ck_projectors", model=model.display_name) as action:
        if model.kind == "exterior":
            projectors = {k: kunneth_projector(model, k) for k in range(model.top_degree + 1)}
            ps = ProjectorSet(model, projectors)
            action.add_success_fields(weights=ps.weights)
            return ps
        n = model.dimension
        space = product_model([model, model])
        projectors: dict[int, Correspondence] = {}
        for j in range(n + 1):
            key = (model.index(_h(n - j)), model.index(_h(j)))
            projectors[2 * j] = Correspondence(GradedClass(space, {key: Fraction(1) / model.degree}))
        middle = diagonal(model)
        for weight in list(projectors):
            middle = middle - projectors[weight]
        if n % 2 == 0:
            if not middle.is_zero():
                raise ProjectorValidationError("diagonal = sum of even projectors")
        else:
            if middle != tau(model):
                raise ProjectorValidationError("pi^n = tau (solved)")
            if middle != diagonal(model) - decomposable_part(model):
                raise ProjectorValidationError("pi^n = Δ - (1/d) sum h^j ⊗ h^{n-j}")
            projectors[n] = middle
        ps = ProjectorSet(model, projectors)
        action.add_success_fields(weights=ps.weights)
        return ps


def projectors_report(model: VarietyModel, ps: Optional[ProjectorSet] = None) -> dict[str, Any]:
    """Evaluate every projector identity on the built set (or on ``ps``) and report each flag."""
    ps = ps if ps is not None else ck_projectors(model)
    identities = projector_identities(ps)
    transposes = {
        str(weight): transpose(ps[weight]) == ps.transposed(weight) for weight in ps.weights
    }
    flags = {name: identities[name] for name in ("idempotent", "orthogonal", "sum_is_diagonal", "kunneth_action")}
    return {
        "weights": ps.weights,
        **flags,
        "transpose_pairs": transposes,
        "violations": [identity for identity, _ in identities["violations"]],
        "passed": all(flags.values()) and all(transposes.values()),
    }


# MCK

def mck_component(model: VarietyModel, ps: ProjectorSet, i: int, j: int, k: int) -> GradedClass:
    """(ᵗpi^i ⊗ ᵗpi^j ⊗ pi^k)_* Δ^sm."""
    return transport(small_diagonal(model), [ps.transposed(i), ps.transposed(j), ps.get(k)])


def bigrading_table(model: VarietyModel, ps: ProjectorSet) -> dict[str, int]:
    """dim of (pi^{2i-j})_* H^{2i} for every codimension i and weight j."""
    table = {}
    for i in range(model.dimension + 1):
        classes = [model.space.basis_class((index,)) for index in model.indices_in_degree(2 * i)]
        for j in range(2 * i + 1):
            weight = 2 * i - j
            if weight not in ps.weights:
                continue
            images = [act(ps[weight], x) for x in classes]
            rows = [{key: value for key, value in image.items()} for image in images if not image.is_zero()]
            dimension = rank(SparseMatrix.from_keyed_rows(rows)) if rows else 0
            table[f"A^{i}_({j})"] = dimension
    return table


def check_mck(model: VarietyModel, ps: Optional[ProjectorSet] = None) -> dict[str, Any]:
    """Every component with i + j ≠ k vanishes; the i + j = k components sum back to Δ^sm."""
    ps = ps or ck_projectors(model)
    with start_action(action_type="correspondences_check_mck", model=model.display_name) as action:
        sm = small_diagonal(model)
        weights = ps.weights
        offending = []
        nonzero = []
        total = GradedClass(sm.space, {})
        for i, j, k in cartesian(weights, repeat=3):
            component = mck_component(model, ps, i, j, k)
            if component.is_zero():
                continue
            if i + j != k:
                offending.append([i, j, k])
            else:
                nonzero.append([i, j, k])
                total = total + component
        sums_back = total == sm
        table = bigrading_table(model, ps)
        even_only_weight_zero = all(value == 0 for name, value in table.items() if not name.endswith("_(0)"))
        action.add_success_fields(offending=len(offending), sums_back=sums_back)
        return {
            "weights": weights,
            "triples_checked": len(weights) ** 3,
            "offending_triples": offending,
            "nonzero_triples": nonzero,
            "sum_equals_small_diagonal": sums_back,
            "bigrading": table,
            "only_weight_zero_on_even_cohomology": even_only_weight_zero,
            "passed": not offending and sums_back and even_only_weight_zero,
        }


def check_lieberman(model: VarietyModel, c_tri: Optional[Fraction] = None) -> dict[str, Any]:
    """(pi^n ⊗ pi^n ⊗ Δ)_* Δ^sm = (pi^n ⊗ pi^n ⊗ pi^{2n})_* Δ^sm = tau13·tau23 = c_tri·tau12·o3."""
    with start_action(action_type="correspondences_check_lieberman", model=model.display_name) as action:
        n = model.dimension
        ps = ck_projectors(model)
        sm = small_diagonal(model)
        left = transport(sm, [ps[n], ps[n], diagonal(model)])
        right = transport(sm, [ps[n], ps[n], ps[2 * n]])
        space = power_model(model, 3)
        t = tau(model).cls
        tau13 = pullback(t, space, (0, 2))
        tau23 = pullback(t, space, (1, 2))
        tau12 = pullback(t, space, (0, 1))
        o3 = pullback(model.o(), space, 2)
        product_13_23 = cup(tau13, tau23)
        contracted = cup(tau12, o3)
        if c_tri is None:
            c_tri = _proportionality(product_13_23, contracted)
        values = {
            "transport_equal": left == right,
            "equals_tau13_tau23": right == product_13_23,
            "c_tri": format_rational(c_tri) if c_tri is not None else None,
            "equals_c_tri_tau12_o3": c_tri is not None and product_13_23 == contracted * c_tri,
            "nonzero": not right.is_zero(),
        }
        values["passed"] = all(values[key] for key in ("transport_equal", "equals_tau13_tau23", "equals_c_tri_tau12_o3"))
        action.add_success_fields(passed=values["passed"])
        return values


def _proportionality(x: GradedClass, y: GradedClass) -> Optional[Fraction]:
    """The scalar c with x = c·y, or None when there is none."""
    if y.is_zero():
        return Fraction(0) if x.is_zero() else None
    key, value = next(iter(y.items()))
    c = x.coefficient(key) / value
    return c if x == y * c else None


# purity and the Abel-Jacobi shadow

def canonical_p(f_model: VarietyModel, y_model: VarietyModel) -> Correspondence:
    """P = sum_k e_k ⊗ v_k in H^1(F) ⊗ H^n(Y), identifying the two symplectic spaces."""
    odd = [element.label for element in y_model.basis if element.label.startswith("v")]
    if f_model.kind != "exterior" or len(odd) != 2 * f_model.dimension:
        raise ModelMismatchError("canonical P needs an exterior model with H^1 of the odd rank of Y")
    space = product_model([f_model, y_model])
    terms = {(f_model.index(f"e{k}"), y_model.index(f"v{k}")): Fraction(1) for k in range(1, len(odd) + 1)}
    return Correspondence(GradedClass(space, terms))


def planted_impurity(f_model: VarietyModel, y_model: VarietyModel) -> Correspondence:
    """h_F^2 ⊗ 1, of Kuenneth type (4, 0)."""
    square = cup(f_model.polarization(), f_model.polarization())
    return Correspondence(tensor(square, y_model.unit()))


def kunneth_components(f: Correspondence) -> dict[tuple[int, int], GradedClass]:
    """Split a correspondence by the Kuenneth type (deg on source, deg on target) of its terms."""
    parts: dict[tuple[int, int], dict] = {}
    source, target = f.source, f.target
    for key, value in f.cls.items():
        kind = (source.basis[key[0]].degree, target.basis[key[1]].degree)
        parts.setdefault(kind, {})[key] = value
    return {kind: GradedClass(f.cls.space, terms) for kind, terms in sorted(parts.items())}


def check_pure_degree(
    p: Correspondence,
    source_projectors: ProjectorSet,
    target_projectors: ProjectorSet,
    total: int,
    convention: PurityConvention = "weight",
) -> dict[str, Any]:
    """List the nonzero (pi_source^i ⊗ pi_target^j)-components of P; pure iff all have i + j = total.

    With the ``weight`` convention the source projector is transposed, as in the MCK components, so a term of
    Kuenneth type (a, b) on an F of dimension g has weights (2g - a, b). The ``kunneth`` convention uses (a, b).

    The two conventions disagree on which classes are pure. The diagonal of Y is pure of total 6 only under
    ``kunneth``, where its components are (k, 6 - k); under ``weight`` they are (6 - k, 6 - k). A summand
    h^2 ⊗ 1 on F × Y has Kuenneth type (4, 0), so it is impure under ``weight`` with total 6 and invisible
    under ``kunneth`` with total 4. The canonical P is pure in both readings.
    """
    with start_action(action_type="correspondences_check_pure_degree", total=total, convention=convention) as action:
        components = []
        for i, j in cartesian(source_projectors.weights, target_projectors.weights):
            first = source_projectors.transposed(i) if convention == "weight" else source_projectors[i]
            part = transport(p.cls, [first, target_projectors[j]])
            if not part.is_zero():
                components.append([i, j])
        offending = [pair for pair in components if sum(pair) != total]
        top = p.source.top_degree
        as_type = (lambda i, j: [top - i, j]) if convention == "weight" else (lambda i, j: [i, j])
        action.add_success_fields(components=components, offending=offending)
        return {
            "convention": convention,
            "total": total,
            "components": components,
            "kunneth_types": [list(kind) for kind in kunneth_components(p)],
            "offending": offending,
            "offending_types": [as_type(i, j) for i, j in offending],
            "passed": not offending,
        }


def check_abel_jacobi(f_model: VarietyModel, y_model: VarietyModel) -> dict[str, Any]:
    """The transpose of the canonical P maps H^n(Y) isomorphically onto H^1(F) and kills the Tate classes."""
    with start_action(action_type="correspondences_check_abel_jacobi") as action:
        backward = transpose(canonical_p(f_model, y_model))
        odd = [y_model.space.basis_class((index,)) for index in y_model.odd_indices()]
        images = [act(backward, x) for x in odd]
        rows = [dict(image.items()) for image in images if not image.is_zero()]
        image_rank = rank(SparseMatrix.from_keyed_rows(rows)) if rows else 0
        tate = [y_model.space.basis_class((index,)) for index in range(y_model.size) if not y_model.basis[index].parity]
        kills_tate = all(act(backward, x).is_zero() for x in tate)
        lands_in_h1 = all(image.degrees() <= {1} for image in images)
        values = {
            "rank": image_rank,
            "odd_dimension": len(odd),
            "h1_dimension": f_model.betti()[1],
            "isomorphism": image_rank == len(odd) == f_model.betti()[1],
            "kills_tate_classes": kills_tate,
            "lands_in_h1": lands_in_h1,
        }
        values["passed"] = values["isomorphism"] and kills_tate and lands_in_h1
        action.add_success_fields(rank=image_rank)
        return values


# the diagonal against the polarization

def delta_h_decomposition(model: VarietyModel) -> dict[str, Any]:
    """Solve Δ ∪ (p1)^*(h) = sum_j a_j h^j ⊗ h^{n+1-j} in H^{2n+2}(X × X)."""
    if model.kind != "tate-odd":
        raise ModelError("delta-h needs a tate-odd model")
    with start_action(action_type="correspondences_delta_h", model=model.display_name) as action:
        n = model.dimension
        space = product_model([model, model])
        product = cup(diagonal(model).cls, pullback(model.h(1), space, 0))
        keys = [(model.index(_h(j)), model.index(_h(n + 1 - j))) for j in range(1, n + 1)]
        odd_part = product.restrict(lambda key: any(space.parity_vector(key)))
        rows_index = sorted(set(keys) | set(key for key, _ in product.items()))
        position = {key: r for r, key in enumerate(rows_index)}
        matrix = SparseMatrix(len(rows_index), len(keys), {(position[key], c): 1 for c, key in enumerate(keys)})
        rhs = [product.coefficient(key) for key in rows_index]
        solution = solve_linear(matrix, rhs)
        values: dict[str, Any] = {"consistent": solution.consistent}
        if solution.consistent:
            for j, value in enumerate(solution.values, start=1):
                values[f"a{j}"] = format_rational(value)
            # Δ·(p1)^*K with K = -h, written in the basis K^j ⊗ K^{n+1-j}
            sign = -1 if (n + 2) % 2 else 1
            values["k_basis"] = {f"a{j}": format_rational(sign * value) for j, value in enumerate(solution.values, start=1)}
        values["odd_contribution_zero"] = odd_part.is_zero()
        values["passed"] = solution.consistent and odd_part.is_zero()
        action.add_success_fields(consistent=solution.consistent)
        return values


def euler_from_diagonal(model: VarietyModel) -> Fraction:
    d = diagonal(model).cls
    return integrate(cup(d, d))

