"""Finite models of H*(X, Q): Tate tower with odd symplectic middle, exterior algebras, Kuenneth products.

Sign convention: transposing homogeneous tensor factors x, y costs (-1)^{|x||y|}.
Products of tensors therefore pick up (-1)^{sum_{j<i} |y_j||x_i|}. Integrated factors always sit in
even (top) degree, so pushforwards never produce a sign; they contract rightmost-first.
"""

from collections import defaultdict
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Any, Iterable, Iterator, Optional, Sequence, Union

from eliot import start_action
from pydantic import BaseModel, ConfigDict, PrivateAttr

from fano_mck.algebra.linalg import Scalar, SparseMatrix, format_rational, rank
from fano_mck.datatypes import VarietyKind, parse_variety
from fano_mck.errors import FactorIndexError, ModelError, ModelMismatchError

Key = tuple[int, ...]


class BasisElement(BaseModel):
    """Labeled basis element of a model; parity is degree mod 2."""
    model_config = ConfigDict(frozen=True)

    label: str
    degree: int

    @property
    def parity(self) -> int:
        return self.degree % 2


class VarietyModel(BaseModel):
    """Cohomology ring of a model variety with cup-product structure constants and integration."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: VarietyKind
    dimension: int
    degree: Fraction = Fraction(1)
    odd_rank: int = 0
    odd_order: Optional[tuple[int, ...]] = None
    name: str = ""
    basis: tuple[BasisElement, ...] = ()

    _products: dict[tuple[int, int], tuple[int, Fraction]] = PrivateAttr(default_factory=dict)
    _integrals: dict[int, Fraction] = PrivateAttr(default_factory=dict)
    _index: dict[str, int] = PrivateAttr(default_factory=dict)
    _space: Optional["ProductModel"] = PrivateAttr(default=None)

    def model_post_init(self, __context: Any) -> None:
        self._index = {element.label: i for i, element in enumerate(self.basis)}
        if self.kind == "tate-odd":
            self._build_tate_odd()
        else:
            self._build_exterior()

    def _build_tate_odd(self) -> None:
        n = self.dimension
        top = self._index[_power_label(n)]
        odd = [(i, int(element.label[1:])) for i, element in enumerate(self.basis) if element.label.startswith("v")]
        for i in range(n + 1):
            for j in range(n + 1 - i):
                self._products[(i, j)] = (i + j, Fraction(1))
        for index, _ in odd:
            self._products[(0, index)] = (index, Fraction(1))
            self._products[(index, 0)] = (index, Fraction(1))
        for a_index, a in odd:
            for b_index, b in odd:
                form = symplectic_form(a, b)
                if form:
                    # v_a v_b = omega(a, b) o, o = h^n / d
                    self._products[(a_index, b_index)] = (top, Fraction(form) / self.degree)
        self._integrals = {top: self.degree}

    def _build_exterior(self) -> None:
        subsets = [_subset_of(element.label) for element in self.basis]
        position = {subset: i for i, subset in enumerate(subsets)}
        for i, left in enumerate(subsets):
            for j, right in enumerate(subsets):
                if set(left) & set(right):
                    continue
                inversions = sum(1 for s in left for t in right if s > t)
                merged = tuple(sorted(left + right))
                self._products[(i, j)] = (position[merged], Fraction(-1 if inversions % 2 else 1))
        self._integrals = {len(self.basis) - 1: Fraction(1)}

    # identity is the parameter tuple; the structure tables are derived from it

    def _identity(self) -> tuple:
        return self.kind, self.dimension, self.degree, self.odd_rank, self.odd_order, self.name

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, VarietyModel):
            return NotImplemented
        return self is other or self._identity() == other._identity()

    def __hash__(self) -> int:
        return hash(self._identity())

    # structure

    @property
    def size(self) -> int:
        return len(self.basis)

    @property
    def top_degree(self) -> int:
        return 2 * self.dimension

    @property
    def unit_index(self) -> int:
        return 0

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise ModelError(f"no basis element {label!r} in {self.display_name}") from None

    def product_term(self, a: int, b: int) -> Optional[tuple[int, Fraction]]:
        return self._products.get((a, b))

    def integral_of(self, index: int) -> Fraction:
        return self._integrals.get(index, Fraction(0))

    def degrees(self) -> tuple[int, ...]:
        return tuple(element.degree for element in self.basis)

    def parities(self) -> tuple[int, ...]:
        return tuple(element.parity for element in self.basis)

    def indices_in_degree(self, degree: int) -> list[int]:
        return [i for i, element in enumerate(self.basis) if element.degree == degree]

    def odd_indices(self) -> list[int]:
        return [i for i, element in enumerate(self.basis) if element.parity]

    @property
    def display_name(self) -> str:
        if self.name:
            return self.name
        if self.kind == "tate-odd":
            return f"tate-odd(n={self.dimension}, d={format_rational(self.degree)}, b={self.odd_rank})"
        return f"exterior(g={self.dimension})"

    # classes on the model itself

    @property
    def space(self) -> "ProductModel":
        if self._space is None:
            self._space = product_model([self])
        return self._space

    def element(self, label: str) -> "GradedClass":
        return GradedClass(self.space, {(self.index(label),): Fraction(1)})

    def unit(self) -> "GradedClass":
        return GradedClass(self.space, {(0,): Fraction(1)})

    def polarization(self) -> "GradedClass":
        """h for tate-odd models, the principal polarization theta = sum e_{2i-1} e_{2i} for exterior ones."""
        if self.kind == "tate-odd":
            return self.h(1)
        terms = {}
        for i in range(1, self.dimension + 1):
            terms[(self.index(f"e{2 * i - 1}e{2 * i}"),)] = Fraction(1)
        return GradedClass(self.space, terms)

    def h(self, power: int = 1) -> "GradedClass":
        if self.kind != "tate-odd":
            raise ModelError("h is only defined on tate-odd models")
        if power > self.dimension:
            return GradedClass(self.space, {})
        return self.element(_power_label(power))

    def o(self) -> "GradedClass":
        """The point class o := h^n / d."""
        if self.kind != "tate-odd":
            return GradedClass(self.space, {(self.size - 1,): Fraction(1)})
        return self.h(self.dimension) * (Fraction(1) / self.degree)

    def betti(self) -> list[int]:
        counts = [0] * (self.top_degree + 1)
        for element in self.basis:
            counts[element.degree] += 1
        return counts

    def euler_char(self) -> int:
        return euler_characteristic(self.betti())


def symplectic_form(a: int, b: int) -> int:
    """Standard symplectic form on consecutive pairs: omega(v1, v2) = omega(v3, v4) = 1."""
    if a % 2 == 1 and b == a + 1:
        return 1
    if b % 2 == 1 and a == b + 1:
        return -1
    return 0


def _power_label(power: int) -> str:
    if power == 0:
        return "1"
    if power == 1:
        return "h"
    return f"h^{power}"


def _subset_label(subset: tuple[int, ...]) -> str:
    return "".join(f"e{i}" for i in subset) or "1"


def _subset_of(label: str) -> tuple[int, ...]:
    if label == "1":
        return ()
    return tuple(int(part) for part in label.split("e")[1:])


@lru_cache(maxsize=None)
def make_model(
    kind: VarietyKind,
    dimension: int,
    degree: Scalar = 1,
    odd_rank: int = 0,
    odd_order: Optional[tuple[int, ...]] = None,
    name: str = "",
) -> VarietyModel:
    """Build (and cache) a model from its parameters, enforcing the model invariants."""
    degree = Fraction(degree)
    if dimension <= 0:
        raise ModelError(f"dimension must be positive, got {dimension}")
    if kind == "tate-odd":
        if degree <= 0:
            raise ModelError(f"polarization degree must be positive, got {degree}")
        if odd_rank < 0 or odd_rank % 2:
            raise ModelError(f"odd rank must be even and nonnegative, got {odd_rank}")
        if odd_rank and dimension % 2 == 0:
            raise ModelError(f"odd middle cohomology needs odd dimension, got n={dimension}")
        order = odd_order or tuple(range(1, odd_rank + 1))
        if sorted(order) != list(range(1, odd_rank + 1)):
            raise ModelError(f"odd basis order {order} is not a permutation of 1..{odd_rank}")
        basis = [BasisElement(label=_power_label(j), degree=2 * j) for j in range(dimension + 1)]
        basis += [BasisElement(label=f"v{k}", degree=dimension) for k in order]
        return VarietyModel(
            kind=kind,
            dimension=dimension,
            degree=degree,
            odd_rank=odd_rank,
            odd_order=odd_order,
            name=name,
            basis=tuple(basis),
        )
    if kind == "exterior":
        generators = range(1, 2 * dimension + 1)
        basis = [
            BasisElement(label=_subset_label(subset), degree=size)
            for size in range(2 * dimension + 1)
            for subset in combinations(generators, size)
        ]
        return VarietyModel(kind=kind, dimension=dimension, odd_rank=0, name=name, basis=tuple(basis))
    raise ModelError(f"unknown model kind {kind!r}")


def model_from_spec(spec: str, odd_order: Optional[tuple[int, ...]] = None) -> VarietyModel:
    """Resolve ``y18``, ``z4``, ``curve2``, ``ab2`` or ``custom(n,d,b)`` into a model."""
    try:
        kind, n, d, b = parse_variety(spec)
    except ValueError as e:
        raise ModelError(str(e)) from e
    name = spec.strip().lower().replace(" ", "")
    if kind == "exterior":
        return make_model(kind, n, name=name)
    return make_model(kind, n, d, b, odd_order, name)


def euler_characteristic(betti: Sequence[int]) -> int:
    return sum((-1) ** k * dim for k, dim in enumerate(betti))


def betti(model: Union[VarietyModel, "ProductModel"]) -> list[int]:
    return model.betti()


def euler_char(model: Union[VarietyModel, "ProductModel"]) -> int:
    return model.euler_char()


def convolve_betti(vectors: Iterable[Sequence[int]]) -> list[int]:
    result = [1]
    for vector in vectors:
        out = [0] * (len(result) + len(vector) - 1)
        for i, a in enumerate(result):
            if a:
                for j, b in enumerate(vector):
                    out[i + j] += a * b
        result = out
    return result


class ProductModel:
    """Kuenneth product of factor models; basis keys are tuples of factor basis indices."""

    __slots__ = ("factors", "_parities", "_degrees", "_hash")

    def __init__(self, factors: Sequence[VarietyModel]):
        if not factors:
            raise FactorIndexError("a product model needs at least one factor")
        self.factors = tuple(factors)
        self._parities = tuple(factor.parities() for factor in self.factors)
        self._degrees = tuple(factor.degrees() for factor in self.factors)
        self._hash = hash(self.factors)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ProductModel):
            return NotImplemented
        return self is other or self.factors == other.factors

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return " x ".join(factor.display_name for factor in self.factors)

    @property
    def arity(self) -> int:
        return len(self.factors)

    def degree(self, key: Key) -> int:
        return sum(degrees[i] for degrees, i in zip(self._degrees, key))

    def parity_vector(self, key: Key) -> tuple[int, ...]:
        return tuple(parities[i] for parities, i in zip(self._parities, key))

    def betti(self) -> list[int]:
        return convolve_betti(factor.betti() for factor in self.factors)

    def euler_char(self) -> int:
        return euler_characteristic(self.betti())

    def total_dimension(self) -> int:
        return sum(self.betti())

    def basis_keys(self, degree: Optional[int] = None) -> Iterator[Key]:
        """Enumerate basis keys (optionally of one degree) in lexicographic order."""
        def extend(prefix: Key, position: int, so_far: int) -> Iterator[Key]:
            if position == self.arity:
                if degree is None or so_far == degree:
                    yield prefix
                return
            for i, d in enumerate(self._degrees[position]):
                if degree is None or so_far + d <= degree:
                    yield from extend(prefix + (i,), position + 1, so_far + d)
        return extend((), 0, 0)

    def label(self, key: Key) -> str:
        return "⊗".join(factor.basis[i].label for factor, i in zip(self.factors, key))

    def unit(self) -> "GradedClass":
        return GradedClass(self, {(0,) * self.arity: Fraction(1)})

    def basis_class(self, key: Key) -> "GradedClass":
        return GradedClass(self, {tuple(key): Fraction(1)})

    def check_factor(self, index: int) -> None:
        if not 0 <= index < self.arity:
            raise FactorIndexError(f"factor index {index} outside 0..{self.arity - 1}")


@lru_cache(maxsize=None)
def _cached_product(factors: tuple[VarietyModel, ...]) -> ProductModel:
    return ProductModel(factors)


def product_model(factors: Sequence[VarietyModel]) -> ProductModel:
    return _cached_product(tuple(factors))


def power_model(model: VarietyModel, m: int) -> ProductModel:
    if m < 1:
        raise FactorIndexError(f"power must be positive, got {m}")
    return product_model([model] * m)


class GradedClass:
    """Sparse exact-rational coefficient vector over a product model's basis."""

    __slots__ = ("space", "_terms")

    def __init__(self, space: ProductModel, terms: Optional[dict[Key, Scalar]] = None):
        self.space = space
        cleaned = {}
        for key, value in (terms or {}).items():
            value = Fraction(value)
            if value:
                cleaned[key] = value
        self._terms = cleaned

    @classmethod
    def _trusted(cls, space: ProductModel, terms: dict[Key, Fraction]) -> "GradedClass":
        instance = cls.__new__(cls)
        instance.space = space
        instance._terms = {key: value for key, value in terms.items() if value}
        return instance

    @property
    def terms(self) -> dict[Key, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, key: Key) -> Fraction:
        return self._terms.get(tuple(key), Fraction(0))

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def _check(self, other: "GradedClass") -> None:
        if self.space != other.space:
            raise ModelMismatchError(f"classes live on {self.space!r} and {other.space!r}")

    def __add__(self, other: "GradedClass") -> "GradedClass":
        self._check(other)
        terms = dict(self._terms)
        for key, value in other._terms.items():
            terms[key] = terms.get(key, 0) + value
        return GradedClass._trusted(self.space, terms)

    def __sub__(self, other: "GradedClass") -> "GradedClass":
        return self + other * -1

    def __neg__(self) -> "GradedClass":
        return self * -1

    def __mul__(self, scalar: Scalar) -> "GradedClass":
        if isinstance(scalar, GradedClass):
            raise TypeError("use cup() to multiply classes")
        scalar = Fraction(scalar)
        return GradedClass._trusted(self.space, {key: value * scalar for key, value in self._terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GradedClass):
            return NotImplemented
        return self.space == other.space and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.space, frozenset(self._terms.items())))

    def degrees(self) -> set[int]:
        return {self.space.degree(key) for key in self._terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def component(self, degree: int) -> "GradedClass":
        return GradedClass._trusted(
            self.space, {key: value for key, value in self._terms.items() if self.space.degree(key) == degree}
        )

    def restrict(self, keep) -> "GradedClass":
        """Keep only the terms whose key satisfies ``keep``."""
        return GradedClass._trusted(self.space, {key: value for key, value in self._terms.items() if keep(key)})

    def pretty(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for key in sorted(self._terms):
            parts.append(f"{format_rational(self._terms[key])}*{self.space.label(key)}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"GradedClass({self.pretty()})"


def _koszul_exponent(left: tuple[int, ...], right: tuple[int, ...]) -> int:
    """sum_{j<i} |right_j| |left_i| mod 2, on parities."""
    exponent = 0
    seen = 0
    for i in range(1, len(left)):
        seen ^= right[i - 1]
        exponent ^= seen & left[i]
    return exponent


def cup(x: GradedClass, y: GradedClass) -> GradedClass:
    """Cup product on a (product) model, with the Koszul sign for interleaving factors."""
    x._check(y)
    space = x.space
    factors = space.factors
    result: dict[Key, Fraction] = defaultdict(Fraction)
    y_items = [(key, value, space.parity_vector(key)) for key, value in y.items()]
    for kx, cx in x.items():
        px = space.parity_vector(kx)
        for ky, cy, py in y_items:
            coefficient = cx * cy
            key = []
            for factor, a, b in zip(factors, kx, ky):
                term = factor.product_term(a, b)
                if term is None:
                    break
                key.append(term[0])
                coefficient *= term[1]
            else:
                if _koszul_exponent(px, py):
                    coefficient = -coefficient
                result[tuple(key)] += coefficient
    return GradedClass._trusted(space, result)


def cup_all(classes: Sequence[GradedClass], space: Optional[ProductModel] = None) -> GradedClass:
    if not classes:
        if space is None:
            raise ModelMismatchError("empty product needs an explicit space")
        return space.unit()
    result = classes[0]
    for other in classes[1:]:
        result = cup(result, other)
    return result


def cup_power(x: GradedClass, exponent: int) -> GradedClass:
    """x^exponent, expanded around the degree-0 part; the positive-degree part is nilpotent."""
    if exponent < 0:
        raise ValueError("negative exponent")
    space = x.space
    unit = space.unit()
    constant = x.coefficient((0,) * space.arity)
    rest = x - unit * constant
    result = GradedClass(space, {})
    step = unit
    for k in range(exponent + 1):
        if step.is_zero():
            break
        result = result + step * (comb(exponent, k) * constant ** (exponent - k))
        step = cup(step, rest)
    return result


def integrate(x: GradedClass) -> Fraction:
    """Coefficient of the top class, normalized by each factor's integral (int o = 1)."""
    total = Fraction(0)
    factors = x.space.factors
    for key, value in x.items():
        weight = value
        for factor, i in zip(factors, key):
            weight *= factor.integral_of(i)
            if not weight:
                break
        total += weight
    return total


def _reorder_sign(parities: Sequence[int], order: Sequence[int]) -> int:
    """Koszul sign of listing elements with the given parities in ``order``."""
    flips = 0
    for p in range(len(order)):
        for q in range(p + 1, len(order)):
            if order[p] > order[q] and parities[order[p]] and parities[order[q]]:
                flips ^= 1
    return -1 if flips else 1


def pushforward(x: GradedClass, kept: Sequence[int]) -> GradedClass:
    """Integrate out every factor not in ``kept``; kept factors are listed in the given order."""
    space = x.space
    for index in kept:
        space.check_factor(index)
    if len(set(kept)) != len(kept):
        raise FactorIndexError(f"repeated factor in {list(kept)}")
    dropped = [i for i in range(space.arity) if i not in kept]
    target = product_model([space.factors[i] for i in kept])
    result: dict[Key, Fraction] = defaultdict(Fraction)
    for key, value in x.items():
        weight = value
        for i in reversed(dropped):
            weight *= space.factors[i].integral_of(key[i])
            if not weight:
                break
        if not weight:
            continue
        parities = space.parity_vector(key)
        weight *= _reorder_sign(parities, kept)
        result[tuple(key[i] for i in kept)] += weight
    return GradedClass._trusted(target, result)


def pullback(x: GradedClass, into: ProductModel, at: Union[int, Sequence[int]]) -> GradedClass:
    """Place the factors of ``x`` at positions ``at`` of ``into``, tensoring with units elsewhere."""
    positions = (at,) if isinstance(at, int) else tuple(at)
    if len(positions) != x.space.arity or len(set(positions)) != len(positions):
        raise FactorIndexError(f"positions {positions} do not match a {x.space.arity}-factor class")
    for source, position in enumerate(positions):
        into.check_factor(position)
        if into.factors[position] != x.space.factors[source]:
            raise ModelMismatchError(f"factor {source} cannot be placed at position {position}")
    result: dict[Key, Fraction] = {}
    for key, value in x.items():
        target = [0] * into.arity
        for source, position in enumerate(positions):
            target[position] = key[source]
        parities = x.space.parity_vector(key)
        flips = 0
        for s in range(len(positions)):
            for t in range(s + 1, len(positions)):
                if positions[s] > positions[t] and parities[s] and parities[t]:
                    flips ^= 1
        result[tuple(target)] = -value if flips else value
    return GradedClass._trusted(into, result)


def tensor(*classes: GradedClass) -> GradedClass:
    """External product x1 ⊗ ... ⊗ xk on the product of the factor spaces."""
    factors = [factor for c in classes for factor in c.space.factors]
    space = product_model(factors)
    result = space.unit()
    offset = 0
    for c in classes:
        positions = tuple(range(offset, offset + c.space.arity))
        result = cup(result, pullback(c, space, positions))
        offset += c.space.arity
    return result


def permute_factors(x: GradedClass, permutation: Sequence[int]) -> GradedClass:
    """Move factor i to position permutation[i] (factors must agree), with Koszul signs."""
    return pullback(x, x.space, tuple(permutation))


def pairing_matrix(model: VarietyModel) -> SparseMatrix:
    """Poincare pairing G[a][b] = int e_a e_b."""
    entries = {}
    for a in range(model.size):
        for b in range(model.size):
            term = model.product_term(a, b)
            if term is not None:
                value = term[1] * model.integral_of(term[0])
                if value:
                    entries[(a, b)] = value
    return SparseMatrix(model.size, model.size, entries)


def poincare_ranks(model: VarietyModel) -> dict[int, tuple[int, int]]:
    """Per degree k: (rank of the pairing H^k x H^{2n-k}, dim H^k)."""
    G = pairing_matrix(model)
    out = {}
    for k, dim in enumerate(model.betti()):
        rows = model.indices_in_degree(k)
        cols = model.indices_in_degree(model.top_degree - k)
        block = SparseMatrix(
            len(rows), len(cols), {(r, c): G.get(a, b) for r, a in enumerate(rows) for c, b in enumerate(cols)}
        )
        out[k] = (rank(block), dim)
    return out


def model_integrity(model: VarietyModel) -> dict[str, Any]:
    """Betti vector, Euler characteristic, top integral and Poincare non-degeneracy of a model."""
    with start_action(action_type="cohomology_model_integrity", model=model.display_name) as action:
        ranks = poincare_ranks(model)
        top = model.polarization()
        for _ in range(model.dimension - 1):
            top = cup(top, model.polarization())
        values = {
            "betti": model.betti(),
            "euler_char": model.euler_char(),
            "top_integral": format_rational(integrate(top)),
            "poincare_nondegenerate": all(r == d for r, d in ranks.values()),
        }
        action.add_success_fields(**values)
        return values


def compare_betti(first: VarietyModel, second: VarietyModel) -> dict[str, Any]:
    """Betti equality between two models (the cohomological shadow of an isomorphism of motives)."""
    with start_action(
        action_type="cohomology_compare_betti", first=first.display_name, second=second.display_name
    ) as action:
        values = {
            "first": first.betti(),
            "second": second.betti(),
            "equal": first.betti() == second.betti(),
            "first_degree": format_rational(first.degree),
            "second_degree": format_rational(second.degree),
        }
        action.add_success_fields(equal=values["equal"])
        return values


def kunneth_dimension(space: ProductModel, degree: int) -> int:
    betti = space.betti()
    return betti[degree] if 0 <= degree < len(betti) else 0


def binomial_betti(g: int) -> list[int]:
    return [comb(2 * g, k) for k in range(2 * g + 1)]
