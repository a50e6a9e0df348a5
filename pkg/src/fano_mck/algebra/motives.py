"""Graded-dimension shadows of motive decompositions."""

from math import comb
from typing import Any, Mapping, Optional, Sequence

from eliot import start_action
from pydantic import BaseModel, ConfigDict, Field, field_validator

from fano_mck.algebra.cohomology import VarietyModel, model_from_spec
from fano_mck.errors import MotiveError

# letters usable in motive expressions
REGISTERED_MODELS: dict[str, str] = {
    "Y": "y18",
    "Z": "z4",
    "F": "ab2",
    "C": "curve2",
}


class GradedDims(BaseModel):
    """Finitely supported degree → dimension table (a Poincare polynomial)."""
    model_config = ConfigDict(frozen=True)

    dims: dict[int, int] = Field(default_factory=dict)

    @field_validator("dims")
    @classmethod
    def _nonnegative(cls, dims: dict[int, int]) -> dict[int, int]:
        if any(value < 0 for value in dims.values()):
            raise ValueError(f"negative dimension in {dims}")
        return {degree: dims[degree] for degree in sorted(dims) if dims[degree]}

    @classmethod
    def from_betti(cls, betti: list[int]) -> "GradedDims":
        return cls(dims=dict(enumerate(betti)))

    @property
    def total(self) -> int:
        return sum(self.dims.values())

    def shifted(self, twist: int) -> "GradedDims":
        """Tate twist (-twist): degrees move up by 2·twist."""
        return GradedDims(dims={degree + 2 * twist: value for degree, value in self.dims.items()})

    def scaled(self, multiplicity: int) -> "GradedDims":
        return GradedDims(dims={degree: value * multiplicity for degree, value in self.dims.items()})

    def __add__(self, other: "GradedDims") -> "GradedDims":
        dims = dict(self.dims)
        for degree, value in other.dims.items():
            dims[degree] = dims.get(degree, 0) + value
        return GradedDims(dims=dims)

    def profile(self) -> str:
        return ", ".join(f"d{degree}:{value}" for degree, value in self.dims.items())


class MotiveTerm(BaseModel):
    """``k * base(-twist)``; base is the unit, a registered model, its degree-``piece`` part, or Sym^2 of either."""
    model_config = ConfigDict(frozen=True)

    multiplicity: int = Field(default=1, ge=1)
    variety: Optional[str] = None
    piece: Optional[int] = Field(default=None, ge=0)
    symmetric: bool = False
    twist: int = Field(default=0, ge=0)

    def base_text(self) -> str:
        if self.variety is None:
            return "1"
        inner = f"h{self.piece}({self.variety})" if self.piece is not None else self.variety
        if self.symmetric:
            return f"sym2{inner}" if self.piece is not None else f"sym2({inner})"
        return inner

    def pretty(self) -> str:
        text = self.base_text()
        if self.twist:
            text = f"{text}(-{self.twist})"
        return f"{self.multiplicity}*{text}" if self.multiplicity != 1 else text


class MotiveExpr(BaseModel):
    model_config = ConfigDict(frozen=True)

    terms: tuple[MotiveTerm, ...]

    def pretty(self) -> str:
        return " + ".join(term.pretty() for term in self.terms)


def signed_sym_square(d: GradedDims) -> GradedDims:
    """Swap invariants with the Koszul sign: Sym^2 on even degrees, Λ^2 on odd ones, cross terms once."""
    out: dict[int, int] = {}
    degrees = list(d.dims)
    for position, p in enumerate(degrees):
        dp = d.dims[p]
        same = comb(dp + 1, 2) if p % 2 == 0 else comb(dp, 2)
        out[2 * p] = out.get(2 * p, 0) + same
        for q in degrees[position + 1:]:
            out[p + q] = out.get(p + q, 0) + dp * d.dims[q]
    return GradedDims(dims=out)


def resolve_model(letter: str) -> VarietyModel:
    if letter not in REGISTERED_MODELS:
        raise MotiveError(f"unknown piece {letter!r}; registered: {', '.join(REGISTERED_MODELS)}")
    return model_from_spec(REGISTERED_MODELS[letter])


BettiOverrides = Mapping[str, Sequence[int]]


def betti_of(letter: str, overrides: Optional[BettiOverrides] = None) -> list[int]:
    """Betti vector of a registered piece, or its replacement from ``overrides``."""
    model = resolve_model(letter)
    if overrides is not None and letter in overrides:
        return list(overrides[letter])
    return model.betti()


def betti_inputs(expr: MotiveExpr, overrides: Optional[BettiOverrides] = None) -> list[tuple[str, int]]:
    """The (letter, degree) Betti numbers that the dimensions of ``expr`` depend on."""
    inputs: set[tuple[str, int]] = set()
    for term in expr.terms:
        if term.variety is None:
            continue
        if term.piece is None:
            inputs.update((term.variety, degree) for degree in range(len(betti_of(term.variety, overrides))))
        else:
            inputs.add((term.variety, term.piece))
    return sorted(inputs)


def dims_of_term(term: MotiveTerm, overrides: Optional[BettiOverrides] = None) -> GradedDims:
    if term.variety is None:
        base = GradedDims(dims={0: 1})
    else:
        betti = betti_of(term.variety, overrides)
        if term.piece is None:
            base = GradedDims.from_betti(betti)
        elif term.piece < len(betti) and betti[term.piece]:
            base = GradedDims(dims={term.piece: betti[term.piece]})
        else:
            raise MotiveError(f"h{term.piece}({term.variety}) is zero or out of range")
    if term.symmetric:
        base = signed_sym_square(base)
    return base.shifted(term.twist).scaled(term.multiplicity)


def dims_of(expr: MotiveExpr, overrides: Optional[BettiOverrides] = None) -> GradedDims:
    total = GradedDims()
    for term in expr.terms:
        total = total + dims_of_term(term, overrides)
    return total


def verify_decomposition(
    lhs: GradedDims, rhs: MotiveExpr, overrides: Optional[BettiOverrides] = None
) -> dict[str, Any]:
    """Degreewise comparison; lists every mismatching degree."""
    with start_action(action_type="motives_verify_decomposition", rhs=rhs.pretty()) as action:
        right = dims_of(rhs, overrides)
        degrees = sorted(set(lhs.dims) | set(right.dims))
        mismatches = [
            {"degree": degree, "lhs": lhs.dims.get(degree, 0), "rhs": right.dims.get(degree, 0)}
            for degree in degrees
            if lhs.dims.get(degree, 0) != right.dims.get(degree, 0)
        ]
        action.add_success_fields(mismatches=len(mismatches))
        return {
            "rhs": rhs.pretty(),
            "lhs_profile": lhs.profile(),
            "rhs_profile": right.profile(),
            "lhs_total": lhs.total,
            "rhs_total": right.total,
            "mismatches": mismatches,
            "passed": not mismatches,
        }


def verify_expressions(lhs: str, rhs: str, overrides: Optional[BettiOverrides] = None) -> dict[str, Any]:
    """Both sides given in motive syntax, e.g. ``sym2(Y)`` against ``F(-2) + Y + Y(-3)``."""
    from fano_mck.dsl.motive_parser import parse_motive

    values = verify_decomposition(dims_of(parse_motive(lhs), overrides), parse_motive(rhs), overrides)
    values["lhs"] = lhs
    return values


SYMMETRIC_SQUARE_SPLIT = (
    "1 + 1(-1) + 2*1(-2) + 2*1(-3) + 2*1(-4) + 1(-5) + 1(-6)"
    " + sym2h1(F)(-2) + h1(F)(-1) + h1(F)(-2) + h1(F)(-3) + h1(F)(-4)"
)

# check kind -> (lhs, rhs) in motive syntax
REGISTERED_DECOMPOSITIONS: dict[str, tuple[str, str]] = {
    "yf": ("sym2(Y)", "F(-2) + Y + Y(-3)"),
    "zf": ("sym2(Z)", "F(-2) + Z + Z(-3)"),
    "andthis": ("F", "1 + h1(F) + sym2h1(F) + h1(F)(-1) + 1(-2)"),
    "sym-square-split": ("sym2(Y)", SYMMETRIC_SQUARE_SPLIT),
    "middle-iso": ("h3(Y)", "h1(F)(-1)"),
}


def verify_registered(name: str, overrides: Optional[BettiOverrides] = None) -> dict[str, Any]:
    if name not in REGISTERED_DECOMPOSITIONS:
        raise MotiveError(f"unknown decomposition {name!r}; registered: {', '.join(REGISTERED_DECOMPOSITIONS)}")
    lhs, rhs = REGISTERED_DECOMPOSITIONS[name]
    return verify_expressions(lhs, rhs, overrides)


def verify_yf() -> dict[str, Any]:
    return verify_registered("yf")


def verify_zf() -> dict[str, Any]:
    return verify_registered("zf")


def verify_abelian_surface() -> dict[str, Any]:
    return verify_registered("andthis")


def verify_symmetric_square_split() -> dict[str, Any]:
    """h(Y^(2)) as Tate motives plus pieces of h^1(F)."""
    return verify_registered("sym-square-split")


def verify_middle_isomorphism() -> dict[str, Any]:
    return verify_registered("middle-iso")
