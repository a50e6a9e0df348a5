import re
from fractions import Fraction
from typing import Annotated, Literal

from pydantic import AfterValidator, BeforeValidator


VarietyIn = Literal[
  "y18",
  "z4",
  "curve2",
  "ab2",
]

VarietyKind = Literal["tate-odd", "exterior"]

VARIETY_LABELS: dict[VarietyIn, str] = {
  "y18": "prime Fano threefold of genus 10 (index 1, degree 18)",
  "z4": "complete intersection of two quadrics in P^5 (index 2, degree 4)",
  "curve2": "genus 2 curve",
  "ab2": "abelian surface",
}

# (kind, n, d, b) for tate-odd; (kind, g, 0, 0) for exterior
VARIETY_PARAMETERS: dict[VarietyIn, tuple[VarietyKind, int, int, int]] = {
  "y18": ("tate-odd", 3, 18, 4),
  "z4": ("tate-odd", 3, 4, 4),
  "curve2": ("tate-odd", 1, 2, 4),
  "ab2": ("exterior", 2, 0, 0),
}

CUSTOM_VARIETY_PATTERN = re.compile(r"^custom\(\s*(\d+)\s*,\s*(\d+(?:/\d+)?)\s*,\s*(\d+)\s*\)$")


def parse_variety(spec: str) -> tuple[VarietyKind, int, Fraction, int]:
    """Resolve a variety spec string to (kind, n-or-g, d, b)."""
    key = spec.strip().lower()
    if key in VARIETY_PARAMETERS:
        kind, n, d, b = VARIETY_PARAMETERS[key]
        return kind, n, Fraction(d), b
    match = CUSTOM_VARIETY_PATTERN.match(key)
    if match is None:
        raise ValueError(
            f"unknown variety {spec!r}: use one of {', '.join(VARIETY_PARAMETERS)} or custom(n,d,b)"
        )
    n, d, b = int(match.group(1)), Fraction(match.group(2)), int(match.group(3))
    if n <= 0 or d <= 0:
        raise ValueError(f"custom variety needs positive n and d, got {spec!r}")
    return "tate-odd", n, d, b


def _canonical_variety(spec: str) -> str:
    parse_variety(spec)
    return re.sub(r"\s+", "", spec.strip().lower())


VarietySpec = Annotated[str, BeforeValidator(str), AfterValidator(_canonical_variety)]
