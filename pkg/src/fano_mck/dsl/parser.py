"""Recursive-descent parser and canonical printer for cycle expressions.

    expr   := term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := atom ('^' uint)?
    atom   := rational | ident '(' args ')' | ident | '(' expr ')'
"""

from fractions import Fraction
from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

from fano_mck.dsl.tokenizer import Token, tokenize
from fano_mck.errors import CycleSyntaxError, CycleValidationError

GeneratorName = Literal["h", "o", "tau", "pi", "delta", "delta_sm"]
GENERATOR_NAMES: tuple[str, ...] = ("h", "o", "tau", "pi", "delta", "delta_sm")


class Number(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    node: Literal["number"] = "number"
    value: Fraction


class Generator(BaseModel):
    model_config = ConfigDict(frozen=True)

    node: Literal["generator"] = "generator"
    name: GeneratorName
    indices: tuple[int, ...] = ()


class BinaryOp(BaseModel):
    model_config = ConfigDict(frozen=True)

    node: Literal["binary"] = "binary"
    op: Literal["+", "-", "*"]
    left: "CycleAst"
    right: "CycleAst"


class Power(BaseModel):
    model_config = ConfigDict(frozen=True)

    node: Literal["power"] = "power"
    base: "CycleAst"
    exponent: int = Field(ge=0)


CycleAst = Annotated[Union[Number, Generator, BinaryOp, Power], Field(discriminator="node")]

BinaryOp.model_rebuild()
Power.model_rebuild()


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.position = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.position]

    def advance(self) -> Token:
        token = self.current
        self.position += 1
        return token

    def fail(self, message: str, token: Optional[Token] = None) -> CycleSyntaxError:
        token = token or self.current
        return CycleSyntaxError(message, token.line, token.column, token.text or "<end>")

    def expect(self, kind: str, text: Optional[str] = None) -> Token:
        token = self.current
        if token.kind != kind or (text is not None and token.text != text):
            raise self.fail(f"expected {text or kind}")
        return self.advance()

    def parse(self) -> CycleAst:
        node = self.expr()
        if self.current.kind != "end":
            raise self.fail("unexpected token")
        return node

    def expr(self) -> CycleAst:
        node = self.term()
        while self.current.kind == "op" and self.current.text in ("+", "-"):
            op = self.advance().text
            node = BinaryOp(op=op, left=node, right=self.term())
        return node

    def term(self) -> CycleAst:
        node = self.factor()
        while self.current.kind == "op" and self.current.text == "*":
            self.advance()
            node = BinaryOp(op="*", left=node, right=self.factor())
        return node

    def factor(self) -> CycleAst:
        node = self.atom()
        if self.current.kind == "op" and self.current.text == "^":
            self.advance()
            token = self.current
            if token.kind != "number" or "/" in token.text:
                raise self.fail("exponent must be a nonnegative integer")
            self.advance()
            node = Power(base=node, exponent=int(token.text))
        return node

    def atom(self) -> CycleAst:
        token = self.current
        if token.kind == "number":
            self.advance()
            numerator, _, denominator = token.text.partition("/")
            if denominator and int(denominator) == 0:
                raise self.fail("zero denominator", token)
            return Number(value=Fraction(int(numerator), int(denominator or 1)))
        if token.kind == "ident":
            self.advance()
            if token.text not in GENERATOR_NAMES:
                raise self.fail("unknown generator", token)
            indices: list[int] = []
            if self.current.kind == "lparen":
                self.advance()
                indices.append(self.index())
                while self.current.kind == "comma":
                    self.advance()
                    indices.append(self.index())
                self.expect("rparen")
            return Generator(name=token.text, indices=tuple(indices))
        if token.kind == "lparen":
            self.advance()
            node = self.expr()
            self.expect("rparen")
            return node
        raise self.fail("expected a number, a generator or '('")

    def index(self) -> int:
        token = self.current
        if token.kind != "number" or "/" in token.text:
            raise self.fail("expected an integer index")
        self.advance()
        return int(token.text)


def parse(text: str) -> CycleAst:
    """Parse a cycle expression; syntax errors carry line, column and the offending token."""
    return _Parser(text).parse()


PRECEDENCE = {"+": 1, "-": 1, "*": 2}


def _precedence(node: CycleAst) -> int:
    if isinstance(node, BinaryOp):
        return PRECEDENCE[node.op]
    if isinstance(node, Power):
        return 3
    return 4


def to_text(node: CycleAst) -> str:
    """Canonical text with the minimal parentheses that reproduce the tree."""
    if isinstance(node, Number):
        return str(node.value)
    if isinstance(node, Generator):
        if not node.indices:
            return node.name
        return f"{node.name}({','.join(str(i) for i in node.indices)})"
    if isinstance(node, Power):
        base = to_text(node.base)
        if _precedence(node.base) < 4:
            base = f"({base})"
        return f"{base}^{node.exponent}"
    own = PRECEDENCE[node.op]
    left = to_text(node.left)
    if _precedence(node.left) < own:
        left = f"({left})"
    right = to_text(node.right)
    if _precedence(node.right) <= own:
        right = f"({right})"
    if node.op == "*":
        return f"{left}*{right}"
    return f"{left} {node.op} {right}"


ARITY = {"h": 1, "o": 1, "tau": 2, "pi": 1, "delta": 0, "delta_sm": 0}
REQUIRED_POWER = {"pi": 2, "delta": 2, "delta_sm": 3}


def generators(node: CycleAst) -> list[Generator]:
    if isinstance(node, Generator):
        return [node]
    if isinstance(node, BinaryOp):
        return generators(node.left) + generators(node.right)
    if isinstance(node, Power):
        return generators(node.base)
    return []


def validate(node: CycleAst, m: int, max_weight: Optional[int] = None) -> CycleAst:
    """Check index ranges against the ambient power m; returns the node unchanged."""
    if m < 1:
        raise CycleValidationError(f"ambient power must be positive, got {m}")
    for generator in generators(node):
        name, indices = generator.name, generator.indices
        if len(indices) != ARITY[name]:
            raise CycleValidationError(f"{name} takes {ARITY[name]} indices, got {len(indices)}")
        if name in REQUIRED_POWER and m != REQUIRED_POWER[name]:
            raise CycleValidationError(f"{name} lives on X^{REQUIRED_POWER[name]}, not X^{m}")
        if name == "pi":
            if max_weight is not None and not 0 <= indices[0] <= max_weight:
                raise CycleValidationError(f"projector weight {indices[0]} outside 0..{max_weight}")
            continue
        for i in indices:
            if not 1 <= i <= m:
                raise CycleValidationError(f"index {i} in {to_text(generator)} outside 1..{m}")
        if name == "tau" and indices[0] == indices[1]:
            raise CycleValidationError(f"tau indices must differ in {to_text(generator)}")
    return node
