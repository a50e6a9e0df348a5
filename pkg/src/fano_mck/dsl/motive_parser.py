"""Motive expressions such as ``F(-2) + Y + Y(-3)`` or ``2*1(-2) + sym2h1(F)(-2)``.

    expr  := term ('+' term)*
    term  := (uint '*')? base twist?
    base  := '1' | NAME | 'h'k '(' NAME ')' | 'sym2h'k '(' NAME ')' | 'sym2' '(' NAME ')'
    twist := '(' '-' uint ')'
"""

import re

from fano_mck.algebra.motives import MotiveExpr, MotiveTerm
from fano_mck.dsl.tokenizer import Token, tokenize
from fano_mck.errors import CycleSyntaxError, MotiveError

PIECE_PATTERN = re.compile(r"^(sym2)?h(\d+)$")


class _MotiveParser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.position = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.position]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.position + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        token = self.current
        self.position += 1
        return token

    def fail(self, message: str) -> CycleSyntaxError:
        token = self.current
        return CycleSyntaxError(message, token.line, token.column, token.text or "<end>")

    def uint(self) -> int:
        token = self.current
        if token.kind != "number" or "/" in token.text:
            raise self.fail("expected a nonnegative integer")
        self.advance()
        return int(token.text)

    def expect(self, kind: str, text: str = "") -> Token:
        if self.current.kind != kind or (text and self.current.text != text):
            raise self.fail(f"expected {text or kind}")
        return self.advance()

    def parse(self) -> MotiveExpr:
        terms = [self.term()]
        while self.current.kind == "op" and self.current.text == "+":
            self.advance()
            terms.append(self.term())
        if self.current.kind != "end":
            raise self.fail("unexpected token")
        return MotiveExpr(terms=tuple(terms))

    def term(self) -> MotiveTerm:
        multiplicity = 1
        if self.current.kind == "number" and self.peek().kind == "op" and self.peek().text == "*":
            multiplicity = self.uint()
            self.advance()
            if multiplicity < 1:
                raise self.fail("multiplicity must be positive")
        fields = self.base()
        twist = 0
        if self.current.kind == "lparen" and self.peek().kind == "op" and self.peek().text == "-":
            self.advance()
            self.advance()
            twist = self.uint()
            self.expect("rparen")
        return MotiveTerm(multiplicity=multiplicity, twist=twist, **fields)

    def base(self) -> dict:
        token = self.current
        if token.kind == "number":
            if token.text != "1":
                raise self.fail("only the unit motive 1 is a numeric base")
            self.advance()
            return {}
        if token.kind != "ident":
            raise self.fail("expected a motive")
        self.advance()
        if token.text == "sym2":
            return {"variety": self.argument(), "symmetric": True}
        match = PIECE_PATTERN.match(token.text)
        if match:
            return {"variety": self.argument(), "piece": int(match.group(2)), "symmetric": bool(match.group(1))}
        return {"variety": token.text}

    def argument(self) -> str:
        self.expect("lparen")
        name = self.expect("ident").text
        self.expect("rparen")
        return name


def parse_motive(text: str) -> MotiveExpr:
    """Parse motive syntax; unknown variety letters are rejected when dimensions are resolved."""
    try:
        return _MotiveParser(text).parse()
    except ValueError as e:
        raise MotiveError(str(e)) from e
