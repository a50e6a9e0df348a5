import re
from typing import Iterator, Literal

from pydantic import BaseModel, ConfigDict

from fano_mck.errors import CycleSyntaxError

TokenKind = Literal["number", "ident", "op", "lparen", "rparen", "comma", "end"]

TOKEN_PATTERN = re.compile(
    r"(?P<number>\d+(?:/\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*^])"
    r"|(?P<lparen>\()"
    r"|(?P<rparen>\))"
    r"|(?P<comma>,)"
    r"|(?P<space>\s+)"
)


class Token(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: TokenKind
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    """Split text into tokens with 1-based line/column positions; whitespace is dropped."""
    return list(_scan(text))


def _scan(text: str) -> Iterator[Token]:
    position = 0
    line, line_start = 1, 0
    while position < len(text):
        match = TOKEN_PATTERN.match(text, position)
        column = position - line_start + 1
        if match is None:
            raise CycleSyntaxError("unexpected character", line, column, text[position])
        kind = match.lastgroup
        value = match.group()
        if kind == "space":
            newlines = value.count("\n")
            if newlines:
                line += newlines
                line_start = position + value.rfind("\n") + 1
        else:
            yield Token(kind=kind, text=value, line=line, column=column)
        position = match.end()
    yield Token(kind="end", text="", line=line, column=position - line_start + 1)
