from .tokenizer import Token, tokenize
from .parser import BinaryOp, CycleAst, Generator, Number, Power, parse, to_text, validate
from .motive_parser import parse_motive
from .realize import check_tautological, parse_class, parse_taut, to_class, to_taut_expr
