"""Boolean predicates over background-factor literals and ``U``.

Grammar (ASCII operators, whitespace ignored)::

    expr    := term ('|' term)*
    term    := factor ('&' factor)*
    factor  := '!' factor | '(' expr ')' | literal
    literal := ('A' | 'B') digit | 'U'

Precedence is ``!`` over ``&`` over ``|``.  The literal alphabet depends on
the mode: ``monotone`` allows A1, A2, A4, A6, B1, B2, B4, B6 and U, while
``general`` allows all of A1..A9, B1..B9 and U.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, NamedTuple, Union

from .model import GENERAL_FACTORS, MONOTONE_FACTORS, N_TYPES, type_from_index

MODES = ("monotone", "general")

ALPHABETS = {
    "monotone": frozenset(MONOTONE_FACTORS) | {"U"},
    "general": frozenset(GENERAL_FACTORS) | {"U"},
}


class ParseError(ValueError):
    """Raised for malformed predicate text; ``position`` is a 0-based offset."""

    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


class Cell(NamedTuple):
    """A risk-status type paired with a value of the common cause ``U``."""

    index: int
    u: int


# --- AST -----------------------------------------------------------------


@dataclass(frozen=True)
class Lit:
    name: str

    def evaluate(self, env: Mapping[str, int]) -> int:
        return env[self.name]

    def literals(self) -> frozenset[str]:
        return frozenset((self.name,))

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Not:
    operand: "Predicate"

    def evaluate(self, env: Mapping[str, int]) -> int:
        return 1 - self.operand.evaluate(env)

    def literals(self) -> frozenset[str]:
        return self.operand.literals()

    def __str__(self) -> str:
        inner = str(self.operand)
        if isinstance(self.operand, (And, Or)):
            inner = f"({inner})"
        return f"!{inner}"


@dataclass(frozen=True)
class And:
    left: "Predicate"
    right: "Predicate"

    def evaluate(self, env: Mapping[str, int]) -> int:
        return self.left.evaluate(env) & self.right.evaluate(env)

    def literals(self) -> frozenset[str]:
        return self.left.literals() | self.right.literals()

    def __str__(self) -> str:
        parts = []
        for side in (self.left, self.right):
            text = str(side)
            parts.append(f"({text})" if isinstance(side, Or) else text)
        return " & ".join(parts)


@dataclass(frozen=True)
class Or:
    left: "Predicate"
    right: "Predicate"

    def evaluate(self, env: Mapping[str, int]) -> int:
        return self.left.evaluate(env) | self.right.evaluate(env)

    def literals(self) -> frozenset[str]:
        return self.left.literals() | self.right.literals()

    def __str__(self) -> str:
        return f"{self.left} | {self.right}"


Predicate = Union[Lit, Not, And, Or]


# --- parser --------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<lit>[AB]\d|U)|(?P<op>[!&|()])|(?P<bad>\S))")


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    for m in _TOKEN.finditer(text):
        if m.group("bad") is not None:
            raise ParseError(f"unexpected character {m.group('bad')!r}", m.start("bad"), text)
        kind = "lit" if m.group("lit") else "op"
        tokens.append((m.group(kind), m.start(kind)))
    return tokens


class _Parser:
    def __init__(self, text: str, mode: str):
        self.text = text
        self.alphabet = ALPHABETS[mode]
        self.mode = mode
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> str | None:
        return self.tokens[self.pos][0] if self.pos < len(self.tokens) else None

    def offset(self) -> int:
        return self.tokens[self.pos][1] if self.pos < len(self.tokens) else len(self.text)

    def take(self) -> str:
        tok = self.tokens[self.pos][0]
        self.pos += 1
        return tok

    def parse(self) -> Predicate:
        if not self.tokens:
            raise ParseError("empty predicate", 0, self.text)
        node = self.expr()
        if self.peek() is not None:
            raise ParseError(f"unexpected {self.peek()!r}", self.offset(), self.text)
        return node

    def expr(self) -> Predicate:
        node = self.term()
        while self.peek() == "|":
            self.take()
            node = Or(node, self.term())
        return node

    def term(self) -> Predicate:
        node = self.factor()
        while self.peek() == "&":
            self.take()
            node = And(node, self.factor())
        return node

    def factor(self) -> Predicate:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", self.offset(), self.text)
        if tok == "!":
            self.take()
            return Not(self.factor())
        if tok == "(":
            start = self.offset()
            self.take()
            node = self.expr()
            if self.peek() != ")":
                raise ParseError(f"unbalanced '(' opened at {start}", self.offset(), self.text)
            self.take()
            return node
        if tok in ("&", "|", ")"):
            raise ParseError(f"unexpected {tok!r}", self.offset(), self.text)
        if tok not in self.alphabet:
            if tok in ALPHABETS["general"]:
                msg = f"literal {tok} is not in the {self.mode} alphabet"
            else:
                msg = f"unknown identifier {tok!r}"
            raise ParseError(msg, self.offset(), self.text)
        self.take()
        return Lit(tok)


@lru_cache(maxsize=1024)
def parse(text: str, mode: str = "monotone") -> Predicate:
    """Parse ``text`` into a predicate AST.

    >>> str(parse("A1 | A4 & !U"))
    'A1 | A4 & !U'
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    return _Parser(text, mode).parse()


def to_text(p: Predicate) -> str:
    return str(p)


# --- evaluation ----------------------------------------------------------


def cell_env(cell: Cell) -> dict[str, int]:
    env = type_from_index(cell.index).as_dict()
    env["U"] = cell.u
    return env


def evaluate(p: Predicate, cell: Cell) -> int:
    """Truth value of ``p`` on a monotone cell."""
    return p.evaluate(cell_env(cell))


def evaluate_general(p: Predicate, susc_env: Mapping[str, int], u: int) -> int:
    env = dict(susc_env)
    env["U"] = u
    return p.evaluate(env)


@lru_cache(maxsize=1024)
def satisfying_cells(p: Predicate) -> frozenset[Cell]:
    """All monotone cells (out of 512) on which ``p`` holds."""
    return frozenset(
        Cell(i, u) for i in range(1, N_TYPES + 1) for u in (0, 1) if evaluate(p, Cell(i, u))
    )


def count_types(p: Predicate | str) -> frozenset[int]:
    """Indices of the monotone risk-status types whose susceptibility satisfies ``p``."""
    if isinstance(p, str):
        p = parse(p)
    if "U" in p.literals():
        raise ValueError("count_types needs a predicate without U")
    return frozenset(i for i in range(1, N_TYPES + 1) if p.evaluate(type_from_index(i).as_dict()))
