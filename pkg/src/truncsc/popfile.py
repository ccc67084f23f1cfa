"""Reading and writing population files.

Example::

    # two-cell population
    mode monotone
    cell 137 0 1/2
    cell 65  0 1/2

Instead of ``cell`` lines a file may give one ``independent`` block, which
expands to the product distribution over all 512 monotone cells::

    independent
      U 1/3            # Pr(U = 1)
      A1 1 1/2         # Pr(A1 = 1 | U = 1)
      A1 0 1/4         # Pr(A1 = 1 | U = 0)
    end

Factors that are not listed are absent (probability 0).
"""
from __future__ import annotations

import hashlib
import re
from fractions import Fraction
from itertools import product
from pathlib import Path

from .model import MONOTONE_FACTORS, canonical_index, Susceptibility
from .population import Population, PopulationError
from .predicate import MODES

_RATIONAL = re.compile(r"^\d+(?:/\d+)?$")
_DECIMAL = re.compile(r"^(?:\d+\.\d*|\.\d+)(?:[eE][-+]?\d+)?$|^\d+[eE][-+]?\d+$")

DECIMAL_TOLERANCE = Fraction(1, 10 ** 12)


class PopFileError(ValueError):
    """Malformed population file (syntax, unknown directive, bad number)."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


def _number(token: str, line: int) -> tuple[Fraction, bool]:
    """Parse a probability literal; the flag is true for decimal input."""
    if _RATIONAL.match(token):
        num, _, den = token.partition("/")
        if den and int(den) == 0:
            raise PopFileError(f"zero denominator in {token!r}", line)
        return Fraction(int(num), int(den or 1)), False
    if _DECIMAL.match(token):
        return Fraction(token), True
    raise PopFileError(f"bad probability literal {token!r}", line)


def _binary(token: str, line: int) -> int:
    if token not in ("0", "1"):
        raise PopFileError(f"u must be 0 or 1, got {token!r}", line)
    return int(token)


def _expand_independent(pr_u1: Fraction, factors: dict) -> dict:
    masses = {}
    for u, pr_u in ((1, pr_u1), (0, 1 - pr_u1)):
        if not pr_u:
            continue
        for bits in product((0, 1), repeat=len(MONOTONE_FACTORS)):
            m = pr_u
            for name, b in zip(MONOTONE_FACTORS, bits):
                p = factors.get((name, u), Fraction(0))
                m *= p if b else 1 - p
                if not m:
                    break
            if m:
                susc = Susceptibility(**{n.lower(): b for n, b in zip(MONOTONE_FACTORS, bits)})
                masses[(canonical_index(susc), u)] = m
    return masses


def parse_population(text: str, normalize: bool = False, mode: str | None = None) -> Population:
    """Parse population-file text.

    Rational literals must sum to exactly one.  Decimal literals are exact
    too unless ``normalize`` is set, in which case a total within 1e-12 of
    one is rescaled to one.  ``mode`` overrides a ``mode`` header.

    Raises :class:`PopFileError` for syntax problems and
    :class:`~truncsc.population.PopulationError` for invalid masses.
    """
    file_mode = None
    cells: dict = {}
    saw_decimal = False
    block = None  # factor probabilities while inside an independent block
    pr_u1 = None
    independent = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        words = raw.split("#", 1)[0].split()
        if not words:
            continue
        head = words[0]
        if block is not None:
            if head == "end" and len(words) == 1:
                if pr_u1 is None:
                    raise PopFileError("independent block needs a 'U <prob>' line", lineno)
                independent = (pr_u1, block)
                block = None
            elif head == "U" and len(words) == 2:
                pr_u1, dec = _number(words[1], lineno)
                saw_decimal |= dec
            elif head in MONOTONE_FACTORS and len(words) == 3:
                p, dec = _number(words[2], lineno)
                if p > 1:
                    raise PopulationError(f"line {lineno}: probability {p} exceeds 1")
                saw_decimal |= dec
                block[(head, _binary(words[1], lineno))] = p
            else:
                raise PopFileError(f"bad line in independent block: {raw.strip()!r}", lineno)
            continue
        if head == "mode":
            if len(words) != 2 or words[1] not in MODES:
                raise PopFileError("expected 'mode monotone' or 'mode general'", lineno)
            if cells or independent:
                raise PopFileError("mode must come before any cells", lineno)
            file_mode = words[1]
        elif head == "cell":
            if len(words) != 4:
                raise PopFileError("expected 'cell <index> <u> <prob>'", lineno)
            if independent:
                raise PopFileError("cannot mix cell lines with an independent block", lineno)
            if not words[1].isdigit():
                raise PopFileError(f"bad type index {words[1]!r}", lineno)
            key = (int(words[1]), _binary(words[2], lineno))
            if key in cells:
                raise PopFileError(f"duplicate cell {key}", lineno)
            cells[key], dec = _number(words[3], lineno)
            saw_decimal |= dec
        elif head == "independent" and len(words) == 1:
            if cells or independent:
                raise PopFileError("only one independent block and no cell lines allowed", lineno)
            block = {}
        else:
            raise PopFileError(f"unknown directive {head!r}", lineno)
    if block is not None:
        raise PopFileError("independent block not closed with 'end'")
    mode = mode or file_mode or "monotone"
    if independent:
        if mode != "monotone":
            raise PopFileError("independent blocks are supported in monotone mode only")
        if independent[0] > 1:
            raise PopulationError(f"Pr(U = 1) = {independent[0]} exceeds 1")
        cells = _expand_independent(*independent)
    if not cells:
        raise PopFileError("no cells given")
    total = sum(cells.values(), Fraction(0))
    if normalize and saw_decimal and total != 1:
        if abs(total - 1) > DECIMAL_TOLERANCE:
            raise PopulationError(f"total mass {float(total)!r} is not within 1e-12 of 1")
        cells = {k: v / total for k, v in cells.items()}
    return Population(cells, mode)


def load_population(path: str | Path, normalize: bool = False, mode: str | None = None) -> Population:
    return parse_population(Path(path).read_text(), normalize=normalize, mode=mode)


def format_population(pop: Population, comments: list[str] | None = None) -> str:
    """Population-file text that parses back to ``pop``."""
    lines = [f"# {c}" if c else "#" for c in comments or []]
    lines.append(f"mode {pop.mode}")
    for cell, p in pop.items():
        lines.append(f"cell {cell.index} {cell.u} {p.numerator}/{p.denominator}")
    return "\n".join(lines) + "\n"


def digest(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()[:16]
