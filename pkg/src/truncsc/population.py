"""Exact probability distributions over (risk-status type, U) cells.

Treatment ``X`` is not part of a cell: it is randomized independently of
every cell, so a population fixes everything needed to compute estimands.
Masses are held as integer numerators over one shared denominator, which
keeps repeated exact sums cheap.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterator, Mapping

import numpy as np

from .model import N_GENERAL_TYPES, N_TYPES, general_from_index
from .predicate import Cell, MODES, Predicate, evaluate_general, parse, satisfying_cells


class PopulationError(ValueError):
    """Invalid masses: negative, out-of-range cell, or total not equal to one."""


class Population:
    """An immutable, validated distribution over cells.

    Parameters
    ----------
    masses : mapping of Cell (or ``(index, u)`` pairs) to probabilities
        Anything :class:`fractions.Fraction` accepts. Zero-mass cells may be
        omitted.
    mode : {"monotone", "general"}
        Selects the index range of cells: 1..256 or 1..2**18.
    """

    __slots__ = ("mode", "denominator", "_num")

    def __init__(self, masses: Mapping, mode: str = "monotone"):
        if mode not in MODES:
            raise PopulationError(f"unknown mode {mode!r}")
        top = N_TYPES if mode == "monotone" else N_GENERAL_TYPES
        fracs: dict[Cell, Fraction] = {}
        for key, value in masses.items():
            cell = Cell(*key)
            if not isinstance(cell.index, (int, np.integer)) or not 1 <= cell.index <= top:
                raise PopulationError(f"type index {cell.index!r} out of range 1..{top}")
            if cell.u not in (0, 1):
                raise PopulationError(f"u must be 0 or 1, got {cell.u!r}")
            p = Fraction(value)
            if p < 0:
                raise PopulationError(f"negative mass {p} at {tuple(cell)}")
            cell = Cell(int(cell.index), int(cell.u))
            fracs[cell] = fracs.get(cell, Fraction(0)) + p
        total = sum(fracs.values(), Fraction(0))
        if total != 1:
            raise PopulationError(f"total mass is {total}, expected exactly 1")
        denom = math.lcm(*(f.denominator for f in fracs.values())) if fracs else 1
        self.mode = mode
        self.denominator = denom
        self._num = {c: f.numerator * (denom // f.denominator) for c, f in sorted(fracs.items()) if f}

    @classmethod
    def from_weights(cls, weights: Mapping, mode: str = "monotone") -> "Population":
        """Normalize nonnegative integer (or rational) weights to total mass one."""
        if all(isinstance(w, int) for w in weights.values()):
            return cls._from_integers(weights, mode)
        total = sum((Fraction(w) for w in weights.values()), Fraction(0))
        if total <= 0:
            raise PopulationError("weights must have positive total")
        return cls({k: Fraction(w) / total for k, w in weights.items()}, mode)

    @classmethod
    def _from_integers(cls, weights: Mapping, mode: str) -> "Population":
        # Integer weights are already numerators over their sum.
        if mode not in MODES:
            raise PopulationError(f"unknown mode {mode!r}")
        total = sum(weights.values())
        if total <= 0 or any(w < 0 for w in weights.values()):
            raise PopulationError("weights must be nonnegative with positive total")
        g = math.gcd(total, *weights.values())
        top = N_TYPES if mode == "monotone" else N_GENERAL_TYPES
        num = {}
        for key, w in sorted(weights.items()):
            cell = Cell(*key)
            if not 1 <= cell.index <= top or cell.u not in (0, 1):
                raise PopulationError(f"bad cell {tuple(cell)}")
            if w:
                num[cell] = num.get(cell, 0) + w // g
        self = object.__new__(cls)
        self.mode, self.denominator, self._num = mode, total // g, num
        return self

    @classmethod
    def point(cls, index: int, u: int, mode: str = "monotone") -> "Population":
        return cls({(index, u): 1}, mode)

    def mass(self, cell) -> Fraction:
        return Fraction(self._num.get(Cell(*cell), 0), self.denominator)

    def numerators(self) -> dict[Cell, int]:
        """Masses scaled by :attr:`denominator`, zero cells omitted."""
        return dict(self._num)

    def support(self) -> list[Cell]:
        return list(self._num)

    def items(self) -> Iterator[tuple[Cell, Fraction]]:
        for c, n in self._num.items():
            yield c, Fraction(n, self.denominator)

    def __iter__(self):
        return iter(self._num)

    def __len__(self) -> int:
        return len(self._num)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Population):
            return NotImplemented
        return self.mode == other.mode and dict(self.items()) == dict(other.items())

    def __hash__(self) -> int:
        return hash((self.mode, tuple(self.items())))

    def __repr__(self) -> str:
        body = ", ".join(f"({c.index},{c.u}): {p}" for c, p in self.items())
        return f"Population({{{body}}}, mode={self.mode!r})"

    def restricted(self, keep) -> "Population":
        """Renormalized copy keeping only cells for which ``keep(cell)`` is true."""
        return Population.from_weights({c: n for c, n in self._num.items() if keep(c)}, self.mode)


def event_prob(p: Predicate | str, pop: Population) -> Fraction:
    """Exact probability that a cell drawn from ``pop`` satisfies ``p``."""
    if isinstance(p, str):
        p = parse(p, pop.mode)
    if pop.mode == "monotone":
        cells = satisfying_cells(p)
        total = sum(n for c, n in pop._num.items() if c in cells)
    else:
        total = sum(
            n
            for c, n in pop._num.items()
            if evaluate_general(p, general_from_index(c.index).as_dict(), c.u)
        )
    return Fraction(total, pop.denominator)


ALL_CELLS = tuple(Cell(i, u) for i in range(1, N_TYPES + 1) for u in (0, 1))


def random_population(rng: np.random.Generator, max_weight: int = 8) -> Population:
    """Draw integer weights uniformly from ``0..max_weight`` on all 512 cells and normalize."""
    while True:
        w = rng.integers(0, max_weight + 1, size=len(ALL_CELLS))
        if w.sum() > 0:
            return Population.from_weights({c: int(x) for c, x in zip(ALL_CELLS, w) if x})


def draw_rng(seed: int, draw: int) -> np.random.Generator:
    """Independent generator for draw ``draw`` of a suite rooted at ``seed``."""
    return np.random.default_rng([seed, draw])
