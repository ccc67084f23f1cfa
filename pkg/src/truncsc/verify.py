"""Randomized identity suites over exact populations.

Draw ``i`` of a suite rooted at ``seed`` uses its own generator
(:func:`~truncsc.population.draw_rng`), so each draw is reproducible on
its own.  Besides the random population, every draw also yields boundary
variants in which the positive-effect cells (at ``U = 1``, ``U = 0``, or
both) are removed.  Random weights almost never leave those cells empty.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping

from .estimands import (
    NULL_CONDITION_U0,
    NULL_CONDITION_U1,
    ReductionNotApplicable,
    cross_check,
    estimands_individual,
    null_conditions,
    reduced_crude,
    sace_weighted_average,
)
from .population import Population, PopulationError, draw_rng, random_population
from .predicate import parse, satisfying_cells

SUITES = ("engine-equivalence", "decomposition", "non-negativity", "null-iff")

VARIANTS = ("random", "no-C1", "no-C0", "no-C1-C0")


@dataclass
class Counterexample:
    suite: str
    draw: int
    variant: str
    population: Population
    detail: str


@dataclass
class SuiteReport:
    draws: int
    seed: int
    max_weight: int
    checked: dict = field(default_factory=lambda: {s: 0 for s in SUITES})
    counterexamples: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def count(self, suite: str) -> int:
        return sum(1 for c in self.counterexamples if c.suite == suite)


def variants(pop: Population) -> Iterator[tuple[str, Population]]:
    c1 = satisfying_cells(parse(NULL_CONDITION_U1))
    c0 = satisfying_cells(parse(NULL_CONDITION_U0))
    yield "random", pop
    for name, drop in (("no-C1", c1), ("no-C0", c0), ("no-C1-C0", c1 | c0)):
        try:
            yield name, pop.restricted(lambda c, drop=drop: c not in drop)
        except PopulationError:
            continue


def populations(draws: int, seed: int, max_weight: int = 8) -> Iterator[tuple[int, str, Population]]:
    for i in range(draws):
        for name, pop in variants(random_population(draw_rng(seed, i), max_weight)):
            yield i, name, pop


def run_identity_suite(
    draws: int,
    seed: int,
    max_weight: int = 8,
    formulas: Mapping[str, str] | None = None,
    boundary: bool = True,
) -> SuiteReport:
    """Check engine equivalence, the SACE decomposition, non-negativity and the null-iff theorem."""
    if draws < 1:
        raise ValueError("draws must be at least 1")
    rep = SuiteReport(draws, seed, max_weight)

    def fail(suite, i, variant, pop, detail):
        rep.counterexamples.append(Counterexample(suite, i, variant, pop, detail))

    for i, variant, pop in populations(draws, seed, max_weight):
        if not boundary and variant != "random":
            continue
        cc = cross_check(pop, formulas)
        ind = cc.individual
        rep.checked["engine-equivalence"] += 1
        for name in cc.mismatches():
            fail("engine-equivalence", i, variant, pop,
                 f"{name}: individual={ind.flat()[name]} formula={cc.formula.flat()[name]}")

        if ind.pr_always_survivor:
            rep.checked["decomposition"] += 1
            avg = sace_weighted_average(ind)
            if avg != ind.sace:
                fail("decomposition", i, variant, pop, f"sace={ind.sace} weighted average={avg}")

        rep.checked["non-negativity"] += 1
        negative = [k for k, v in (("sace", ind.sace), ("sace_u[1]", ind.sace_u[1]), ("sace_u[0]", ind.sace_u[0]))
                    if v is not None and v < 0]
        if negative:
            fail("non-negativity", i, variant, pop, ", ".join(f"{k}={ind.flat()[k]}" for k in negative))

        rep.checked["null-iff"] += 1
        nc = null_conditions(pop, ind)
        if not nc.consistent:
            fail("null-iff", i, variant, pop, f"sace={nc.sace} sace_u={nc.sace_u} Pr(C1)={nc.pr_c1} Pr(C0)={nc.pr_c0}")
    return rep


@dataclass
class ReductionReport:
    checked: dict = field(default_factory=lambda: {1: 0, 0: 0})
    failures: list = field(default_factory=list)  # (draw, variant, u, crude_u, reduced)

    @property
    def ok(self) -> bool:
        return not self.failures


def run_reduction_suite(draws: int, seed: int, max_weight: int = 8) -> ReductionReport:
    """Compare ``crude_u`` with its reduced form wherever the ``u`` null condition holds."""
    rep = ReductionReport()
    for i, variant, pop in populations(draws, seed, max_weight):
        for u in (1, 0):
            try:
                crude_u, reduced = reduced_crude(pop, u)
            except ReductionNotApplicable:
                continue
            rep.checked[u] += 1
            if crude_u != reduced:
                rep.failures.append((i, variant, u, crude_u, reduced))
    return rep


def boundary_cases() -> list[tuple[str, Population]]:
    """Hand-built populations on the edges of the null-condition theorem."""
    from fractions import Fraction as F

    return [
        ("P0", Population({(137, 0): F(1, 2), (33, 1): F(1, 2)})),
        ("P1", Population({(137, 0): F(1, 2), (65, 0): F(1, 2)})),
        ("C0 only", Population.point(133, 0)),
        ("C1 only", Population.point(37, 1)),
        ("empty always-survivors", Population.point(1, 0)),
        ("protectables only", Population({(65, 0): F(1, 2), (81, 1): F(1, 2)})),
        ("C1 at u=1, null at u=0", Population({(37, 1): F(1, 3), (137, 0): F(2, 3)})),
        ("type 35 at u=1", Population.point(35, 1)),
        ("type 33 at u=0", Population.point(33, 0)),
    ]


def check_null_iff(pop: Population) -> bool:
    return null_conditions(pop, estimands_individual(pop)).consistent
