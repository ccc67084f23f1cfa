"""Survival, survivor-average and crude estimands, computed two independent ways.

``estimands_individual`` sums potential outcomes cell by cell.
``estimands_formula`` only composes event probabilities of background-factor
predicates; the predicates live in :data:`FORMULAS` as plain DSL strings.
Both return an :class:`EstimandReport`; conditional quantities whose
conditioning event has probability zero are ``None`` (undefined).
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields
from fractions import Fraction
from typing import Mapping, Optional

import numpy as np

from .model import general_from_index, general_response_profile, response_profile
from .population import Population, event_prob
from .predicate import parse

Value = Optional[Fraction]

# Event predicates of the background-factor expressions, one per Pr(.) term.
# Keys name the term: surv_* survival under an arm, as_* always-survivor
# terms, sy_* survivors with Y = 1 under an arm.
FORMULAS: dict[str, str] = {
    # E[S | X = 1]
    "surv_x1_u0": "(A1 | A2) & !U",
    "surv_x1_u1": "(A1 | A2 | A4 | A6) & U",
    # E[S | X = 0]
    "surv_x0_u0": "A1 & !U",
    "surv_x0_u1": "(A1 | A4) & U",
    # Pr(S1 = 1, S0 = 1)
    "as_u0": "A1 & !U",
    "as_u1": "(A1 | A4) & U",
    # E[Y1 | S1 = 1, S0 = 1] numerator
    "as_y1_u0": "A1 & (B1 | B2) & !U",
    "as_y1_u1": "(A1 | A4) & (B1 | B2 | B4 | B6) & U",
    # E[Y0 | S1 = 1, S0 = 1] numerator
    "as_y0_u0": "A1 & B1 & !U",
    "as_y0_u1": "(A1 | A4) & (B1 | B4) & U",
    # E[Y | S = 1, X = 1] numerator
    "sy_x1_u0": "(A1 | A2) & (B1 | B2) & !U",
    "sy_x1_u1": "(A1 | A2 | A4 | A6) & (B1 | B2 | B4 | B6) & U",
    # E[Y | S = 1, X = 0] numerator
    "sy_x0_u0": "A1 & B1 & !U",
    "sy_x0_u1": "(A1 | A4) & (B1 | B4) & U",
}

# Always-survivors with a positive individual effect of X on Y, by level of U.
NULL_CONDITION_U1 = "(A1 | A4) & (!B1 & !B4) & (B2 | B6) & U"
NULL_CONDITION_U0 = "A1 & (!B1 & B2) & !U"

# Conditioning sets and outcome events of the reduced crude contrast.
REDUCTION = {
    1: {"x1": "(A1 | A2 | A4 | A6) & U", "x0": "(A1 | A4) & U", "y": "B1 | B4"},
    0: {"x1": "(A1 | A2) & !U", "x0": "A1 & !U", "y": "B1"},
}

GOALS = ("null-sace-nonzero-crude", "effect-modified-sace", "zero-crude-nonzero-sace")


class UnsupportedModeError(ValueError):
    pass


class UndefinedConditionError(ValueError):
    pass


class ReductionNotApplicable(ValueError):
    pass


class SearchFailed(RuntimeError):
    pass


def _ratio(num, den) -> Value:
    if den == 0:
        return None
    return Fraction(num) / Fraction(den)


def _diff(a: Value, b: Value) -> Value:
    if a is None or b is None:
        return None
    return a - b


@dataclass(frozen=True)
class EstimandReport:
    """Every estimand of a population, from one engine.

    Per-``u`` fields are dicts keyed by ``u`` in ``(1, 0)``.  Conditional
    expectations and contrasts are ``None`` when their conditioning event has
    zero probability.
    """

    engine: str
    e_s_x1: Fraction
    e_s_x0: Fraction
    survival_contrast: Fraction
    pr_always_survivor: Fraction
    pr_always_survivor_u: dict
    e_y1_as: Value
    e_y0_as: Value
    sace: Value
    sace_u: dict
    e_y_s1_x1: Value
    e_y_s1_x0: Value
    crude: Value
    e_y_s1_x1_u: dict
    e_y_s1_x0_u: dict
    crude_u: dict = field(default_factory=dict)

    def flat(self) -> dict[str, Value]:
        """Field name to value, with per-``u`` fields expanded as ``name[u]``."""
        out = {}
        for f in fields(self):
            if f.name == "engine":
                continue
            v = getattr(self, f.name)
            if isinstance(v, dict):
                for u in (1, 0):
                    out[f"{f.name}[{u}]"] = v[u]
            else:
                out[f.name] = v
        return out


def _profile_for(pop: Population, cell):
    if pop.mode == "monotone":
        return response_profile(cell.index, cell.u)
    return general_response_profile(general_from_index(cell.index), cell.u)


def estimands_individual(pop: Population) -> EstimandReport:
    """Estimands from potential outcomes summed over the population's cells."""
    # Integer numerators over pop.denominator, keyed by u.
    sx = {x: {0: 0, 1: 0} for x in (0, 1)}
    syx = {x: {0: 0, 1: 0} for x in (0, 1)}
    as_n = {0: 0, 1: 0}
    as_y = {x: {0: 0, 1: 0} for x in (0, 1)}
    for cell, n in pop.numerators().items():
        prof = _profile_for(pop, cell)
        u = cell.u
        for x in (0, 1):
            if prof.survival(x):
                sx[x][u] += n
                syx[x][u] += n * prof.outcome(x)
        if prof.s1 and prof.s0:
            as_n[u] += n
            as_y[1][u] += n * prof.y1
            as_y[0][u] += n * prof.y0

    d = pop.denominator
    tot = lambda m: m[0] + m[1]  # noqa: E731
    e_s_x1 = Fraction(tot(sx[1]), d)
    e_s_x0 = Fraction(tot(sx[0]), d)
    e_y_s1_x1 = _ratio(tot(syx[1]), tot(sx[1]))
    e_y_s1_x0 = _ratio(tot(syx[0]), tot(sx[0]))
    e_y_s1_x1_u = {u: _ratio(syx[1][u], sx[1][u]) for u in (1, 0)}
    e_y_s1_x0_u = {u: _ratio(syx[0][u], sx[0][u]) for u in (1, 0)}
    return EstimandReport(
        engine="individual",
        e_s_x1=e_s_x1,
        e_s_x0=e_s_x0,
        survival_contrast=e_s_x1 - e_s_x0,
        pr_always_survivor=Fraction(tot(as_n), d),
        pr_always_survivor_u={u: Fraction(as_n[u], d) for u in (1, 0)},
        e_y1_as=_ratio(tot(as_y[1]), tot(as_n)),
        e_y0_as=_ratio(tot(as_y[0]), tot(as_n)),
        sace=_ratio(tot(as_y[1]) - tot(as_y[0]), tot(as_n)),
        sace_u={u: _ratio(as_y[1][u] - as_y[0][u], as_n[u]) for u in (1, 0)},
        e_y_s1_x1=e_y_s1_x1,
        e_y_s1_x0=e_y_s1_x0,
        crude=_diff(e_y_s1_x1, e_y_s1_x0),
        e_y_s1_x1_u=e_y_s1_x1_u,
        e_y_s1_x0_u=e_y_s1_x0_u,
        crude_u={u: _diff(e_y_s1_x1_u[u], e_y_s1_x0_u[u]) for u in (1, 0)},
    )


def estimands_formula(pop: Population, formulas: Mapping[str, str] | None = None) -> EstimandReport:
    """Estimands composed from the background-factor event probabilities.

    ``formulas`` overrides :data:`FORMULAS`, which lets a harness check that a
    corrupted table is caught.
    """
    if pop.mode != "monotone":
        raise UnsupportedModeError("background-factor formulas hold for the monotone model only")
    table = FORMULAS if formulas is None else formulas
    pr = {name: event_prob(parse(text), pop) for name, text in table.items()}

    s_x1 = pr["surv_x1_u0"] + pr["surv_x1_u1"]
    s_x0 = pr["surv_x0_u0"] + pr["surv_x0_u1"]
    as_total = pr["as_u0"] + pr["as_u1"]
    y1_as = pr["as_y1_u0"] + pr["as_y1_u1"]
    y0_as = pr["as_y0_u0"] + pr["as_y0_u1"]
    e_y_s1_x1 = _ratio(pr["sy_x1_u0"] + pr["sy_x1_u1"], s_x1)
    e_y_s1_x0 = _ratio(pr["sy_x0_u0"] + pr["sy_x0_u1"], s_x0)
    e_y_s1_x1_u = {u: _ratio(pr[f"sy_x1_u{u}"], pr[f"surv_x1_u{u}"]) for u in (1, 0)}
    e_y_s1_x0_u = {u: _ratio(pr[f"sy_x0_u{u}"], pr[f"surv_x0_u{u}"]) for u in (1, 0)}
    return EstimandReport(
        engine="formula",
        e_s_x1=s_x1,
        e_s_x0=s_x0,
        survival_contrast=(pr["surv_x1_u0"] - pr["surv_x0_u0"]) + (pr["surv_x1_u1"] - pr["surv_x0_u1"]),
        pr_always_survivor=as_total,
        pr_always_survivor_u={u: pr[f"as_u{u}"] for u in (1, 0)},
        e_y1_as=_ratio(y1_as, as_total),
        e_y0_as=_ratio(y0_as, as_total),
        sace=_ratio(y1_as - y0_as, as_total),
        sace_u={u: _ratio(pr[f"as_y1_u{u}"] - pr[f"as_y0_u{u}"], pr[f"as_u{u}"]) for u in (1, 0)},
        e_y_s1_x1=e_y_s1_x1,
        e_y_s1_x0=e_y_s1_x0,
        crude=_diff(e_y_s1_x1, e_y_s1_x0),
        e_y_s1_x1_u=e_y_s1_x1_u,
        e_y_s1_x0_u=e_y_s1_x0_u,
        crude_u={u: _diff(e_y_s1_x1_u[u], e_y_s1_x0_u[u]) for u in (1, 0)},
    )


@dataclass(frozen=True)
class CrossCheck:
    individual: EstimandReport
    formula: EstimandReport
    fields: dict  # name -> bool

    @property
    def ok(self) -> bool:
        return all(self.fields.values())

    def mismatches(self) -> list[str]:
        return [name for name, same in self.fields.items() if not same]


def cross_check(pop: Population, formulas: Mapping[str, str] | None = None) -> CrossCheck:
    """Compare both engines field by field; two undefined values count as equal."""
    ind = estimands_individual(pop)
    frm = estimands_formula(pop, formulas)
    a, b = ind.flat(), frm.flat()
    return CrossCheck(ind, frm, {k: a[k] == b[k] for k in a})


def sace_weighted_average(report: EstimandReport) -> Fraction:
    if not report.pr_always_survivor:
        raise UndefinedConditionError("always-survivor stratum is empty")
    total = Fraction(0)
    for u in (1, 0):
        w = report.pr_always_survivor_u[u]
        if w:
            total += report.sace_u[u] * w / report.pr_always_survivor
    return total


def sace_decomposition_check(pop: Population) -> bool:
    """True iff SACE equals the always-survivor-weighted average of the per-``u`` SACEs."""
    report = estimands_individual(pop)
    return sace_weighted_average(report) == report.sace


@dataclass(frozen=True)
class NullConditionReport:
    pr_c1: Fraction
    pr_c0: Fraction
    sace: Value
    sace_u: dict
    consistent: bool


def null_conditions(pop: Population, report: EstimandReport | None = None) -> NullConditionReport:
    """Probabilities of the two positive-effect conditions and their agreement with SACE."""
    report = report or estimands_individual(pop)
    pr_c1 = event_prob(parse(NULL_CONDITION_U1), pop)
    pr_c0 = event_prob(parse(NULL_CONDITION_U0), pop)
    consistent = True
    if report.sace is not None:
        consistent = (report.sace == 0) == (pr_c1 == 0 and pr_c0 == 0)
        for u, pr_c in ((1, pr_c1), (0, pr_c0)):
            if report.sace_u[u] is not None:
                consistent &= (report.sace_u[u] == 0) == (pr_c == 0)
    return NullConditionReport(pr_c1, pr_c0, report.sace, dict(report.sace_u), consistent)


def reduced_crude(pop: Population, u: int) -> tuple[Value, Fraction]:
    """``(crude_u, reduced form)`` for stratum ``u``.

    Raises :class:`ReductionNotApplicable` unless the null condition for ``u``
    holds and both conditioning events have positive probability.
    """
    nc = null_conditions(pop)
    if (nc.pr_c1 if u == 1 else nc.pr_c0) != 0:
        raise ReductionNotApplicable(f"null condition for u={u} does not hold")
    spec = REDUCTION[u]
    dens = {arm: event_prob(parse(spec[arm]), pop) for arm in ("x1", "x0")}
    if not all(dens.values()):
        raise ReductionNotApplicable(f"a conditioning event for u={u} has probability zero")
    terms = {
        arm: event_prob(parse(f"({spec['y']}) & ({spec[arm]})"), pop) / dens[arm] for arm in dens
    }
    return estimands_individual(pop).crude_u[u], terms["x1"] - terms["x0"]


def crude_reduction_check(pop: Population, u: int) -> bool:
    crude_u, reduced = reduced_crude(pop, u)
    return crude_u == reduced


def _meets(goal: str, r: EstimandReport) -> bool:
    if goal == "null-sace-nonzero-crude":
        return r.sace == 0 and r.crude is not None and r.crude != 0
    if goal == "effect-modified-sace":
        a, b = r.sace_u[1], r.sace_u[0]
        return a is not None and b is not None and a != b
    if goal == "zero-crude-nonzero-sace":
        return r.crude == 0 and r.sace is not None and r.sace > 0
    raise ValueError(f"unknown goal {goal!r}; expected one of {', '.join(GOALS)}")


def search_example(
    goal: str,
    seed: int = 0,
    budget: int = 20000,
    max_support: int = 4,
    max_weight: int = 8,
) -> Population:
    """Random search for a small population that meets ``goal``.

    Candidates put integer weights in ``1..max_weight`` on up to
    ``max_support`` random cells.  The first candidate certified by
    :func:`estimands_individual` is returned; the result depends only on the
    arguments.
    """
    if goal not in GOALS:
        raise ValueError(f"unknown goal {goal!r}; expected one of {', '.join(GOALS)}")
    rng = np.random.default_rng(seed)
    for _ in range(budget):
        k = int(rng.integers(1, max_support + 1))
        codes = rng.choice(512, size=k, replace=False)
        weights = rng.integers(1, max_weight + 1, size=k)
        pop = Population.from_weights({(int(c) // 2 + 1, int(c) % 2): int(w) for c, w in zip(codes, weights)})
        if _meets(goal, estimands_individual(pop)):
            return pop
    raise SearchFailed(f"no population meeting {goal!r} found in {budget} candidates")
