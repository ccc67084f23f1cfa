"""Finite randomized trials with outcomes truncated by death.

Generators are numpy ``PCG64``.  Replicate ``r`` of a run with root seed
``seed`` uses ``PCG64(seed ^ r)``, so replicates are independent of the
order in which they execute.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .estimands import estimands_individual
from .model import general_from_index, general_response_profile, response_profile
from .population import Population

UNDEFINED = -1  # outcome code in the arrays below


@dataclass(frozen=True)
class TrialRecord:
    x: int
    u: int
    s: int
    y: Optional[int]
    type_index: int


class Trial(Sequence[TrialRecord]):
    """Records of one simulated trial, backed by column arrays.

    ``y`` uses ``-1`` for undefined outcomes; indexing yields
    :class:`TrialRecord` objects with ``y=None`` instead.
    """

    def __init__(self, x, u, s, y, type_index):
        self.x, self.u, self.s, self.y, self.type_index = (
            np.asarray(a, dtype=np.int64) for a in (x, u, s, y, type_index)
        )
        for a in (self.x, self.u, self.s, self.y, self.type_index):
            a.setflags(write=False)

    def __len__(self) -> int:
        return len(self.x)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        y = int(self.y[i])
        return TrialRecord(int(self.x[i]), int(self.u[i]), int(self.s[i]), None if y == UNDEFINED else y, int(self.type_index[i]))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Trial):
            return NotImplemented
        return all(np.array_equal(getattr(self, k), getattr(other, k)) for k in ("x", "u", "s", "y", "type_index"))

    def to_csv(self, diagnostics: bool = False) -> str:
        """``x,u,s,y`` rows, ``y`` empty when undefined; ``type_index`` only with ``diagnostics``."""
        cols = ["x", "u", "s", "y"] + (["type_index"] if diagnostics else [])
        lines = [",".join(cols)]
        for r in self:
            vals = [r.x, r.u, r.s, "" if r.y is None else r.y]
            if diagnostics:
                vals.append(r.type_index)
            lines.append(",".join(map(str, vals)))
        return "\n".join(lines) + "\n"


def _cell_tables(pop: Population):
    cells = pop.support()
    prof = [
        response_profile(c.index, c.u)
        if pop.mode == "monotone"
        else general_response_profile(general_from_index(c.index), c.u)
        for c in cells
    ]
    idx = np.array([c.index for c in cells])
    u = np.array([c.u for c in cells])
    s = np.array([[p.s0, p.s1] for p in prof])
    y = np.array([[UNDEFINED if v is None else v for v in (p.y0, p.y1)] for p in prof])
    nums = [n for n in pop.numerators().values()]
    return idx, u, s, y, nums


def _draw_cells(rng: np.random.Generator, nums: list[int], denom: int, n: int) -> np.ndarray:
    cum = np.cumsum(np.array(nums, dtype=object))
    if denom < 2 ** 62:
        draws = rng.integers(0, denom, size=n)
        return np.searchsorted(cum.astype(np.int64), draws, side="right")
    probs = np.array([float(Fraction(k, denom)) for k in nums])
    return rng.choice(len(nums), size=n, p=probs / probs.sum())


def sample_trial(pop: Population, n: int, p_treat=Fraction(1, 2), seed: int = 0) -> Trial:
    """Simulate ``n`` independent participants; ``x ~ Bernoulli(p_treat)`` independent of cell."""
    if n < 1:
        raise ValueError("n must be at least 1")
    p_treat = Fraction(p_treat)
    if not 0 < p_treat < 1:
        raise ValueError(f"p_treat must lie strictly between 0 and 1, got {p_treat}")
    rng = np.random.Generator(np.random.PCG64(seed))
    return _sample(rng, _cell_tables(pop), pop.denominator, n, p_treat)


def _sample(rng, tables, denom: int, n: int, p_treat: Fraction) -> Trial:
    idx, u, s, y, nums = tables
    k = _draw_cells(rng, nums, denom, n)
    if p_treat.denominator < 2 ** 62:
        x = (rng.integers(0, p_treat.denominator, size=n) < p_treat.numerator).astype(np.int64)
    else:
        x = (rng.random(n) < float(p_treat)).astype(np.int64)
    return Trial(x, u[k], s[k, x], y[k, x], idx[k])


@dataclass(frozen=True)
class CrudeEstimate:
    overall: Optional[float]
    by_u: dict


def _arm_diff(y, s, x, mask) -> Optional[float]:
    means = []
    for arm in (1, 0):
        sel = mask & (x == arm) & (s == 1)
        if not sel.any():
            return None
        means.append(y[sel].mean())
    return float(means[0] - means[1])


def crude_estimator(records: Trial | Iterable[TrialRecord]) -> CrudeEstimate:
    """Difference in mean outcome between surviving treated and surviving untreated participants.

    An arm with no survivors makes the estimate ``None``.
    """
    if not isinstance(records, Trial):
        recs = list(records)
        records = Trial(
            [r.x for r in recs],
            [r.u for r in recs],
            [r.s for r in recs],
            [UNDEFINED if r.y is None else r.y for r in recs],
            [r.type_index for r in recs],
        )
    x, u, s, y = records.x, records.u, records.s, records.y
    everyone = np.ones(len(x), dtype=bool)
    return CrudeEstimate(_arm_diff(y, s, x, everyone), {v: _arm_diff(y, s, x, u == v) for v in (1, 0)})


@dataclass(frozen=True)
class SimulationSummary:
    n: int
    reps: int
    seed: int
    p_treat: Fraction
    mean_crude: Optional[float]
    sd_crude: Optional[float]
    defined_reps: int
    mean_crude_u: dict
    population_crude: Optional[Fraction]
    population_crude_u: dict
    population_sace: Optional[Fraction]


def _mean_sd(values: list[float]) -> tuple[Optional[float], Optional[float]]:
    if not values:
        return None, None
    a = np.array(values)
    sd = float(a.std(ddof=1)) if len(a) > 1 else 0.0
    return float(a.mean()), sd


def replicate(pop: Population, n: int, reps: int, seed: int = 0, p_treat=Fraction(1, 2)) -> SimulationSummary:
    """Run ``reps`` trials and summarize the crude estimates against population values.

    Replicates with an undefined crude estimate are left out of the mean and
    SD; ``defined_reps`` counts the ones used.  A single replicate has SD 0.
    """
    if n < 1 or reps < 1:
        raise ValueError("n and reps must be at least 1")
    p_treat = Fraction(p_treat)
    if not 0 < p_treat < 1:
        raise ValueError(f"p_treat must lie strictly between 0 and 1, got {p_treat}")
    tables = _cell_tables(pop)
    overall, per_u = [], {1: [], 0: []}
    for r in range(reps):
        rng = np.random.Generator(np.random.PCG64(seed ^ r))
        est = crude_estimator(_sample(rng, tables, pop.denominator, n, p_treat))
        if est.overall is not None:
            overall.append(est.overall)
        for v in (1, 0):
            if est.by_u[v] is not None:
                per_u[v].append(est.by_u[v])
    mean, sd = _mean_sd(overall)
    report = estimands_individual(pop)
    return SimulationSummary(
        n=n,
        reps=reps,
        seed=seed,
        p_treat=p_treat,
        mean_crude=mean,
        sd_crude=sd,
        defined_reps=len(overall),
        mean_crude_u={v: _mean_sd(per_u[v])[0] for v in (1, 0)},
        population_crude=report.crude,
        population_crude_u=dict(report.crude_u),
        population_sace=report.sace,
    )


def within_three_sigma(summary: SimulationSummary) -> Optional[bool]:
    """Whether ``mean_crude`` is within ``3 * sd / sqrt(defined_reps)`` of the population crude."""
    if summary.mean_crude is None or summary.population_crude is None:
        return None
    half = 3 * summary.sd_crude / math.sqrt(summary.defined_reps)
    return abs(summary.mean_crude - float(summary.population_crude)) <= half
