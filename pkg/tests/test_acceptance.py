"""Acceptance gate: one recorded pass/fail line per criterion."""

import csv
import io
import math
import time
from fractions import Fraction as F

from truncsc.cli import main
from truncsc.estimands import estimands_individual, null_conditions
from truncsc.model import (
    N_TYPES,
    general_response_profile,
    response_profile,
    type_from_index,
)
from truncsc.population import Population
from truncsc.popfile import load_population
from truncsc.sim import replicate
from truncsc.tables import verify_table1
from truncsc.verify import boundary_cases, check_null_iff, run_identity_suite, run_reduction_suite

DRAWS, SEED = 1000, 1

# index -> (factors present, S/Y responses keyed by (u, x)); Y is None when S = 0
NARRATIVES = {
    1: ((), {(1, 1): (0, None), (1, 0): (0, None), (0, 1): (0, None), (0, 0): (0, None)}),
    17: (("A6",), {(1, 1): (1, 0), (1, 0): (0, None), (0, 1): (0, None), (0, 0): (0, None)}),
    33: (("A4",), {(1, 1): (1, 0), (1, 0): (1, 0), (0, 1): (0, None), (0, 0): (0, None)}),
    35: (("A4", "B4"), {(1, 1): (1, 1), (1, 0): (1, 1), (0, 1): (0, None), (0, 0): (0, None)}),
    65: (("A2",), {(1, 1): (1, 0), (1, 0): (0, None), (0, 1): (1, 0), (0, 0): (0, None)}),
    129: (("A1",), {(1, 1): (1, 0), (1, 0): (1, 0), (0, 1): (1, 0), (0, 0): (1, 0)}),
    137: (("A1", "B1"), {(1, 1): (1, 1), (1, 0): (1, 1), (0, 1): (1, 1), (0, 0): (1, 1)}),
}

_identity = {}


def identity_report():
    if "rep" not in _identity:
        start = time.perf_counter()
        _identity["rep"] = run_identity_suite(DRAWS, SEED)
        _identity["seconds"] = time.perf_counter() - start
    return _identity["rep"], _identity["seconds"]


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), stdout=out, stderr=io.StringIO())
    return code, out.getvalue()


def csv_body(text):
    return list(csv.reader(io.StringIO("\n".join(l for l in text.splitlines() if not l.startswith("#")))))


def test_criterion_01_type_space(criterion):
    start = time.perf_counter()
    code, out = run("enumerate", "--format", "csv")
    seconds = time.perf_counter() - start
    rows = csv_body(out)[1:]
    bad = []
    for index, (factors, responses) in NARRATIVES.items():
        present = {k for k, v in type_from_index(index).as_dict().items() if v}
        row = rows[index - 1]
        if int(row[0]) != index or present != set(factors):
            bad.append(index)
            continue
        for u in (1, 0):
            prof = response_profile(index, u)
            for x in (1, 0):
                if (prof.survival(x), prof.outcome(x)) != responses[(u, x)]:
                    bad.append(index)
    ok = code == 0 and len(rows) == 256 and not bad and seconds < 1
    criterion(1, "256 risk-status types, narrative rows exact, < 1 s", ok, f"{len(rows)} rows, mismatched {bad}, {seconds:.3f} s")


def test_criterion_02_table1(criterion):
    results = verify_table1()
    code, out = run("classify")
    counts = [r.actual_count for r in results]
    ok = code == 0 and all(r.passed for r in results) and counts == [192, 156, 128, 96, 64, 32, 32]
    criterion(2, "always-survivor classification counts and index lists exact", ok, f"counts {counts}")


def test_criterion_03_engine_equivalence(criterion):
    rep, seconds = identity_report()
    n = rep.count("engine-equivalence")
    ok = n == 0 and rep.checked["engine-equivalence"] >= DRAWS and seconds < 30
    criterion(3, "formula engine equals individual engine", ok,
              f"{rep.checked['engine-equivalence']} populations, {n} counterexamples, {seconds:.1f} s")


def test_criterion_04_decomposition(criterion):
    rep, _ = identity_report()
    n = rep.count("decomposition")
    criterion(4, "SACE is the weighted average of SACE_u", n == 0 and rep.checked["decomposition"] > 0,
              f"{rep.checked['decomposition']} populations, {n} counterexamples")


def test_criterion_05_non_negativity(criterion):
    rep, _ = identity_report()
    n = rep.count("non-negativity")
    criterion(5, "SACE and SACE_u non-negative", n == 0, f"{rep.checked['non-negativity']} populations, {n} counterexamples")


def test_criterion_06_null_iff(criterion):
    rep, _ = identity_report()
    n = rep.count("null-iff")
    boundary_bad = [name for name, pop in boundary_cases() if not check_null_iff(pop)]
    criterion(6, "SACE = 0 iff Pr(C1) = Pr(C0) = 0", n == 0 and not boundary_bad,
              f"{rep.checked['null-iff']} random + {len(boundary_cases())} boundary, {n + len(boundary_bad)} counterexamples")


def test_criterion_07_crude_reduction(criterion):
    # Known to fail: see the project decisions ledger.  The check is run as
    # stated; the random no-C1 / no-C0 variants make it non-vacuous.
    rep = run_reduction_suite(DRAWS, SEED)
    applicable = rep.checked[1] + rep.checked[0]
    detail = f"{applicable} applicable, {len(rep.failures)} mismatches"
    if rep.failures:
        i, variant, u, crude_u, reduced = rep.failures[0]
        detail += f"; first: draw {i} {variant} u={u} crude_u={crude_u} reduced={reduced}"
    criterion(7, "crude_u equals the reduced two-term form under the null condition",
              applicable > 0 and rep.ok, detail)


def test_criterion_08_noncausal_crude(criterion, tmp_path):
    r = estimands_individual(Population({(137, 0): F(1, 2), (65, 0): F(1, 2)}))
    out_path = tmp_path / "found.txt"
    code, _ = run("search", "--goal", "null-sace-nonzero-crude", "--out", str(out_path))
    found = estimands_individual(load_population(out_path)) if code == 0 else None
    certified = found is not None and found.sace == 0 and found.crude not in (None, 0)
    certified = certified and null_conditions(load_population(out_path)).consistent
    cert_text = out_path.read_text() if out_path.exists() else ""
    certified = certified and f"crude = {found.crude}" in cert_text
    ok = r.sace == 0 and r.crude == F(-1, 2) and certified
    criterion(8, "P1 has SACE 0 and crude -1/2; search self-certifies", ok,
              f"sace={r.sace} crude={r.crude}, found crude={found.crude if found else None}")


def test_criterion_09_simulation(criterion):
    pop = Population({(137, 0): F(1, 2), (65, 0): F(1, 2)})
    start = time.perf_counter()
    s = replicate(pop, 10 ** 5, 50, seed=7)
    seconds = time.perf_counter() - start
    again = replicate(pop, 10 ** 5, 50, seed=7)
    bound = 3 * s.sd_crude / math.sqrt(s.reps)
    ok = abs(s.mean_crude + 0.5) <= bound and again == s and seconds < 10
    criterion(9, "simulated crude converges to -1/2, deterministic, < 10 s", ok,
              f"mean={s.mean_crude:.6f} bound={bound:.6f} {seconds:.2f} s")


def test_criterion_10_general_agreement(criterion):
    start = time.perf_counter()
    bad = 0
    for index in range(1, N_TYPES + 1):
        susc = type_from_index(index)
        lifted = susc.lift()
        for u in (1, 0):
            if response_profile(susc, u) != general_response_profile(lifted, u):
                bad += 1
    seconds = time.perf_counter() - start
    criterion(10, "general model agrees with monotone model on lifted types", bad == 0 and seconds < 1,
              f"{bad} disagreements, {seconds:.3f} s")
