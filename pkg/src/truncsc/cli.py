"""Command-line interface: ``truncsc <command> ...``.

Every report starts with ``#`` envelope lines (command, input digest, seed)
and ends with a ``# status:`` line, so identical inputs give byte-identical
output.  Exit codes: 0 success, 1 a check failed, 2 input error,
3 invalid population masses, 4 search budget exhausted.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
from fractions import Fraction
from pathlib import Path

from . import estimands as est
from .model import (
    GENERAL_FACTORS,
    N_GENERAL_TYPES,
    PrincipalStratum,
    general_from_index,
    general_response_profile,
)
from .popfile import PopFileError, digest, format_population, parse_population
from .population import PopulationError
from .predicate import ParseError, parse
from .sim import replicate, sample_trial, within_three_sigma
from .tables import (
    COLUMN_ORDER,
    format_ranges,
    generate_table_s1,
    render_table_s1_csv,
    render_table_s1_text,
    table1_consistency,
    verify_table1,
)
from .verify import SUITES, run_identity_suite

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_INVALID, EXIT_SEARCH = 0, 1, 2, 3, 4


class CLIError(Exception):
    def __init__(self, message: str, code: int = EXIT_INPUT):
        super().__init__(message)
        self.code = code


def fmt(v) -> str:
    """Exact text for a value; undefined is ``undefined``."""
    if v is None:
        return "undefined"
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


def _csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in rows:
        w.writerow(["" if v is None else (str(v) if not isinstance(v, float) else f"{v:.6f}") for v in row])
    return buf.getvalue()


def _align(rows: list[list[str]]) -> str:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows) + "\n"


class Report:
    def __init__(self, command: str, inputs: bytes, seed=None):
        self.head = [f"# truncsc {command}", f"# inputs: {digest(inputs)}"]
        if seed is not None:
            self.head.append(f"# seed: {seed}")
        self.body: list[str] = []
        self.flags: dict[str, bool] = {}

    def add(self, text: str) -> None:
        self.body.append(text if text.endswith("\n") else text + "\n")

    def render(self) -> str:
        tail = [f"# check {name}: {'PASS' if ok else 'FAIL'}" for name, ok in self.flags.items()]
        tail.append(f"# status: {'PASS' if all(self.flags.values()) else 'FAIL'}")
        return "\n".join(self.head) + "\n" + "".join(self.body) + "\n".join(tail) + "\n"


def _load(args):
    path = Path(args.popfile)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise CLIError(f"cannot read {path}: {e.strerror}")
    try:
        pop = parse_population(data.decode(), normalize=args.normalize, mode=args.mode)
    except PopFileError as e:
        raise CLIError(f"{path}: {e}")
    except PopulationError as e:
        raise CLIError(f"{path}: {e}", EXIT_INVALID)
    return pop, data


def _require_monotone(args, command: str) -> None:
    if args.mode == "general":
        raise CLIError(f"--mode general is not supported by {command}")


# --- commands --------------------------------------------------------------


def _general_rows(pred):
    header = ["index"] + [f.lower() for f in GENERAL_FACTORS]
    header += [f"{k}_x{x}_u{u}" for k in ("s", "y", "yas") for x, u in COLUMN_ORDER]
    rows = []
    for i in range(1, N_GENERAL_TYPES + 1):
        susc = general_from_index(i)
        env = susc.as_dict()
        if pred is not None and not pred.evaluate({**env, "U": 0}) and not pred.evaluate({**env, "U": 1}):
            continue
        profs = {u: general_response_profile(susc, u) for u in (0, 1)}
        s = [profs[u].survival(x) for x, u in COLUMN_ORDER]
        y = [profs[u].outcome(x) for x, u in COLUMN_ORDER]
        yas = [profs[u].outcome(x) if profs[u].stratum is PrincipalStratum.ALWAYS_SURVIVOR else None for x, u in COLUMN_ORDER]
        rows.append([i, *env.values(), *s, *y, *yas])
    return header, rows


def cmd_enumerate(args) -> tuple[str, int]:
    mode = args.mode or "monotone"
    pred = parse(args.filter, mode) if args.filter else None
    rep = Report("enumerate", f"mode={mode};filter={args.filter or ''};format={args.format}".encode())
    if pred is not None and "U" in pred.literals():
        raise CLIError("enumerate filters select types and cannot use U")
    if mode == "monotone":
        rows = [r for r in generate_table_s1() if pred is None or pred.evaluate(r.bits.as_dict())]
        rep.add(render_table_s1_csv(rows) if args.format == "csv" else render_table_s1_text(rows))
    else:
        header, rows = _general_rows(pred)
        if args.format == "csv":
            rep.add(_csv([header, *rows]))
        else:
            rep.add(_align([header, *[["." if v is None else str(v) for v in r] for r in rows]]))
    rep.add(f"# rows: {len(rows)}")
    return rep.render(), EXIT_OK


def cmd_classify(args) -> tuple[str, int]:
    _require_monotone(args, "classify")
    rep = Report("classify", f"format={args.format}".encode())
    results = verify_table1()
    if args.format == "csv":
        rows = [["description", "expression", "expected_count", "actual_count", "expected_types", "actual_types", "status"]]
        for r in results:
            rows.append([r.row.description, r.row.expression, r.row.expected_count, r.actual_count,
                         format_ranges(r.row.expected_indices), format_ranges(r.actual_indices),
                         "PASS" if r.passed else "FAIL"])
        rep.add(_csv(rows))
    else:
        for n, r in enumerate(results, 1):
            rep.add(f"[{'PASS' if r.passed else 'FAIL'}] {n}. {r.row.description}")
            rep.add(f"    expression: {r.row.expression}")
            rep.add(f"    count:      expected {r.row.expected_count}, actual {r.actual_count}")
            rep.add(f"    types:      {format_ranges(r.actual_indices)}")
            if not r.passed:
                rep.add(f"    expected:   {format_ranges(r.row.expected_indices)}")
        rep.add(f"rows passed: {sum(r.passed for r in results)}/{len(results)}")
    for n, r in enumerate(results, 1):
        rep.flags[f"table1 row {n}"] = r.passed
    for name, ok in table1_consistency().items():
        rep.flags[name] = ok
    return rep.render(), EXIT_OK if all(rep.flags.values()) else EXIT_FAIL


def _estimate_rows(ind, frm, by_u):
    a = ind.flat()
    b = frm.flat() if frm else {}
    rows = []
    for name, v in a.items():
        if "[" in name and not by_u:
            continue
        if frm is None:
            rows.append((name, v, None, None))
        else:
            rows.append((name, v, b[name], v == b[name]))
    return rows


def cmd_estimate(args) -> tuple[str, int]:
    pop, data = _load(args)
    rep = Report("estimate", data + f";mode={pop.mode};by_u={args.by_u}".encode())
    ind = est.estimands_individual(pop)
    frm = est.estimands_formula(pop) if pop.mode == "monotone" else None
    rows = _estimate_rows(ind, frm, args.by_u)
    if args.format == "csv":
        rep.add(_csv([["field", "individual", "formula", "equal"]]
                     + [[n, a, b, "" if eq is None else ("yes" if eq else "NO")] for n, a, b, eq in rows]))
    else:
        table = [["field", "individual", "formula", "equal"]]
        for n, a, b, eq in rows:
            table.append([n, fmt(a), "n/a" if frm is None else fmt(b), "n/a" if eq is None else ("yes" if eq else "NO")])
        rep.add(_align(table))
    if frm is not None:
        mismatches = [k for k, v in ind.flat().items() if v != frm.flat()[k]]
        rep.flags["engines agree on every field"] = not mismatches
        if mismatches:
            rep.add("mismatched fields: " + ", ".join(mismatches))
    else:
        rep.add("general mode: formula engine not applicable, individual engine only")
    return rep.render(), EXIT_OK if all(rep.flags.values()) else EXIT_FAIL


def _corrupted(specs: list[str]):
    if not specs:
        return None
    table = dict(est.FORMULAS)
    for spec in specs:
        key, sep, expr = spec.partition("=")
        if not sep or key not in table:
            raise CLIError(f"--corrupt-formula expects KEY=EXPR with KEY in the formula table, got {spec!r}")
        parse(expr)
        table[key] = expr
    return table


def cmd_verify(args) -> tuple[str, int]:
    _require_monotone(args, "verify")
    if args.draws < 1:
        raise CLIError("--draws must be at least 1")
    formulas = _corrupted(args.corrupt_formula)
    inputs = f"draws={args.draws};max_weight={args.max_weight};corrupt={args.corrupt_formula}".encode()
    rep = Report("verify", inputs, args.seed)
    suite = run_identity_suite(args.draws, args.seed, args.max_weight, formulas)
    table = [["suite", "populations", "counterexamples"]]
    for name in SUITES:
        table.append([name, str(suite.checked[name]), str(suite.count(name))])
        rep.flags[name] = suite.count(name) == 0
    if args.format == "csv":
        rep.add(_csv(table))
    else:
        rep.add(f"random draws: {args.draws} (each with boundary variants), max weight {args.max_weight}")
        rep.add(_align(table))
    for c in suite.counterexamples[: args.show]:
        rep.add(f"counterexample [{c.suite}] draw {c.draw} ({c.variant}): {c.detail}")
        if args.format != "csv":
            rep.add("".join(f"    {line}\n" for line in format_population(c.population).splitlines()))
    if len(suite.counterexamples) > args.show:
        rep.add(f"... {len(suite.counterexamples) - args.show} more counterexamples")
    return rep.render(), EXIT_OK if suite.ok else EXIT_FAIL


def _reduction_lines(pop):
    out = []
    for u in (1, 0):
        try:
            crude_u, reduced = est.reduced_crude(pop, u)
        except est.ReductionNotApplicable as e:
            out.append((u, None, None, f"not applicable ({e})"))
            continue
        verdict = "match" if crude_u == reduced else "MISMATCH"
        out.append((u, crude_u, reduced, verdict))
    return out


def cmd_null_check(args) -> tuple[str, int]:
    _require_monotone(args, "null-check")
    pop, data = _load(args)
    rep = Report("null-check", data)
    ind = est.estimands_individual(pop)
    nc = est.null_conditions(pop, ind)
    values = [
        ("Pr(C1)", nc.pr_c1),
        ("Pr(C0)", nc.pr_c0),
        ("sace", ind.sace),
        ("sace_u[1]", ind.sace_u[1]),
        ("sace_u[0]", ind.sace_u[0]),
        ("crude", ind.crude),
        ("crude_u[1]", ind.crude_u[1]),
        ("crude_u[0]", ind.crude_u[0]),
        ("pr_always_survivor_u[1]", ind.pr_always_survivor_u[1]),
        ("pr_always_survivor_u[0]", ind.pr_always_survivor_u[0]),
    ]
    reductions = _reduction_lines(pop)
    if args.format == "csv":
        rows = [["quantity", "value"], *values]
        rows += [[f"reduction_u{u}", verdict] for u, _, _, verdict in reductions]
        rep.add(_csv(rows))
    else:
        rep.add("C1 = " + est.NULL_CONDITION_U1)
        rep.add("C0 = " + est.NULL_CONDITION_U0)
        rep.add(_align([[k, fmt(v)] for k, v in values]))
        rep.add(f"null conditions consistent with SACE: {'yes' if nc.consistent else 'NO'}")
        for u, crude_u, reduced, verdict in reductions:
            if crude_u is None and reduced is None:
                rep.add(f"crude reduction u={u}: {verdict}")
            else:
                rep.add(f"crude reduction u={u}: crude_u={fmt(crude_u)} reduced={fmt(reduced)} -> {verdict}")
    rep.flags["null-iff"] = nc.consistent
    return rep.render(), EXIT_OK if nc.consistent else EXIT_FAIL


def cmd_simulate(args) -> tuple[str, int]:
    _require_monotone(args, "simulate")
    pop, data = _load(args)
    if args.n < 1 or args.reps < 1:
        raise CLIError("--n and --reps must be at least 1")
    try:
        p_treat = Fraction(args.p_treat)
    except (ValueError, ZeroDivisionError):
        raise CLIError(f"bad --p-treat {args.p_treat!r}")
    if not 0 < p_treat < 1:
        raise CLIError("--p-treat must lie strictly between 0 and 1")
    rep = Report("simulate", data + f";n={args.n};reps={args.reps};p_treat={p_treat}".encode(), args.seed)
    s = replicate(pop, args.n, args.reps, args.seed, p_treat)
    values = [
        ("n", s.n), ("reps", s.reps), ("p_treat", s.p_treat), ("rng", "PCG64, replicate r seeded with seed^r"),
        ("mean_crude", s.mean_crude), ("sd_crude", s.sd_crude), ("defined_reps", s.defined_reps),
        ("mean_crude_u[1]", s.mean_crude_u[1]), ("mean_crude_u[0]", s.mean_crude_u[0]),
        ("population_crude", s.population_crude), ("population_crude_u[1]", s.population_crude_u[1]),
        ("population_crude_u[0]", s.population_crude_u[0]), ("population_sace", s.population_sace),
    ]
    if args.format == "csv":
        rep.add(_csv([["quantity", "value"], *values]))
    else:
        rep.add(_align([[k, fmt(v)] for k, v in values]))
    close = within_three_sigma(s)
    if close is not None:
        rep.add(f"mean crude within 3*sd/sqrt(reps) of population crude: {'yes' if close else 'no'}")
    if args.records:
        trial = sample_trial(pop, args.n, p_treat, args.seed)
        Path(args.records).write_text(trial.to_csv(diagnostics=args.diagnostics))
    return rep.render(), EXIT_OK


def cmd_search(args) -> tuple[str, int]:
    _require_monotone(args, "search")
    if args.goal not in est.GOALS:
        raise CLIError(f"unknown goal {args.goal!r}; choose from {', '.join(est.GOALS)}")
    try:
        pop = est.search_example(args.goal, args.seed, args.budget)
    except est.SearchFailed as e:
        raise CLIError(str(e), EXIT_SEARCH)
    r = est.estimands_individual(pop)
    cert = [f"certificate for goal {args.goal} (seed {args.seed}, budget {args.budget})"]
    cert += [f"  {k} = {fmt(v)}" for k, v in r.flat().items()]
    text = format_population(pop, cert)
    rep = Report("search", f"goal={args.goal};budget={args.budget}".encode(), args.seed)
    rep.flags[args.goal] = True
    if args.out:
        Path(args.out).write_text(text)
        rep.add(f"wrote {args.out}")
    rep.add(text)
    return rep.render(), EXIT_OK


# --- parser ------------------------------------------------------------------


def _globals(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--format", choices=("text", "csv"), default=d("text"))
    parser.add_argument("--mode", choices=("monotone", "general"), default=d(None),
                        help="literal alphabet and population model (default: monotone or the file's header)")
    parser.add_argument("--seed", type=int, default=d(0))
    parser.add_argument("--normalize", action="store_true", default=d(False),
                        help="rescale decimal population masses whose total is within 1e-12 of 1")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="truncsc", description="Sufficient-cause model of truncation by death.")
    _globals(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _globals(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", parents=[common], help="list risk-status types with their responses")
    p.add_argument("--filter", help="predicate over factor literals, e.g. 'A6 & !A1'")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("classify", parents=[common], help="regenerate and check the always-survivor classification")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("estimate", parents=[common], help="estimands of a population by both engines")
    p.add_argument("popfile")
    p.add_argument("--by-u", action="store_true", help="also show per-U quantities")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("verify", parents=[common], help="randomized identity suites")
    p.add_argument("--draws", type=int, default=1000)
    p.add_argument("--max-weight", type=int, default=8)
    p.add_argument("--show", type=int, default=5, help="counterexamples printed in full")
    p.add_argument("--corrupt-formula", action="append", default=[], help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("null-check", parents=[common], help="null-SACE conditions of a population")
    p.add_argument("popfile")
    p.set_defaults(func=cmd_null_check)

    p = sub.add_parser("simulate", parents=[common], help="replicated randomized trials")
    p.add_argument("popfile")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--p-treat", default="1/2")
    p.add_argument("--records", help="write the first replicate's records as CSV")
    p.add_argument("--diagnostics", action="store_true", help="include latent type_index in --records")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("search", parents=[common], help="find a population meeting a goal")
    p.add_argument("--goal", required=True, help=", ".join(est.GOALS))
    p.add_argument("--budget", type=int, default=20000)
    p.add_argument("--out", help="also write the population file here")
    p.set_defaults(func=cmd_search)
    return parser


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        text, code = args.func(args)
    except ParseError as e:
        print(f"truncsc: parse error: {e}", file=stderr)
        if e.text:
            print(f"  {e.text}\n  {' ' * e.position}^", file=stderr)
        return EXIT_INPUT
    except CLIError as e:
        print(f"truncsc: {e}", file=stderr)
        return e.code
    stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
