"""Regenerated risk-status table and the always-survivor classification table."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from .model import (
    MONOTONE_FACTORS,
    OutcomeValue,
    PrincipalStratum,
    Susceptibility,
    all_types,
    response_profile,
)
from .predicate import Predicate, count_types, parse

# (x, u) order of the four S / Y / Y(AS) columns.
COLUMN_ORDER = ((1, 1), (0, 1), (1, 0), (0, 0))

CSV_HEADER = (
    ["index"]
    + [f.lower() for f in MONOTONE_FACTORS]
    + [f"s_x{x}_u{u}" for x, u in COLUMN_ORDER]
    + [f"y_x{x}_u{u}" for x, u in COLUMN_ORDER]
    + [f"yas_x{x}_u{u}" for x, u in COLUMN_ORDER]
)


@dataclass(frozen=True)
class TableS1Row:
    index: int
    bits: Susceptibility
    s_columns: tuple[int, ...]
    y_columns: tuple[OutcomeValue, ...]
    y_as_columns: tuple[OutcomeValue, ...]

    def cells(self) -> list:
        return [self.index, *self.bits.as_dict().values(), *self.s_columns, *self.y_columns, *self.y_as_columns]


def generate_table_s1() -> list[TableS1Row]:
    rows = []
    for t in all_types():
        s_cols, y_cols, yas_cols = [], [], []
        for x, u in COLUMN_ORDER:
            prof = response_profile(t, u)
            s_cols.append(prof.survival(x))
            y_cols.append(prof.outcome(x))
            yas_cols.append(prof.outcome(x) if prof.stratum is PrincipalStratum.ALWAYS_SURVIVOR else None)
        rows.append(TableS1Row(t.index, t.susceptibility, tuple(s_cols), tuple(y_cols), tuple(yas_cols)))
    return rows


def _fmt(v, undefined: str) -> str:
    return undefined if v is None else str(v)


def render_table_s1_csv(rows: list[TableS1Row]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in rows:
        w.writerow([_fmt(v, "") for v in row.cells()])
    return buf.getvalue()


def render_table_s1_text(rows: list[TableS1Row]) -> str:
    header = ["type", *MONOTONE_FACTORS]
    header += [f"S{x}{u}" for x, u in COLUMN_ORDER]
    header += [f"Y{x}{u}" for x, u in COLUMN_ORDER]
    header += [f"YAS{x}{u}" for x, u in COLUMN_ORDER]
    widths = [max(4, len(h)) for h in header]
    lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
    for row in rows:
        lines.append("  ".join(_fmt(v, ".").rjust(w) for v, w in zip(row.cells(), widths)))
    lines.append("(Snm/Ynm: X=n, U=m; '.' = undefined)")
    return "\n".join(lines) + "\n"


# --- always-survivor classification --------------------------------------


def parse_ranges(text: str) -> frozenset[int]:
    """``"33-64, 97-256"`` (hyphen or en dash) to the set of integers it lists."""
    out: set[int] = set()
    for part in text.replace("–", "-").split(","):
        part = part.strip()
        if "-" in part:
            lo, hi = (int(x) for x in part.split("-"))
            out.update(range(lo, hi + 1))
        elif part:
            out.add(int(part))
    return frozenset(out)


def format_ranges(indices) -> str:
    """Compact sorted integers into ``"33-64, 97-256"`` form."""
    xs = sorted(indices)
    parts = []
    i = 0
    while i < len(xs):
        j = i
        while j + 1 < len(xs) and xs[j + 1] == xs[j] + 1:
            j += 1
        parts.append(str(xs[i]) if i == j else f"{xs[i]}-{xs[j]}")
        i = j + 1
    return ", ".join(parts)


@dataclass(frozen=True)
class Table1Row:
    description: str
    expression: str
    expected_count: int
    expected_indices: frozenset[int]

    def __post_init__(self) -> None:
        if len(self.expected_indices) != self.expected_count:
            raise ValueError(f"{self.description}: {len(self.expected_indices)} indices listed, count says {self.expected_count}")

    @property
    def predicate(self) -> Predicate:
        return parse(self.expression)


TABLE1 = (
    Table1Row(
        "Always-survivors if U = 1",
        "A1 | A4",
        192,
        parse_ranges("33-64, 97-256"),
    ),
    Table1Row(
        "Always-survivors among whom SACE_{u=1} is null",
        "(A1 | A4) & ((B1 | B4) | (!B2 & !B6))",
        156,
        parse_ranges(
            "33, 35, 36, 39-49, 51, 52, 55-64, 97, 99, 100, 103-113, 115, 116, 119-129, 131, 132, "
            "135-145, 147, 148, 151-161, 163, 164, 167-177, 179, 180, 183-193, 195, 196, 199-209, "
            "211, 212, 215-225, 227, 228, 231-241, 243, 244, 247-256"
        ),
    ),
    Table1Row(
        "Always-survivors if U = 0",
        "A1",
        128,
        parse_ranges("129-256"),
    ),
    Table1Row(
        "Always-survivors among whom SACE_{u=0} is null",
        "A1 & (B1 | !B2)",
        96,
        parse_ranges("129-132, 137-148, 153-164, 169-180, 185-196, 201-212, 217-228, 233-244, 249-256"),
    ),
    Table1Row(
        "Always-survivors if U = 1 but not if U = 0",
        "!A1 & A4",
        64,
        parse_ranges("33-64, 97-128"),
    ),
    Table1Row(
        "Always-survivors if U = 1 but never-survivors if U = 0",
        "!A1 & !A2 & A4",
        32,
        parse_ranges("33-64"),
    ),
    Table1Row(
        "Always-survivors if U = 1 but protectable if U = 0",
        "!A1 & A2 & A4",
        32,
        parse_ranges("97-128"),
    ),
)


@dataclass(frozen=True)
class Table1Result:
    row: Table1Row
    actual_indices: frozenset[int]

    @property
    def actual_count(self) -> int:
        return len(self.actual_indices)

    @property
    def passed(self) -> bool:
        return self.actual_count == self.row.expected_count and self.actual_indices == self.row.expected_indices


def verify_table1() -> list[Table1Result]:
    return [Table1Result(row, count_types(row.predicate)) for row in TABLE1]


def _stratum_types(u: int, stratum: PrincipalStratum) -> frozenset[int]:
    return frozenset(t.index for t in all_types() if response_profile(t, u).stratum is stratum)


def table1_consistency() -> dict[str, bool]:
    """Partition and complement relations among the classification rows, checked from the model."""
    sets = {row.expression: count_types(row.expression) for row in TABLE1}
    as_u1, null_u1, as_u0, null_u0, u1_only, never_u0, prot_u0 = sets.values()
    positive_u1 = count_types("(A1 | A4) & !(B1 | B4) & (B2 | B6)")
    positive_u0 = count_types("A1 & !B1 & B2")
    AS = PrincipalStratum.ALWAYS_SURVIVOR
    return {
        "u=1 always-survivors = (A1) + (never-survivors at u=0) + (protectable at u=0)": (
            as_u1 == as_u0 | never_u0 | prot_u0
            and not (as_u0 & never_u0 or as_u0 & prot_u0 or never_u0 & prot_u0)
            and never_u0 == _stratum_types(0, PrincipalStratum.NEVER_SURVIVOR) & as_u1
            and prot_u0 == _stratum_types(0, PrincipalStratum.PROTECTABLE) & as_u1
        ),
        "u=1 always-survivors: 156 null + 36 positive": (
            len(positive_u1) == 36 and positive_u1 == as_u1 - null_u1 and not positive_u1 & null_u1
        ),
        "u=0 always-survivors: 96 null + 32 positive": (
            len(positive_u0) == 32 and positive_u0 == as_u0 - null_u0 and not positive_u0 & null_u0
        ),
        "row expressions match model strata": (
            as_u1 == _stratum_types(1, AS) and as_u0 == _stratum_types(0, AS) and u1_only == as_u1 - as_u0
        ),
        "SACE_u null sets match zero individual effects": all(
            (response_profile(t, u).y1 == response_profile(t, u).y0) == (t.index in null)
            for u, null, asset in ((1, null_u1, as_u1), (0, null_u0, as_u0))
            for t in all_types()
            if t.index in asset
        ),
    }
