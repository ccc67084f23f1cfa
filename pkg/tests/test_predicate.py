import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from truncsc.predicate import (
    And,
    Cell,
    Lit,
    Not,
    Or,
    ParseError,
    count_types,
    evaluate,
    parse,
)
from truncsc.tables import parse_ranges

ALL_CELLS = [Cell(i, u) for i in range(1, 257) for u in (0, 1)]
LITERALS = ["A1", "A2", "A4", "A6", "B1", "B2", "B4", "B6", "U"]

predicates = st.recursive(
    st.sampled_from(LITERALS).map(Lit),
    lambda inner: st.one_of(
        inner.map(Not),
        st.tuples(inner, inner).map(lambda t: And(*t)),
        st.tuples(inner, inner).map(lambda t: Or(*t)),
    ),
    max_leaves=8,
)


def truth_table(p):
    return [evaluate(p, c) for c in ALL_CELLS]


def test_parse_disjunction():
    assert parse("A1 | A4") == Or(Lit("A1"), Lit("A4"))


def test_parse_precedence():
    assert parse("!A1 & A2 | U") == Or(And(Not(Lit("A1")), Lit("A2")), Lit("U"))
    assert parse("A1&(A2|U)") == And(Lit("A1"), Or(Lit("A2"), Lit("U")))


def test_parse_positive_sace_condition():
    p = parse("(A1|A4) & !B1 & !B4 & (B2|B6) & U")
    expected = And(
        And(And(And(Or(Lit("A1"), Lit("A4")), Not(Lit("B1"))), Not(Lit("B4"))), Or(Lit("B2"), Lit("B6"))),
        Lit("U"),
    )
    assert p == expected


@pytest.mark.parametrize(
    "text, pos",
    [("A3", 0), ("A1 & X1", 5), ("(A1 | A4", 8), ("A1 | A4)", 7), ("", 0), ("   ", 0), ("A1 &", 4), ("A1 $", 3)],
)
def test_parse_errors_report_position(text, pos):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert info.value.position == pos


def test_general_mode_alphabet():
    assert parse("A3 & !B9", mode="general") == And(Lit("A3"), Not(Lit("B9")))
    with pytest.raises(ValueError):
        parse("A1", mode="bogus")


def test_evaluate_examples():
    assert evaluate(parse("U"), Cell(5, 1)) == 1
    assert evaluate(parse("A1 & (B1 | !B2)"), Cell(137, 0)) == 1
    assert evaluate(parse("A1 | A4"), Cell(17, 0)) == 0


def test_count_types_table_rows():
    assert count_types("A1 | A4") == parse_ranges("33-64, 97-256")
    assert len(count_types("(A1|A4) & ((B1|B4) | (!B2 & !B6))")) == 156
    assert len(count_types("A1 & (B1 | !B2)")) == 96


def test_count_types_rejects_u():
    with pytest.raises(ValueError):
        count_types("A1 & U")


def test_positive_set_is_difference_of_always_and_null_sets():
    positive = count_types("(A1|A4) & !(B1|B4) & (B2|B6)")
    assert len(positive) == 36
    assert positive == count_types("A1|A4") - count_types("(A1|A4) & ((B1|B4) | (!B2 & !B6))")


@settings(max_examples=60, deadline=None)
@given(predicates, predicates)
def test_de_morgan(p, q):
    assert truth_table(Not(Or(p, q))) == truth_table(And(Not(p), Not(q)))
    assert truth_table(Not(And(p, q))) == truth_table(Or(Not(p), Not(q)))


@settings(max_examples=60, deadline=None)
@given(predicates)
def test_double_negation(p):
    assert truth_table(Not(Not(p))) == truth_table(p)


@settings(max_examples=100, deadline=None)
@given(predicates)
def test_print_parse_round_trip(p):
    assert truth_table(parse(str(p))) == truth_table(p)
