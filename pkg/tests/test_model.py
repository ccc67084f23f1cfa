from itertools import product

import pytest

from oracle import TYPES, oracle_outcome, oracle_survival
from truncsc.model import (
    GENERAL_FACTORS,
    GeneralSusceptibility,
    PrincipalStratum,
    RiskStatusType,
    Susceptibility,
    all_types,
    canonical_index,
    general_from_index,
    general_index,
    outcome_general,
    outcome_monotone,
    principal_stratum,
    response_profile,
    risk_type,
    survival_general,
    survival_monotone,
    type_from_index,
)

UX = list(product((0, 1), repeat=2))
ZERO = Susceptibility()


def test_survival_all_zero_never_survives():
    assert all(survival_monotone(ZERO, u, x) == 0 for u, x in UX)


def test_survival_a6_needs_u_and_x():
    s = Susceptibility.from_factors("A6")
    assert survival_monotone(s, 1, 1) == 1
    assert survival_monotone(s, 1, 0) == 0


def test_survival_a4_dies_when_u0():
    s = Susceptibility.from_factors("A4")
    assert survival_monotone(s, 0, 0) == survival_monotone(s, 0, 1) == 0


def test_outcome_b4_completes_regardless_of_treatment():
    s = Susceptibility.from_factors("B4")
    assert outcome_monotone(s, 1, 1, 0) == 1
    assert outcome_monotone(s, 1, 1, 1) == 1


@pytest.mark.parametrize("index", [1, 35, 137, 256])
def test_outcome_undefined_without_survival(index):
    s = type_from_index(index)
    assert all(outcome_monotone(s, 0, u, x) is None for u, x in UX)


def test_outcome_defined_zero_without_b_factors():
    s = Susceptibility.from_factors("A1", "A2", "A4", "A6")
    assert all(outcome_monotone(s, 1, u, x) == 0 for u, x in UX)


def test_general_a3_survives_only_untreated():
    s = GeneralSusceptibility.from_factors("A3")
    assert [survival_general(s, u, 0) for u in (0, 1)] == [1, 1]
    assert [survival_general(s, u, 1) for u in (0, 1)] == [0, 0]


def test_general_a1_always_survives():
    s = GeneralSusceptibility.from_factors("A1")
    assert all(survival_general(s, u, x) == 1 for u, x in UX)
    assert all(survival_general(GeneralSusceptibility(), u, x) == 0 for u, x in UX)


def test_general_b5_needs_u0():
    s = GeneralSusceptibility.from_factors("B5")
    assert outcome_general(s, 1, 0, 0) == 1
    assert outcome_general(s, 1, 1, 0) == 0
    assert outcome_general(s, 0, 0, 0) is None


def test_general_model_matches_oracle_exhaustively_per_factor():
    for name in GENERAL_FACTORS:
        s = GeneralSusceptibility.from_factors(name)
        for u, x in UX:
            assert survival_general(s, u, x) == oracle_survival({name}, u, x)
            for surv in (0, 1):
                assert outcome_general(s, surv, u, x) == oracle_outcome({name}, surv, u, x)


def test_monotone_lift_agrees_with_general_on_all_types():
    for t in all_types():
        g = t.susceptibility.lift()
        for u, x in UX:
            s = survival_monotone(t.susceptibility, u, x)
            assert survival_general(g, u, x) == s
            for surv in (0, 1):
                assert outcome_general(g, surv, u, x) == outcome_monotone(t.susceptibility, surv, u, x)


def test_monotone_matches_component_set_oracle():
    for i, factors in TYPES.items():
        susc = type_from_index(i)
        for u, x in UX:
            s = survival_monotone(susc, u, x)
            assert s == oracle_survival(factors, u, x)
            assert outcome_monotone(susc, s, u, x) == oracle_outcome(factors, s, u, x)


def test_canonical_index_matches_enumeration_order():
    for i, factors in TYPES.items():
        assert canonical_index(Susceptibility.from_factors(*factors)) == i
        assert type_from_index(i) == Susceptibility.from_factors(*factors)


@pytest.mark.parametrize(
    "factors, index",
    [((), 1), (("A6",), 17), (("A4",), 33), (("A2",), 65), (("A1",), 129), (("A1", "B1"), 137), (("A4", "B4"), 35)],
)
def test_canonical_index_anchor_rows(factors, index):
    assert canonical_index(Susceptibility.from_factors(*factors)) == index


@pytest.mark.parametrize("bad", [0, 257, -3])
def test_type_from_index_rejects_out_of_range(bad):
    with pytest.raises(ValueError):
        type_from_index(bad)


def test_risk_status_type_checks_index():
    with pytest.raises(ValueError):
        RiskStatusType(2, Susceptibility())
    assert risk_type(137).susceptibility == Susceptibility(a1=1, b1=1)


def test_general_index_round_trip():
    for i in (1, 2, 255, 4097, 2 ** 18):
        assert general_index(general_from_index(i)) == i
    assert general_index(GeneralSusceptibility.from_factors("A1")) == 2 ** 17 + 1


def test_response_profile_examples():
    assert tuple(response_profile(33, 1)) == (1, 1, 0, 0)
    assert tuple(response_profile(137, 0)) == (1, 1, 1, 1)
    for u in (0, 1):
        assert tuple(response_profile(1, u)) == (0, 0, None, None)


def test_principal_stratum_examples():
    assert principal_stratum(33, 1) is PrincipalStratum.ALWAYS_SURVIVOR
    assert principal_stratum(33, 0) is PrincipalStratum.NEVER_SURVIVOR
    assert principal_stratum(97, 0) is PrincipalStratum.PROTECTABLE
    assert principal_stratum(1, 0) is PrincipalStratum.NEVER_SURVIVOR


def test_monotonicity_in_x_and_u():
    for t in all_types():
        s = t.susceptibility
        for v in (0, 1):
            assert survival_monotone(s, v, 1) >= survival_monotone(s, v, 0)
            assert survival_monotone(s, 1, v) >= survival_monotone(s, 0, v)
            # outcome with survival held at 1 so both sides are defined
            assert outcome_monotone(s, 1, v, 1) >= outcome_monotone(s, 1, v, 0)
            assert outcome_monotone(s, 1, 1, v) >= outcome_monotone(s, 1, 0, v)


def test_undefinedness_coupling_and_no_harmed_stratum():
    for t in all_types():
        for u in (0, 1):
            prof = response_profile(t, u)
            for x in (0, 1):
                assert (prof.outcome(x) is None) == (prof.survival(x) == 0)
            assert prof.stratum is not PrincipalStratum.HARMED
            if prof.y1 is not None and prof.y0 is not None:
                assert prof.y1 >= prof.y0


def test_harmed_reachable_in_general_model():
    from truncsc.model import general_response_profile

    prof = general_response_profile(GeneralSusceptibility.from_factors("A3"), 0)
    assert prof.stratum is PrincipalStratum.HARMED


def test_binary_validation():
    with pytest.raises(ValueError):
        Susceptibility(a1=2)
    with pytest.raises(ValueError):
        Susceptibility.from_factors("A3")
    with pytest.raises(ValueError):
        response_profile(1, 2)
