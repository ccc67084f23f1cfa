"""Exact sufficient-cause model of truncation by death."""
from .estimands import (
    EstimandReport,
    cross_check,
    crude_reduction_check,
    estimands_formula,
    estimands_individual,
    null_conditions,
    sace_decomposition_check,
    search_example,
)
from .model import (
    GeneralSusceptibility,
    PrincipalStratum,
    ResponseProfile,
    RiskStatusType,
    Susceptibility,
    canonical_index,
    principal_stratum,
    response_profile,
    type_from_index,
)
from .population import Population, event_prob
from .predicate import Cell, ParseError, count_types, parse

__version__ = "0.1.0"
