"""Two-stage sufficient-cause model of survival and a survival-truncated outcome.

Survival ``S`` is produced by sufficient causes built from background
factors ``A1..A9`` together with treatment ``X`` and a common cause ``U``.
The outcome ``Y`` is produced by causes ``B1..B9`` that all require ``S``
as a component, so ``Y`` is undefined whenever ``S = 0``.  Undefined
outcomes are represented by ``None`` and never folded into ``0``.

Under positive monotonicity only ``A1, A2X, A4U, A6UX`` and
``B1S, B2SX, B4SU, B6SUX`` remain, which gives 256 risk-status types.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, fields
from functools import lru_cache
from typing import NamedTuple, Optional, Union

#: Outcome values: 0, 1, or ``None`` for undefined.
OutcomeValue = Optional[int]

N_TYPES = 256

MONOTONE_FACTORS = ("A1", "A2", "A4", "A6", "B1", "B2", "B4", "B6")
GENERAL_FACTORS = tuple(f"A{k}" for k in range(1, 10)) + tuple(f"B{k}" for k in range(1, 10))

# Bit weights of the canonical risk-status index, most significant first.
_WEIGHTS = {"a1": 128, "a2": 64, "a4": 32, "a6": 16, "b1": 8, "b2": 4, "b4": 2, "b6": 1}


def _check_binary(name: str, value: int) -> None:
    if value not in (0, 1):
        raise ValueError(f"{name} must be 0 or 1, got {value!r}")


@dataclass(frozen=True)
class Susceptibility:
    """Susceptibility to the eight sufficient causes left under monotonicity."""

    a1: int = 0
    a2: int = 0
    a4: int = 0
    a6: int = 0
    b1: int = 0
    b2: int = 0
    b4: int = 0
    b6: int = 0

    def __post_init__(self) -> None:
        for f in fields(self):
            _check_binary(f.name, getattr(self, f.name))

    @classmethod
    def from_factors(cls, *names: str) -> "Susceptibility":
        """Build from factor names, e.g. ``Susceptibility.from_factors("A1", "B1")``."""
        bits = {}
        for name in names:
            key = name.lower()
            if key not in _WEIGHTS:
                raise ValueError(f"unknown monotone factor {name!r}")
            bits[key] = 1
        return cls(**bits)

    def bit(self, factor: str) -> int:
        return getattr(self, factor.lower())

    def as_dict(self) -> dict[str, int]:
        return {name: self.bit(name) for name in MONOTONE_FACTORS}

    def lift(self) -> "GeneralSusceptibility":
        """Embed into the nine-cause model with every non-monotone factor absent."""
        a = [0] * 9
        b = [0] * 9
        for k in (1, 2, 4, 6):
            a[k - 1] = self.bit(f"A{k}")
            b[k - 1] = self.bit(f"B{k}")
        return GeneralSusceptibility(tuple(a), tuple(b))


@dataclass(frozen=True)
class GeneralSusceptibility:
    """Susceptibility to all nine survival and nine outcome sufficient causes.

    ``a[k - 1]`` holds factor ``Ak`` and ``b[k - 1]`` holds ``Bk``.
    """

    a: tuple[int, ...] = (0,) * 9
    b: tuple[int, ...] = (0,) * 9

    def __post_init__(self) -> None:
        if len(self.a) != 9 or len(self.b) != 9:
            raise ValueError("general susceptibility needs nine A and nine B bits")
        for i, v in enumerate(self.a + self.b):
            _check_binary(GENERAL_FACTORS[i], v)

    @classmethod
    def from_factors(cls, *names: str) -> "GeneralSusceptibility":
        a = [0] * 9
        b = [0] * 9
        for name in names:
            if name not in GENERAL_FACTORS:
                raise ValueError(f"unknown factor {name!r}")
            (a if name[0] == "A" else b)[int(name[1]) - 1] = 1
        return cls(tuple(a), tuple(b))

    def bit(self, factor: str) -> int:
        k = int(factor[1]) - 1
        return self.a[k] if factor[0] in "Aa" else self.b[k]

    def as_dict(self) -> dict[str, int]:
        return {name: self.bit(name) for name in GENERAL_FACTORS}


@dataclass(frozen=True)
class RiskStatusType:
    """A canonical type index paired with its susceptibility vector."""

    index: int
    susceptibility: Susceptibility

    def __post_init__(self) -> None:
        if canonical_index(self.susceptibility) != self.index:
            raise ValueError(f"index {self.index} does not match {self.susceptibility}")


class PrincipalStratum(enum.Enum):
    ALWAYS_SURVIVOR = "always-survivor"
    PROTECTABLE = "protectable"
    NEVER_SURVIVOR = "never-survivor"
    HARMED = "harmed"

    @classmethod
    def from_survival(cls, s1: int, s0: int) -> "PrincipalStratum":
        return {
            (1, 1): cls.ALWAYS_SURVIVOR,
            (1, 0): cls.PROTECTABLE,
            (0, 0): cls.NEVER_SURVIVOR,
            (0, 1): cls.HARMED,
        }[(s1, s0)]


class ResponseProfile(NamedTuple):
    """Potential survival and outcome under treatment (``x=1``) and control (``x=0``)."""

    s1: int
    s0: int
    y1: OutcomeValue
    y0: OutcomeValue

    def survival(self, x: int) -> int:
        return self.s1 if x else self.s0

    def outcome(self, x: int) -> OutcomeValue:
        return self.y1 if x else self.y0

    @property
    def stratum(self) -> PrincipalStratum:
        return PrincipalStratum.from_survival(self.s1, self.s0)


# --- response functions -------------------------------------------------


def survival_monotone(susc: Susceptibility, u: int, x: int) -> int:
    return int(bool(susc.a1 or (susc.a2 and x) or (susc.a4 and u) or (susc.a6 and u and x)))


def outcome_monotone(susc: Susceptibility, s: int, u: int, x: int) -> OutcomeValue:
    if not s:
        return None
    return int(bool(susc.b1 or (susc.b2 and x) or (susc.b4 and u) or (susc.b6 and u and x)))


def _nine_causes(bits: tuple[int, ...], u: int, x: int) -> int:
    xb, ub = 1 - x, 1 - u
    terms = (1, x, xb, u, ub, u * x, u * xb, ub * x, ub * xb)
    return int(any(b and t for b, t in zip(bits, terms)))


def survival_general(susc: GeneralSusceptibility, u: int, x: int) -> int:
    return _nine_causes(susc.a, u, x)


def outcome_general(susc: GeneralSusceptibility, s: int, u: int, x: int) -> OutcomeValue:
    if not s:
        return None
    return _nine_causes(susc.b, u, x)


# --- canonical indexing --------------------------------------------------


def canonical_index(susc: Susceptibility) -> int:
    """Row number of ``susc`` in the 256-row risk-status table (1-based)."""
    return 1 + sum(w * getattr(susc, name) for name, w in _WEIGHTS.items())


@lru_cache(maxsize=None)
def type_from_index(index: int) -> Susceptibility:
    if not isinstance(index, int) or not 1 <= index <= N_TYPES:
        raise ValueError(f"risk-status index must be in 1..{N_TYPES}, got {index!r}")
    code = index - 1
    return Susceptibility(**{name: (code // w) % 2 for name, w in _WEIGHTS.items()})


def risk_type(index: int) -> RiskStatusType:
    return RiskStatusType(index, type_from_index(index))


def all_types() -> list[RiskStatusType]:
    return [risk_type(i) for i in range(1, N_TYPES + 1)]


N_GENERAL_TYPES = 2 ** 18


def general_index(susc: GeneralSusceptibility) -> int:
    """Index in 1..2**18; ``A1`` is the most significant bit and ``B9`` the least."""
    code = 0
    for bit in susc.a + susc.b:
        code = 2 * code + bit
    return code + 1


@lru_cache(maxsize=4096)
def general_from_index(index: int) -> GeneralSusceptibility:
    if not isinstance(index, int) or not 1 <= index <= N_GENERAL_TYPES:
        raise ValueError(f"general index must be in 1..{N_GENERAL_TYPES}, got {index!r}")
    code = index - 1
    bits = [(code >> (17 - i)) & 1 for i in range(18)]
    return GeneralSusceptibility(tuple(bits[:9]), tuple(bits[9:]))


# --- profiles and strata -------------------------------------------------


TypeLike = Union[int, RiskStatusType, Susceptibility]


def _as_susceptibility(t: TypeLike) -> Susceptibility:
    if isinstance(t, Susceptibility):
        return t
    if isinstance(t, RiskStatusType):
        return t.susceptibility
    return type_from_index(t)


@lru_cache(maxsize=None)
def _profile(susc: Susceptibility, u: int) -> ResponseProfile:
    _check_binary("u", u)
    s1 = survival_monotone(susc, u, 1)
    s0 = survival_monotone(susc, u, 0)
    return ResponseProfile(s1, s0, outcome_monotone(susc, s1, u, 1), outcome_monotone(susc, s0, u, 0))


def response_profile(t: TypeLike, u: int) -> ResponseProfile:
    """Potential outcomes of a monotone risk-status type at common-cause level ``u``."""
    return _profile(_as_susceptibility(t), u)


@lru_cache(maxsize=4096)
def general_response_profile(susc: GeneralSusceptibility, u: int) -> ResponseProfile:
    _check_binary("u", u)
    s1 = survival_general(susc, u, 1)
    s0 = survival_general(susc, u, 0)
    return ResponseProfile(s1, s0, outcome_general(susc, s1, u, 1), outcome_general(susc, s0, u, 0))


def principal_stratum(t: TypeLike, u: int) -> PrincipalStratum:
    return response_profile(t, u).stratum
