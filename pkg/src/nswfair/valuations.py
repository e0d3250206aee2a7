"""Exact-rational additive valuations and lexicographic preferences."""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction

from nswfair.errors import ContractError, DomainError, UnsupportedModeError

Rational = Fraction


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse ``"p/q"`` or an integer string; floats are rejected on purpose."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, bool):
        raise ValueError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"not a rational: {text!r}")
    s = text.strip()
    if "." in s or "e" in s.lower():
        raise ValueError(f"decimal literals are not exact rationals: {text!r}")
    return Fraction(s)


def format_rational(q: Fraction | float) -> str:
    if isinstance(q, float):
        if math.isinf(q):
            return "inf"
        raise TypeError("floats never appear in exact outputs")
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class AdditiveValuation:
    values: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        vals = tuple(parse_rational(v) for v in self.values)
        if any(v < 0 for v in vals):
            raise ContractError("item values must be nonnegative")
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)

    def __call__(self, s: Iterable[int]) -> Fraction:
        return value(self, s)


def value(v: AdditiveValuation, s: Iterable[int]) -> Fraction:
    total = Fraction(0)
    m = len(v.values)
    for g in s:
        if not 0 <= g < m:
            raise DomainError(f"item {g!r} outside universe 0..{m - 1}")
        total += v.values[g]
    return total


@dataclass(frozen=True)
class LexPreference:
    """Strict ranking of every item, best first."""

    order: tuple[int, ...]

    def __post_init__(self) -> None:
        order = tuple(self.order)
        if sorted(order) != list(range(len(order))):
            raise ContractError("lexicographic order must be a permutation of all items")
        object.__setattr__(self, "order", order)

    def __len__(self) -> int:
        return len(self.order)

    def rank(self, g: int) -> int:
        return self.order.index(g)

    def surrogate_weights(self) -> tuple[int, ...]:
        """Integer weight per item, ``2^(m-1-rank)``; sums of these order bundles
        exactly as :func:`lex_compare` does."""
        m = len(self.order)
        w = [0] * m
        for pos, g in enumerate(self.order):
            w[g] = 1 << (m - 1 - pos)
        return tuple(w)


class Order(IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def lex_compare(pref: LexPreference, x: Iterable[int], y: Iterable[int]) -> Order:
    """Compare bundles under a lexicographic preference.

    Walk the ranking best-first; the first item held by exactly one of the
    two bundles decides in favour of the bundle holding it.
    """
    x, y = frozenset(x), frozenset(y)
    m = len(pref.order)
    for g in x | y:
        if not 0 <= g < m:
            raise DomainError(f"item {g!r} outside universe 0..{m - 1}")
    for g in pref.order:
        in_x, in_y = g in x, g in y
        if in_x != in_y:
            return Order.GREATER if in_x else Order.LESS
    return Order.EQUAL


@dataclass(frozen=True)
class ValuationProfile:
    """One valuation per agent, all additive or all lexicographic."""

    agents: tuple[AdditiveValuation | LexPreference, ...]

    def __post_init__(self) -> None:
        agents = tuple(self.agents)
        object.__setattr__(self, "agents", agents)
        kinds = {type(a) for a in agents}
        if len(kinds) > 1:
            raise ContractError("valuation profile mixes additive and lexicographic agents")
        if len({len(a) for a in agents}) > 1:
            raise ContractError("agents disagree on the number of items")

    @classmethod
    def additive(cls, rows: Iterable[Iterable[Fraction | int | str]]) -> ValuationProfile:
        return cls(tuple(AdditiveValuation(tuple(row)) for row in rows))

    @classmethod
    def lexicographic(cls, orders: Iterable[Iterable[int]]) -> ValuationProfile:
        return cls(tuple(LexPreference(tuple(o)) for o in orders))

    @property
    def mode(self) -> str:
        if self.agents and isinstance(self.agents[0], LexPreference):
            return "lex"
        return "additive"

    @property
    def n(self) -> int:
        return len(self.agents)

    @property
    def m(self) -> int | None:
        return len(self.agents[0]) if self.agents else None

    def require_additive(self, what: str) -> tuple[AdditiveValuation, ...]:
        if self.mode != "additive":
            raise UnsupportedModeError(f"{what} is only defined for additive valuations")
        return self.agents  # type: ignore[return-value]

    def require_lex(self, what: str) -> tuple[LexPreference, ...]:
        if self.mode != "lex":
            raise UnsupportedModeError(f"{what} is only defined for lexicographic preferences")
        return self.agents  # type: ignore[return-value]


def nsw(
    profile: ValuationProfile,
    alloc: Sequence[Iterable[int]] | object,
    support: Iterable[int] | None = None,
) -> Fraction:
    """Product of ``v_i(A_i)`` over ``support`` (all agents by default).

    ``alloc`` is either a sequence of bundles or anything with a ``bundles``
    attribute.
    """
    vals = profile.require_additive("NSW")
    bundles = getattr(alloc, "bundles", alloc)
    agents = range(profile.n) if support is None else support
    prod = Fraction(1)
    for i in agents:
        prod *= value(vals[i], bundles[i])
    return prod


@dataclass(frozen=True)
class ProfileClass:
    identical: bool
    binary: bool
    two_valued_a: Fraction | None


def classify_profile(profile: ValuationProfile) -> ProfileClass:
    vals = profile.require_additive("profile classification")
    identical = all(v.values == vals[0].values for v in vals[1:])
    distinct = {x for v in vals for x in v.values}
    binary = distinct <= {0, 1}
    two_valued = None
    rest = distinct - {1}
    if 1 in distinct and len(rest) == 1:
        (a,) = rest
        if a > 1:
            two_valued = a
    return ProfileClass(identical=identical, binary=binary, two_valued_a=two_valued)


__all__ = [
    "AdditiveValuation",
    "LexPreference",
    "Order",
    "ProfileClass",
    "Rational",
    "ValuationProfile",
    "classify_profile",
    "format_rational",
    "lex_compare",
    "nsw",
    "parse_rational",
    "value",
]
