"""Exact fair allocation of indivisible items under independence-system constraints."""

from nswfair.core import Allocation, Instance
from nswfair.errors import (
    ContractError,
    DomainError,
    NswFairError,
    ParseError,
    ResourceError,
    UnsupportedModeError,
)
from nswfair.fairness import AuditReport, audit, ef1_alpha, is_ef, is_ef1_lex, is_pareto_optimal
from nswfair.setsystem import (
    ClassificationReport,
    Explicit,
    Partition,
    Truncation,
    Uniform,
    augment,
    classify,
    exchange_bijection,
    is_independent,
)
from nswfair.solvers import local_search_nsw, round_robin, solve_leximin, solve_max_nsw
from nswfair.valuations import AdditiveValuation, LexPreference, ValuationProfile, lex_compare, nsw

__version__ = "0.1.0"

__all__ = [
    "AdditiveValuation",
    "Allocation",
    "AuditReport",
    "ClassificationReport",
    "ContractError",
    "DomainError",
    "Explicit",
    "Instance",
    "LexPreference",
    "NswFairError",
    "ParseError",
    "Partition",
    "ResourceError",
    "Truncation",
    "Uniform",
    "UnsupportedModeError",
    "ValuationProfile",
    "audit",
    "augment",
    "classify",
    "ef1_alpha",
    "exchange_bijection",
    "is_ef",
    "is_ef1_lex",
    "is_independent",
    "is_pareto_optimal",
    "lex_compare",
    "local_search_nsw",
    "nsw",
    "round_robin",
    "solve_leximin",
    "solve_max_nsw",
]
