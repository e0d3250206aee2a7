"""Allocation auditors: approximate EF1, EF, Pareto optimality."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from nswfair.core import Allocation, Instance
from nswfair.solvers import DEFAULT_BUDGET, integer_weights, walk_allocations
from nswfair.valuations import Order, lex_compare, nsw, value

INF = math.inf


@dataclass(frozen=True)
class AuditReport:
    alpha_ef1: Fraction | float | None
    is_ef: bool
    is_ef1: bool
    is_po: bool | None
    po_dominator: Allocation | None
    worst_pair: tuple[int, int] | None
    nsw_value: Fraction | None
    complete: bool


def ef1_alpha_pair(instance: Instance, alloc: Allocation) -> tuple[Fraction | float, tuple[int, int] | None]:
    """Largest ``alpha`` making ``alloc`` alpha-EF1, with the pair attaining it.

    For each ordered pair ``(i, j)`` the ratio is ``v_i(A_i)`` over
    ``v_i(A_j)`` minus ``i``'s favourite item in ``A_j``; pairs with a zero
    denominator are vacuous (infinite). The first minimizing pair in
    ``(i, j)`` order is reported.
    """
    vals = instance.profile.require_additive("alpha-EF1")
    best: Fraction | float = INF
    pair = None
    for i, vi in enumerate(vals):
        own = value(vi, alloc.bundles[i])
        for j, other in enumerate(alloc.bundles):
            if i == j or not other:
                continue
            rest = value(vi, other) - max(vi.values[g] for g in other)
            if rest == 0:
                continue
            ratio = own / rest
            if ratio < best:
                best, pair = ratio, (i, j)
    return best, pair


def ef1_alpha(instance: Instance, alloc: Allocation) -> Fraction | float:
    return ef1_alpha_pair(instance, alloc)[0]


def is_ef(instance: Instance, alloc: Allocation) -> bool:
    agents = instance.profile.agents
    for i, pref in enumerate(agents):
        for j, other in enumerate(alloc.bundles):
            if i == j:
                continue
            if instance.mode == "lex":
                if lex_compare(pref, alloc.bundles[i], other) == Order.LESS:  # type: ignore[arg-type]
                    return False
            elif value(pref, alloc.bundles[i]) < value(pref, other):  # type: ignore[arg-type]
                return False
    return True


def is_ef1_lex(instance: Instance, alloc: Allocation) -> bool:
    prefs = instance.profile.require_lex("lexicographic EF1")
    for i, pref in enumerate(prefs):
        own = alloc.bundles[i]
        for j, other in enumerate(alloc.bundles):
            if i == j or not other:
                continue
            if not any(lex_compare(pref, own, other - {g}) != Order.LESS for g in other):
                return False
    return True


def is_pareto_optimal(
    instance: Instance, alloc: Allocation, *, budget: int = DEFAULT_BUDGET
) -> tuple[bool, Allocation | None]:
    """Search all feasible allocations for a Pareto improvement.

    Lexicographic agents are compared through their power-of-two surrogate
    weights, which order bundles exactly like the lexicographic rule. The
    first dominating allocation in canonical enumeration order is returned.
    """
    weights = integer_weights(instance)
    target = [sum(weights[a][g] for g in b) for a, b in enumerate(alloc.bundles)]
    found: list[int] | None = None

    def visit(masks: list[int], utils: list[int]) -> bool:
        nonlocal found
        strict = False
        for u, t in zip(utils, target):
            if u < t:
                return False
            if u > t:
                strict = True
        if strict:
            found = list(masks)
            return True
        return False

    walk_allocations(instance, visit, weights=weights, lower=target, budget=budget)
    if found is None:
        return True, None
    m = instance.m
    bundles = [frozenset(g for g in range(m) if mask >> g & 1) for mask in found]
    return False, Allocation.from_bundles(bundles, m)


def audit(instance: Instance, alloc: Allocation, *, check_po: bool = True, budget: int = DEFAULT_BUDGET) -> AuditReport:
    alloc.check(instance)
    if instance.mode == "lex":
        alpha, pair, nsw_value = None, None, None
        ef1 = is_ef1_lex(instance, alloc)
    else:
        alpha, pair = ef1_alpha_pair(instance, alloc)
        ef1 = alpha >= 1
        nsw_value = nsw(instance.profile, alloc)
    po, dominator = is_pareto_optimal(instance, alloc, budget=budget) if check_po else (None, None)
    return AuditReport(
        alpha_ef1=alpha,
        is_ef=is_ef(instance, alloc),
        is_ef1=ef1,
        is_po=po,
        po_dominator=dominator,
        worst_pair=pair,
        nsw_value=nsw_value,
        complete=alloc.complete,
    )


__all__ = [
    "INF",
    "AuditReport",
    "audit",
    "ef1_alpha",
    "ef1_alpha_pair",
    "is_ef",
    "is_ef1_lex",
    "is_pareto_optimal",
]
