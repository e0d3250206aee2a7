"""Seeded property suites behind ``nswfair report`` and the acceptance tests.

Each suite maps a seed to one instance, runs the solver the guarantee is
about, audits the result and compares against the guaranteed bound.
"""

from __future__ import annotations

import random
import statistics
from collections.abc import Callable, Iterator
from dataclasses import dataclass
from fractions import Fraction

from nswfair.core import Instance
from nswfair.fairness import ef1_alpha, is_ef1_lex, is_pareto_optimal
from nswfair.instances import (
    GeneratorParams,
    gen_lemma4,
    gen_lemma5,
    gen_lemma6,
    gen_lemma7,
    gen_lemma8,
    gen_random,
)
from nswfair.setsystem import classify
from nswfair.solvers import round_robin, solve_leximin, solve_max_nsw
from nswfair.valuations import nsw

MATROID_KINDS = ("uniform", "partition", "truncation")
ALL_KINDS = MATROID_KINDS + ("explicit",)


@dataclass(frozen=True)
class SuiteRow:
    seed: int
    n: int
    m: int
    spec_kind: str
    valuation_class: str
    alpha: Fraction | float | None  # None for lexicographic rows (EF1 is a yes/no check there)
    po: bool | None
    bound: Fraction
    passed: bool


def _shape(suite: str, seed: int, kinds: tuple[str, ...], max_m: int = 8) -> tuple[random.Random, int, int, str]:
    rng = random.Random(f"{suite}/{seed}")
    return rng, rng.randint(2, 3), rng.randint(2, max_m), rng.choice(kinds)


def _nsw_row(seed: int, kind: str, vclass: str, inst: Instance, bound: Fraction) -> SuiteRow:
    alloc, _ = solve_max_nsw(inst)
    alpha = ef1_alpha(inst, alloc)
    po, _ = is_pareto_optimal(inst, alloc)
    return SuiteRow(seed, inst.n, inst.m, kind, vclass, alpha, po, bound, alpha >= bound and po)


def _theorem1(seed: int) -> SuiteRow:
    _, n, m, kind = _shape("theorem1", seed, MATROID_KINDS)
    inst = gen_random(GeneratorParams(seed, n, m, kind, "additive"))
    return _nsw_row(seed, kind, "additive", inst, Fraction(1, 2))


def _theorem2(seed: int) -> SuiteRow:
    _, n, m, kind = _shape("theorem2", seed, MATROID_KINDS)
    inst = gen_random(GeneratorParams(seed, n, m, kind, "identical"))
    alloc = solve_leximin(inst)
    alpha = ef1_alpha(inst, alloc)
    po, _ = is_pareto_optimal(inst, alloc)
    return SuiteRow(seed, n, m, kind, "identical", alpha, po, Fraction(1), alpha >= 1 and po)


def _theorem3(seed: int) -> SuiteRow:
    rng, n, m, kind = _shape("theorem3", seed, MATROID_KINDS)
    a = rng.choice((Fraction(3, 2), Fraction(2), Fraction(3)))
    inst = gen_random(GeneratorParams(seed, n, m, kind, "two_valued", a=a))
    return _nsw_row(seed, kind, f"two_valued(a={a})", inst, max(1 / a**2, Fraction(1, 2)))


def _theorem4(seed: int) -> SuiteRow:
    # every tenth seed runs the hand-built strongly-2-extendible witness
    if seed % 10 == 0:
        inst, kind = gen_lemma6(), "explicit"
    else:
        _, n, m, kind = _shape("theorem4", seed, ALL_KINDS, max_m=7)
        inst = gen_random(GeneratorParams(seed, n, m, kind, "identical_binary"))
    report = classify(inst.constraint, p_bound=max(inst.m, 1))
    p = report.min_strong_extendibility or max(inst.m, 1)
    return _nsw_row(seed, kind, "identical_binary", inst, Fraction(1, p))


def _theorem5(seed: int) -> SuiteRow:
    _, n, m, _ = _shape("theorem5", seed, ("explicit",))
    inst = gen_random(GeneratorParams(seed, n, m, "explicit", "additive"))
    return _nsw_row(seed, "explicit", "additive", inst, Fraction(1, 4))


def _theorem6(seed: int) -> SuiteRow:
    _, n, m, kind = _shape("theorem6", seed, ALL_KINDS)
    inst = gen_random(GeneratorParams(seed, n, m, kind, "lexicographic"))
    alloc = round_robin(inst)
    ef1 = is_ef1_lex(inst, alloc)
    po, _ = is_pareto_optimal(inst, alloc)
    return SuiteRow(seed, n, m, kind, "lexicographic", None, po, Fraction(1), ef1 and po)


@dataclass(frozen=True)
class Reproduction:
    label: str
    instance: Instance
    alpha: Fraction | float
    golden_alpha: Fraction
    nsw: Fraction | None
    golden_nsw: Fraction | None

    @property
    def passed(self) -> bool:
        return self.alpha == self.golden_alpha and self.nsw == self.golden_nsw


def reproduce(
    lemma: int,
    *,
    k: int = 2,
    delta: Fraction | str | None = None,
    eta: int = 2,
) -> Reproduction:
    """Build a worst-case instance, solve and audit it, and compare with the closed form."""
    if lemma == 4:
        d = Fraction(delta if delta is not None else "1/10")
        inst = gen_lemma4(k, d)
        golden = Fraction(k + 1) / (2 * k + 1 - d)
        golden_nsw = Fraction(k * (k + 1)) ** 2
        label = f"lemma4 k={k} delta={d}"
    elif lemma == 5:
        inst, golden, golden_nsw, label = gen_lemma5(), Fraction(2, 5), Fraction(12), "lemma5"
    elif lemma == 6:
        inst, golden, golden_nsw, label = gen_lemma6(), Fraction(2, 3), Fraction(8), "lemma6"
    elif lemma == 7:
        d = Fraction(delta if delta is not None else "1/10")
        inst = gen_lemma7(d)
        golden = (1 + d) / (4 * (1 - d))
        golden_nsw = (1 + d) * 4
        label = f"lemma7 delta={d}"
    elif lemma == 8:
        inst, tie_break = gen_lemma8(eta)
        alloc = round_robin(inst, tie_break)
        return Reproduction(f"lemma8 eta={eta}", inst, ef1_alpha(inst, alloc), Fraction(eta, 2 * eta - 1), None, None)
    else:
        raise ValueError(f"no worst-case construction for lemma {lemma}")
    alloc, _ = solve_max_nsw(inst)
    return Reproduction(label, inst, ef1_alpha(inst, alloc), golden, nsw(inst.profile, alloc), golden_nsw)


LEMMA_RUNS: tuple[dict, ...] = (
    {"lemma": 4, "k": 2},
    {"lemma": 4, "k": 3},
    {"lemma": 4, "k": 4},
    {"lemma": 5},
    {"lemma": 6},
    {"lemma": 7, "delta": "1/4"},
    {"lemma": 7, "delta": "1/10"},
    {"lemma": 8, "eta": 2},
    {"lemma": 8, "eta": 3},
)


def _lemma_rows(count: int, seed: int) -> Iterator[SuiteRow]:
    # the lemma suite is fixed; count and seed are ignored
    for idx, params in enumerate(LEMMA_RUNS):
        rep = reproduce(**params)
        kind = rep.instance.constraint.kind
        yield SuiteRow(idx, rep.instance.n, rep.instance.m, kind, rep.label, rep.alpha, None, rep.golden_alpha, rep.passed)


SUITES: dict[str, Callable[[int], SuiteRow]] = {
    "theorem1": _theorem1,
    "theorem2": _theorem2,
    "theorem3": _theorem3,
    "theorem4": _theorem4,
    "theorem5": _theorem5,
    "theorem6": _theorem6,
}

SUITE_NAMES = tuple(SUITES) + ("lemmas",)

# headline printed by ``report`` when a suite has no violations
BOUND_TEXT = {
    "theorem1": "min alpha ≥ 1/2, all PO",
    "theorem2": "min alpha ≥ 1, all PO",
    "theorem3": "min alpha ≥ max{1/a^2, 1/2}, all PO",
    "theorem4": "min alpha ≥ 1/p, all PO",
    "theorem5": "min alpha ≥ 1/4, all PO",
    "theorem6": "all allocations EF1 and PO",
    "lemmas": "all ratios match their closed forms",
}


def run_suite(name: str, count: int, seed: int = 0) -> list[SuiteRow]:
    """Rows for seeds ``seed .. seed+count-1``, in seed order."""
    if name == "lemmas":
        return list(_lemma_rows(count, seed))
    try:
        fn = SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITE_NAMES)}") from None
    return [fn(s) for s in range(seed, seed + count)]


def alpha_summary(rows: list[SuiteRow]) -> tuple[Fraction | float | None, Fraction | float | None]:
    """Minimum and lower median of the finite-or-infinite alphas."""
    alphas = [r.alpha for r in rows if r.alpha is not None]
    if not alphas:
        return None, None
    return min(alphas), statistics.median_low(alphas)


__all__ = [
    "ALL_KINDS",
    "BOUND_TEXT",
    "LEMMA_RUNS",
    "MATROID_KINDS",
    "Reproduction",
    "SUITE_NAMES",
    "SuiteRow",
    "alpha_summary",
    "reproduce",
    "run_suite",
]
