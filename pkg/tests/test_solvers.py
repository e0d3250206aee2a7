from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from nswfair.core import Allocation, Instance
from nswfair.errors import ContractError, ResourceError, UnsupportedModeError
from nswfair.instances import gen_lemma4, gen_lemma5, gen_lemma6, gen_lemma7, gen_lemma8, labels
from nswfair.setsystem import Uniform, Partition
from nswfair.solvers import (
    Stage,
    exchange_moves,
    local_search_nsw,
    max_nsw_allocations,
    round_robin,
    solve_leximin,
    solve_max_nsw,
    swap_ratio,
    _objective,
)
from nswfair.valuations import ValuationProfile, nsw, value
from strategies import additive_instances, any_specs, lex_instances, matroid_specs


def inst(rows, spec):
    return Instance(labels(spec.size), ValuationProfile.additive(rows), spec)


def g(*one_based):
    return frozenset(x - 1 for x in one_based)


def rows_of(instance):
    return [v.values for v in instance.profile.agents]


def utils(instance, alloc):
    return [value(v, b) for v, b in zip(instance.profile.agents, alloc.bundles)]


# --- Max-NSW -----------------------------------------------------------------


@pytest.mark.parametrize(
    "make, bundles, product",
    [
        (gen_lemma5, (g(1, 2), g(3, 4, 5, 6, 7, 8)), 12),
        (gen_lemma6, (g(1, 2), g(3, 4, 5, 6)), 8),
        (lambda: gen_lemma4(2, "1/10"), (g(4, 5, 6), g(1, 2, 3)), 36),
        (lambda: gen_lemma7("1/10"), (g(1), frozenset(range(1, 11))), Fraction(22, 5)),
        (lambda: inst([[3, 2, 1]], Uniform(3, 2)), (g(1, 2),), 5),
    ],
)
def test_max_nsw_examples(make, bundles, product):
    instance = make()
    alloc, trace = solve_max_nsw(instance)
    assert alloc.bundles == bundles
    assert nsw(instance.profile, alloc) == product
    assert trace.positive_support == frozenset(range(instance.n))


def test_uniform_worst_case_optimum_is_unique():
    instance = gen_lemma4(2, "1/10")
    (only,) = max_nsw_allocations(instance)
    assert only.bundles == (g(4, 5, 6), g(1, 2, 3))


def test_trimmed_witness_optimum_unique_up_to_relabeling():
    optima = max_nsw_allocations(gen_lemma6())
    assert {frozenset(a.bundles) for a in optima} == {frozenset({g(1, 2), g(3, 4, 5, 6)})}


def test_support_stage_empties_zero_agents():
    # agent 1 values nothing; it must end empty and its items unallocated
    instance = inst([[1, 1, 0], [0, 0, 0]], Uniform(3, 2))
    alloc, trace = solve_max_nsw(instance)
    assert alloc.bundles == (g(1, 2), frozenset())
    assert alloc.unallocated == g(3)
    assert trace.positive_support == {0}


def test_stage_reached():
    _, t = solve_max_nsw(inst([[1, 0], [0, 1]], Uniform(2, 2)))
    assert t.stage_reached == Stage.SUPPORT_MAX
    _, t = solve_max_nsw(gen_lemma4(2, "1/10"))
    assert t.stage_reached == Stage.NSW_MAX
    # a zero-valued item breaks the tie only on item count
    _, t = solve_max_nsw(inst([[1, 0]], Uniform(2, 2)))
    assert t.stage_reached == Stage.SIZE_MAX
    _, t = solve_max_nsw(gen_lemma5())
    assert t.stage_reached == Stage.CANONICAL


@settings(max_examples=120, deadline=None)
@given(additive_instances(any_specs(0, 5), max_n=3))
def test_max_nsw_matches_oracle(instance):
    alloc, trace = solve_max_nsw(instance)
    expected = oracles.max_nsw(rows_of(instance), instance.constraint)
    assert list(alloc.bundles) == expected
    feasible = sum(1 for _ in oracles.allocations(instance.n, instance.m, instance.constraint))
    assert trace.candidate_count == feasible
    alloc.check(instance)


def test_max_nsw_guards():
    with pytest.raises(UnsupportedModeError):
        solve_max_nsw(Instance(labels(2), ValuationProfile.lexicographic([(0, 1)]), Uniform(2, 1)))
    with pytest.raises(ResourceError, match="local_search_nsw"):
        solve_max_nsw(inst([[1] * 12] * 3, Uniform(12, 4)))
    with pytest.raises(ResourceError):
        solve_max_nsw(gen_lemma5(), budget=100)


def test_zero_items():
    alloc, _ = solve_max_nsw(inst([[], []], Uniform(0, 0)))
    assert alloc == Allocation.empty(2, 0)


# --- leximin -----------------------------------------------------------------


@pytest.mark.parametrize(
    "instance, vector",
    [
        (inst([[3, 2, 2, 1]] * 2, Uniform(4, 2)), [4, 4]),
        (gen_lemma6(), [2, 4]),
    ],
)
def test_leximin_examples(instance, vector):
    assert sorted(utils(instance, solve_leximin(instance))) == vector


def test_leximin_single_agent_equals_max_nsw():
    instance = inst([[3, 2, 1, 5]], Uniform(4, 2))
    assert solve_leximin(instance) == solve_max_nsw(instance)[0]


@settings(max_examples=100, deadline=None)
@given(additive_instances(any_specs(0, 5), max_n=3))
def test_leximin_matches_oracle(instance):
    alloc = solve_leximin(instance)
    assert sorted(utils(instance, alloc)) == oracles.leximin_vector(rows_of(instance), instance.constraint)


# --- Round-Robin -------------------------------------------------------------


def test_round_robin_adversarial_tie_break():
    instance, tie_break = gen_lemma8(2)
    alloc = round_robin(instance, tie_break)
    assert alloc.bundles == (g(3, 4, 5, 6), g(1, 2))


def test_round_robin_lex_alternates():
    instance = Instance(labels(4), ValuationProfile.lexicographic([(0, 1, 2, 3)] * 2), Uniform(4, 4))
    assert round_robin(instance).bundles == (frozenset({0, 2}), frozenset({1, 3}))


def test_round_robin_capacity_stops():
    alloc = round_robin(inst([[5, 1]], Uniform(2, 1)))
    assert alloc.bundles == (g(1),) and alloc.unallocated == g(2)


def test_round_robin_rejects_bad_tie_break():
    instance = inst([[1, 1]] * 2, Uniform(2, 2))
    with pytest.raises(ContractError):
        round_robin(instance, [(0, 1)])
    with pytest.raises(ContractError):
        round_robin(instance, [(0, 0), "by-index"])


@settings(max_examples=150, deadline=None)
@given(additive_instances(any_specs(0, 6), max_n=3, values=st.sampled_from([Fraction(0), Fraction(1), Fraction(2)])), st.data())
def test_round_robin_matches_oracle(instance, data):
    m = instance.m
    perms = [tuple(data.draw(st.permutations(range(m)))) for _ in range(instance.n)]
    ranks = [[p.index(x) for x in range(m)] for p in perms]
    alloc = round_robin(instance, perms)
    assert list(alloc.bundles) == oracles.round_robin(rows_of(instance), instance.constraint, ranks)


@settings(max_examples=100, deadline=None)
@given(lex_instances(any_specs(0, 6)))
def test_round_robin_lex_matches_oracle(instance):
    prefs = [("lex", p.order) for p in instance.profile.agents]
    assert list(round_robin(instance).bundles) == oracles.round_robin(prefs, instance.constraint)


def test_round_robin_deterministic():
    instance, tie_break = gen_lemma8(3)
    assert round_robin(instance, tie_break) == round_robin(instance, tie_break)


# --- local search ------------------------------------------------------------


def test_local_search_keeps_optimum():
    instance = gen_lemma5()
    best, _ = solve_max_nsw(instance)
    assert local_search_nsw(instance, best) == best


def test_local_search_single_transfer():
    instance = inst([[5, 1]], Uniform(2, 1))
    assert local_search_nsw(instance, Allocation.empty(1, 2)).bundles == (g(1),)


def test_local_search_grows_support():
    instance = inst([[1, 1], [1, 1]], Uniform(2, 2))
    start = Allocation((frozenset(), g(1, 2)), frozenset())
    out = local_search_nsw(instance, start)
    assert sorted(len(b) for b in out.bundles) == [1, 1]


def test_local_search_rejects_infeasible_start():
    instance = inst([[1, 1, 1]], Uniform(3, 1))
    with pytest.raises(ContractError, match="infeasible start"):
        local_search_nsw(instance, Allocation((g(1, 2),), g(3)))


@settings(max_examples=60, deadline=None)
@given(additive_instances(matroid_specs(1, 6), max_n=3), st.integers(0, 3))
def test_local_search_monotone_and_feasible(instance, rounds):
    start = round_robin(instance)
    out = local_search_nsw(instance, start, max_rounds=rounds)
    out.check(instance)
    assert _objective(instance, out.bundles) >= _objective(instance, start.bundles)
    best, _ = solve_max_nsw(instance)
    assert _objective(instance, out.bundles) <= _objective(instance, best.bundles)


def test_swap_ratio():
    instance = inst([[1, 3], [2, 1]], Uniform(2, 2))
    # j gains from the trade, so the ratio is unbounded
    assert swap_ratio(instance, 0, 1, 0, 1) == float("inf")
    assert swap_ratio(instance, 0, 1, None, 1) == 3
    assert swap_ratio(instance, 1, 0, None, 0) == Fraction(2, 1)


@settings(max_examples=60, deadline=None)
@given(additive_instances(matroid_specs(1, 6), max_n=3))
def test_exchange_moves_are_feasible(instance):
    alloc = round_robin(instance)
    for mv in exchange_moves(instance, alloc.bundles):
        ni, nj = set(alloc.bundles[mv.receiver]), set(alloc.bundles[mv.giver])
        if mv.out_item is not None:
            ni.discard(mv.out_item)
            nj.add(mv.out_item)
        ni.add(mv.in_item)
        nj.discard(mv.in_item)
        assert oracles.independent(instance.constraint, frozenset(ni))
        assert oracles.independent(instance.constraint, frozenset(nj))


def test_partition_spec_round_robin_respects_capacity():
    spec = Partition(((frozenset({0, 1, 2}), 1), (frozenset({3}), 1)))
    alloc = round_robin(inst([[3, 2, 1, 1]], spec))
    assert alloc.bundles == (frozenset({0, 3}),)
