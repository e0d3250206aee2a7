"""Exact brute-force solvers, constrained Round-Robin and an NSW local search.

The brute-force solvers walk assignment vectors (item 0's recipient first,
agents ``0..n-1`` before "unallocated") depth first, pruning any prefix whose
partial bundle is already dependent. By heredity no completion of a pruned
prefix can be feasible, so the walk visits exactly the feasible allocations,
in ascending assignment-vector order.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from nswfair.core import Allocation, Instance
from nswfair.errors import ContractError, ResourceError
from nswfair.setsystem import (
    ConstraintSpec,
    exchange_bijection,
    is_known_matroid,
    pad_with_dummies,
    with_free_items,
)
from nswfair.valuations import value

DEFAULT_BUDGET = 10**7
_TABLE_LIMIT = 16

TieBreak = Sequence[int] | str | None


class Stage(str, Enum):
    SUPPORT_MAX = "support_max"
    NSW_MAX = "nsw_max"
    SIZE_MAX = "size_max"
    CANONICAL = "canonical"


@dataclass(frozen=True)
class SolveTrace:
    positive_support: frozenset[int]
    candidate_count: int
    stage_reached: Stage


@dataclass(frozen=True)
class SwapCandidate:
    giver: int
    receiver: int
    out_item: int | None
    in_item: int | None
    rho: Fraction | float


def independence_oracle(spec: ConstraintSpec) -> Callable[[int], bool]:
    """Bitmask membership test, tabulated for small universes."""
    if spec.size <= _TABLE_LIMIT:
        table = bytearray(1 << spec.size)
        for mask in range(1 << spec.size):
            table[mask] = mask == 0 or spec.independent_mask(mask)
        return table.__getitem__
    cache: dict[int, bool] = {0: True}

    def check(mask: int) -> bool:
        hit = cache.get(mask)
        if hit is None:
            hit = cache[mask] = spec.independent_mask(mask)
        return hit

    return check


def check_budget(instance: Instance, budget: int = DEFAULT_BUDGET) -> None:
    count = (instance.n + 1) ** instance.m
    if count > budget:
        raise ResourceError(
            f"exhaustive search over (n+1)^m = {count} assignment vectors exceeds the budget "
            f"of {budget}; use local_search_nsw for instances of this size"
        )


def integer_weights(instance: Instance) -> list[list[int]]:
    """Per-agent item weights as integers with a shared scale.

    Additive values are multiplied by the lcm of all denominators, so sums,
    products over equally sized agent sets and cross-agent comparisons keep
    their exact order. Lexicographic agents get their surrogate powers of two.
    """
    agents = instance.profile.agents
    if instance.mode == "lex":
        return [list(p.surrogate_weights()) for p in agents]  # type: ignore[union-attr]
    scale = 1
    for v in agents:
        for x in v.values:  # type: ignore[union-attr]
            scale = math.lcm(scale, x.denominator)
    return [[int(x * scale) for x in v.values] for v in agents]  # type: ignore[union-attr]


def walk_allocations(
    instance: Instance,
    visit: Callable[[list[int], list[int]], bool | None],
    *,
    weights: list[list[int]] | None = None,
    lower: Sequence[int] | None = None,
    budget: int = DEFAULT_BUDGET,
) -> int:
    """Call ``visit(masks, utils)`` on every feasible allocation in canonical order.

    ``masks[a]`` is agent ``a``'s bundle as a bitmask and ``utils[a]`` its
    utility under ``weights`` (default :func:`integer_weights`). Both lists
    are reused between calls. ``visit`` returning ``True`` stops the walk.
    With ``lower`` set, prefixes where some agent can no longer reach
    ``lower[a]`` are pruned. Returns the number of leaves visited.
    """
    check_budget(instance, budget)
    n, m = instance.n, instance.m
    w = weights if weights is not None else integer_weights(instance)
    indep = independence_oracle(instance.constraint)
    masks = [0] * n
    utils = [0] * n
    # suffix[a][j]: most agent a could still gain from items j..m-1
    suffix = [[0] * (m + 1) for _ in range(n)]
    for a in range(n):
        for j in range(m - 1, -1, -1):
            suffix[a][j] = suffix[a][j + 1] + w[a][j]
    agents = range(n)
    leaves = 0
    stop = False

    def reachable(j: int) -> bool:
        for a in agents:
            if utils[a] + suffix[a][j] < lower[a]:  # type: ignore[index]
                return False
        return True

    def rec(j: int) -> None:
        nonlocal leaves, stop
        if j == m:
            leaves += 1
            if visit(masks, utils):
                stop = True
            return
        bit = 1 << j
        nxt = j + 1
        for a in agents:
            new = masks[a] | bit
            if not indep(new):
                continue
            masks[a] = new
            utils[a] += w[a][j]
            if lower is None or reachable(nxt):
                rec(nxt)
            masks[a] = new ^ bit
            utils[a] -= w[a][j]
            if stop:
                return
        if lower is None or reachable(nxt):
            rec(nxt)

    rec(0)
    return leaves


def _masks_to_allocation(masks: Sequence[int], m: int) -> Allocation:
    bundles = [frozenset(g for g in range(m) if mask >> g & 1) for mask in masks]
    return Allocation.from_bundles(bundles, m)


def solve_max_nsw(instance: Instance, *, budget: int = DEFAULT_BUDGET) -> tuple[Allocation, SolveTrace]:
    """Exact Max-NSW allocation selected by the four-stage order.

    1. most agents with positive utility;
    2. largest utility product over those agents;
    3. most items held by those agents;
    4. smallest assignment vector.

    Agents outside the winning support end with empty bundles; their items
    are returned as unallocated.
    """
    instance.profile.require_additive("Max-NSW")
    n, m = instance.n, instance.m
    agents = range(n)

    # (key, vector) of the best and the runner-up distinct normalized allocation
    best: tuple[tuple[int, int, int], tuple[int, ...]] | None = None
    second: tuple[tuple[int, int, int], tuple[int, ...]] | None = None

    def better(x, y) -> bool:
        return x[0] > y[0] or (x[0] == y[0] and x[1] < y[1])

    def visit(masks: list[int], utils: list[int]) -> None:
        nonlocal best, second
        size = 0
        prod = 1
        count = 0
        for a in agents:
            u = utils[a]
            if u > 0:
                size += 1
                prod *= u
                count += masks[a].bit_count()
        key = (size, prod, count)
        if second is not None and key < second[0]:
            return
        vec = [n] * m
        for a in agents:
            if utils[a] > 0:
                mask = masks[a]
                g = 0
                while mask:
                    if mask & 1:
                        vec[g] = a
                    mask >>= 1
                    g += 1
        cand = (key, tuple(vec))
        if best is None or better(cand, best):
            if best is not None and best[1] != cand[1]:
                second = best
            best = cand
        elif cand[1] != best[1] and (second is None or better(cand, second)):
            second = cand

    leaves = walk_allocations(instance, visit, budget=budget)
    assert best is not None  # the all-unallocated vector is always feasible
    alloc = Allocation.from_assignment(best[1], n)
    support = frozenset(a for a in agents if value(instance.profile.agents[a], alloc.bundles[a]) > 0)
    if second is None or second[0][0] < best[0][0]:
        stage = Stage.SUPPORT_MAX
    elif second[0][1] < best[0][1]:
        stage = Stage.NSW_MAX
    elif second[0][2] < best[0][2]:
        stage = Stage.SIZE_MAX
    else:
        stage = Stage.CANONICAL
    alloc.check(instance)
    return alloc, SolveTrace(support, leaves, stage)


def max_nsw_allocations(instance: Instance, *, budget: int = DEFAULT_BUDGET) -> list[Allocation]:
    """Every feasible allocation attaining the maximum of plain ``prod_i v_i(A_i)``."""
    instance.profile.require_additive("Max-NSW")
    m = instance.m
    best_val = -1
    found: list[tuple[int, ...]] = []

    def visit(masks: list[int], utils: list[int]) -> None:
        nonlocal best_val, found
        prod = math.prod(utils)
        if prod > best_val:
            best_val, found = prod, [tuple(masks)]
        elif prod == best_val:
            found.append(tuple(masks))

    walk_allocations(instance, visit, budget=budget)
    return [_masks_to_allocation(ms, m) for ms in found]


def solve_leximin(instance: Instance, *, budget: int = DEFAULT_BUDGET) -> Allocation:
    """Feasible allocation whose ascending utility vector is lexicographically largest."""
    instance.profile.require_additive("leximin")
    m = instance.m
    best_key: list[int] | None = None
    best_masks: tuple[int, ...] = ()

    def visit(masks: list[int], utils: list[int]) -> None:
        nonlocal best_key, best_masks
        key = sorted(utils)
        if best_key is None or key > best_key:
            best_key, best_masks = key, tuple(masks)

    walk_allocations(instance, visit, budget=budget)
    alloc = _masks_to_allocation(best_masks, m)
    alloc.check(instance)
    return alloc


def _normalize_tie_break(instance: Instance, tie_break) -> list[dict[int, int]]:
    """Per-agent rank maps; lower rank wins a value tie."""
    n, m = instance.n, instance.m
    by_index = {g: g for g in range(m)}
    if tie_break is None or tie_break == "by-index":
        return [by_index] * n
    if len(tie_break) != n:
        raise ContractError(f"tie_break needs one entry per agent ({n})")
    ranks = []
    for entry in tie_break:
        if entry is None or entry == "by-index":
            ranks.append(by_index)
            continue
        perm = tuple(entry)
        if sorted(perm) != list(range(m)):
            raise ContractError("a tie_break permutation must list every item once")
        ranks.append({g: pos for pos, g in enumerate(perm)})
    return ranks


def round_robin(instance: Instance, tie_break=None) -> Allocation:
    """Round-Robin where each pick must keep the picker's bundle independent.

    Agents pick in index order. An agent with no feasible remaining item is
    dropped for good; picking continues until every agent is dropped or no
    items remain. Additive agents take a highest-valued feasible item, with
    value ties settled by ``tie_break`` (``"by-index"`` or, per agent, a
    permutation of the items or ``"by-index"``). Lexicographic agents take
    their best-ranked feasible item.
    """
    n, m = instance.n, instance.m
    indep = independence_oracle(instance.constraint)
    ranks = _normalize_tie_break(instance, tie_break)
    profile = instance.profile.agents
    lex = instance.mode == "lex"

    def preference(a: int, g: int):
        if lex:
            return (-profile[a].order.index(g),)  # type: ignore[union-attr]
        return (profile[a].values[g], -ranks[a][g])  # type: ignore[union-attr]

    remaining = set(range(m))
    masks = [0] * n
    active = list(range(n))
    while active and remaining:
        for a in list(active):
            if not remaining:
                break
            options = [g for g in remaining if indep(masks[a] | 1 << g)]
            if not options:
                active.remove(a)
                continue
            pick = max(options, key=lambda g: preference(a, g))
            masks[a] |= 1 << pick
            remaining.discard(pick)
    alloc = _masks_to_allocation(masks, m)
    alloc.check(instance)
    return alloc


def _objective(instance: Instance, bundles: Sequence[frozenset[int]]) -> tuple[int, Fraction, int]:
    size, prod, count = 0, Fraction(1), 0
    for v, b in zip(instance.profile.agents, bundles):
        u = value(v, b)  # type: ignore[arg-type]
        if u > 0:
            size += 1
            prod *= u
            count += len(b)
    return size, prod, count


def swap_ratio(instance: Instance, i: int, j: int, out_item: int | None, in_item: int | None) -> Fraction | float:
    """Gain ratio of agent ``i`` giving ``out_item`` to ``j`` for ``in_item``.

    ``None`` stands for a zero-value padding item. The ratio is infinite when
    ``j`` does not lose value.
    """
    vi, vj = instance.profile.agents[i], instance.profile.agents[j]

    def val(v, g):
        return Fraction(0) if g is None else v.values[g]

    num = val(vi, in_item) - val(vi, out_item)
    den = val(vj, in_item) - val(vj, out_item)
    if den <= 0:
        return math.inf
    return num / den


def exchange_moves(instance: Instance, bundles: Sequence[frozenset[int]]) -> list[SwapCandidate]:
    """Best bijection-guided exchange for every ordered agent pair.

    For agents ``i`` and ``j`` the smaller bundle is padded with free
    zero-value items, an exchange bijection between the two equal-size
    bundles is built, and among pairs where ``i`` strictly gains the one
    with maximal swap ratio is kept. Matroid constraints only.
    """
    spec = instance.constraint
    m = instance.m
    out: list[SwapCandidate] = []
    for i in range(instance.n):
        for j in range(instance.n):
            if i == j or not bundles[j]:
                continue
            bi, bj = bundles[i], bundles[j]
            size = max(len(bi), len(bj))
            extra = (size - len(bi)) + (size - len(bj))
            ext = with_free_items(spec, extra)
            pi = pad_with_dummies(m, bi, size)
            pj = pad_with_dummies(m + (size - len(bi)), bj, size)
            sigma = exchange_bijection(ext, pi, pj)
            best: SwapCandidate | None = None
            for z in sorted(pi):
                y = sigma[z]
                out_item = z if z < m else None
                in_item = y if y < m else None
                if in_item is None:
                    continue
                vi = instance.profile.agents[i]
                gain = vi.values[in_item] - (vi.values[out_item] if out_item is not None else 0)  # type: ignore[union-attr]
                if gain <= 0:
                    continue
                rho = swap_ratio(instance, i, j, out_item, in_item)
                if best is None or rho > best.rho:
                    best = SwapCandidate(giver=j, receiver=i, out_item=out_item, in_item=in_item, rho=rho)
            if best is not None:
                out.append(best)
    return out


def local_search_nsw(
    instance: Instance,
    start: Allocation,
    max_rounds: int = 1000,
    *,
    matroid: bool | None = None,
) -> Allocation:
    """Hill-climb on (support size, NSW over support, items held by support).

    Each round applies the best strictly improving move among single-item
    transfers (also from the unallocated pool), pairwise item swaps,
    bijection-guided exchanges (matroid constraints only) and
    support-growing moves for zero-utility agents (take over another bundle,
    or split it as ``A_j - g`` / ``{g}``, releasing the old bundle). Stops at a local optimum or after
    ``max_rounds`` rounds; no global guarantee.
    """
    instance.profile.require_additive("NSW local search")
    try:
        start.check(instance)
    except ContractError as exc:
        raise ContractError(f"infeasible start allocation: {exc}") from exc
    if matroid is None:
        matroid = bool(is_known_matroid(instance.constraint))
    spec = instance.constraint
    n, m = instance.n, instance.m
    indep = independence_oracle(spec)

    def ok(b: frozenset[int]) -> bool:
        mask = 0
        for g in b:
            mask |= 1 << g
        return indep(mask)

    bundles = list(start.bundles)
    current = _objective(instance, bundles)
    for _ in range(max_rounds):
        pool = frozenset(range(m)).difference(*bundles)
        candidates: list[list[frozenset[int]]] = []

        for i in range(n):
            for g in sorted(pool):
                nb = bundles[i] | {g}
                if ok(nb):
                    cand = list(bundles)
                    cand[i] = nb
                    candidates.append(cand)
            for j in range(n):
                if i == j:
                    continue
                for g in sorted(bundles[j]):
                    nb = bundles[i] | {g}
                    if ok(nb):
                        cand = list(bundles)
                        cand[i], cand[j] = nb, bundles[j] - {g}
                        candidates.append(cand)
                if i < j:
                    for g in sorted(bundles[i]):
                        for h in sorted(bundles[j]):
                            ni, nj = (bundles[i] - {g}) | {h}, (bundles[j] - {h}) | {g}
                            if ok(ni) and ok(nj):
                                cand = list(bundles)
                                cand[i], cand[j] = ni, nj
                                candidates.append(cand)

        if matroid:
            for mv in exchange_moves(instance, bundles):
                i, j = mv.receiver, mv.giver
                ni, nj = set(bundles[i]), set(bundles[j])
                if mv.out_item is not None:
                    ni.discard(mv.out_item)
                    nj.add(mv.out_item)
                ni.add(mv.in_item)  # type: ignore[arg-type]
                nj.discard(mv.in_item)  # type: ignore[arg-type]
                ni_f, nj_f = frozenset(ni), frozenset(nj)
                if ok(ni_f) and ok(nj_f):
                    cand = list(bundles)
                    cand[i], cand[j] = ni_f, nj_f
                    candidates.append(cand)

        for i in range(n):
            if value(instance.profile.agents[i], bundles[i]) > 0:  # type: ignore[arg-type]
                continue
            for j in range(n):
                if i == j or not bundles[j]:
                    continue
                cand = list(bundles)
                cand[i], cand[j] = bundles[j], bundles[i]
                candidates.append(cand)
                for g in sorted(bundles[j]):
                    cand = list(bundles)
                    cand[i], cand[j] = bundles[j] - {g}, frozenset({g})
                    candidates.append(cand)

        best_cand, best_obj = None, current
        for cand in candidates:
            obj = _objective(instance, cand)
            if obj > best_obj:
                best_cand, best_obj = cand, obj
        if best_cand is None:
            break
        bundles, current = best_cand, best_obj

    alloc = Allocation.from_bundles(bundles, m)
    alloc.check(instance)
    return alloc


__all__ = [
    "DEFAULT_BUDGET",
    "SolveTrace",
    "Stage",
    "SwapCandidate",
    "check_budget",
    "exchange_moves",
    "independence_oracle",
    "integer_weights",
    "local_search_nsw",
    "max_nsw_allocations",
    "round_robin",
    "solve_leximin",
    "solve_max_nsw",
    "swap_ratio",
    "walk_allocations",
]
