"""Independence systems over a finite item universe.

Items are dense integer indices ``0..m-1``; a bundle is a ``frozenset`` of
indices. Internally every set is also handled as an integer bitmask, which is
what the exhaustive classifier and the solvers' enumerators consume.

Four declarative constraint kinds are supported:

* :class:`Uniform` -- at most ``capacity`` items;
* :class:`Partition` -- at most ``k_i`` items from each category ``E_i``;
* :class:`Truncation` -- a base system cut down to sets of size ``<= rank``;
* :class:`Explicit` -- subsets of at least one generator (downward closure
  of a list of maximal sets).
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field

from nswfair.errors import ContractError, DomainError, ResourceError

Bundle = frozenset[int]

DEFAULT_MAX_ITEMS = 16
DEFAULT_MAX_FAMILY = 1 << 16
DEFAULT_MAX_WORK = 50_000_000


def to_mask(items: Iterable[int]) -> int:
    mask = 0
    for g in items:
        mask |= 1 << g
    return mask


def mask_items(mask: int) -> tuple[int, ...]:
    out = []
    g = 0
    while mask:
        if mask & 1:
            out.append(g)
        mask >>= 1
        g += 1
    return tuple(out)


def bundle(items: Iterable[int] = ()) -> Bundle:
    return frozenset(items)


def _submasks(mask: int) -> Iterator[int]:
    """All submasks of ``mask`` including ``mask`` itself and 0."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


class ConstraintSpec:
    """Common interface of every constraint kind.

    Subclasses provide ``size`` (universe cardinality) and ``independent_mask``;
    everything else in this module is written against those two members.
    """

    kind: str = "abstract"
    size: int

    def independent_mask(self, mask: int) -> bool:
        raise NotImplementedError


@dataclass(frozen=True)
class Uniform(ConstraintSpec):
    size: int
    capacity: int
    kind = "uniform"

    def __post_init__(self) -> None:
        if self.size < 0 or self.capacity < 0:
            raise ContractError("uniform size and capacity must be nonnegative")

    def independent_mask(self, mask: int) -> bool:
        return mask.bit_count() <= self.capacity


@dataclass(frozen=True)
class Partition(ConstraintSpec):
    """Partition matroid; ``categories`` must partition ``0..m-1``."""

    categories: tuple[tuple[Bundle, int], ...]
    kind = "partition"
    _masks: tuple[tuple[int, int], ...] = field(init=False, repr=False, compare=False)
    _size: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        cats = tuple((frozenset(items), int(cap)) for items, cap in self.categories)
        object.__setattr__(self, "categories", cats)
        seen: set[int] = set()
        for items, cap in cats:
            if cap < 0:
                raise ContractError("partition capacities must be nonnegative")
            if seen & items:
                raise ContractError(f"partition categories overlap on {sorted(seen & items)}")
            seen |= items
        size = len(seen)
        if seen != set(range(size)):
            raise ContractError("partition categories must cover a dense universe 0..m-1")
        object.__setattr__(self, "_size", size)
        object.__setattr__(self, "_masks", tuple((to_mask(items), cap) for items, cap in cats))

    @property
    def size(self) -> int:
        return self._size

    def independent_mask(self, mask: int) -> bool:
        for cat, cap in self._masks:
            if (mask & cat).bit_count() > cap:
                return False
        return True


@dataclass(frozen=True)
class Truncation(ConstraintSpec):
    base: ConstraintSpec
    rank: int
    kind = "truncation"

    def __post_init__(self) -> None:
        if self.rank < 0:
            raise ContractError("truncation rank must be nonnegative")

    @property
    def size(self) -> int:
        return self.base.size

    def independent_mask(self, mask: int) -> bool:
        return mask.bit_count() <= self.rank and self.base.independent_mask(mask)


@dataclass(frozen=True)
class Explicit(ConstraintSpec):
    """Downward closure of ``generators``; independent iff inside some generator."""

    size: int
    generators: tuple[Bundle, ...]
    kind = "explicit"
    _gen_masks: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        gens = tuple(frozenset(g) for g in self.generators)
        if not gens:
            raise ContractError("explicit family needs at least one generator")
        for g in gens:
            bad = [x for x in g if not 0 <= x < self.size]
            if bad:
                raise DomainError(f"generator items {bad} outside universe of size {self.size}")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "_gen_masks", tuple(to_mask(g) for g in gens))

    def independent_mask(self, mask: int) -> bool:
        for gen in self._gen_masks:
            if mask & ~gen == 0:
                return True
        return False


@dataclass(frozen=True)
class FreeExtension(ConstraintSpec):
    """``base`` plus ``extra`` zero-value padding items that never cause dependence.

    The padding items take the indices ``base.size .. base.size+extra-1``. This is
    the direct sum of ``base`` with a free matroid, so it is a matroid whenever
    ``base`` is.
    """

    base: ConstraintSpec
    extra: int
    kind = "free-extension"

    @property
    def size(self) -> int:
        return self.base.size + self.extra

    def independent_mask(self, mask: int) -> bool:
        return self.base.independent_mask(mask & ((1 << self.base.size) - 1))


def is_known_matroid(spec: ConstraintSpec) -> bool | None:
    """Structural matroid test: ``True``/``False`` when decidable without search."""
    if isinstance(spec, (Uniform, Partition)):
        return True
    if isinstance(spec, (Truncation, FreeExtension)):
        return is_known_matroid(spec.base)
    return None


def _check_universe(spec: ConstraintSpec, s: Iterable[int]) -> int:
    mask = 0
    for g in s:
        if not isinstance(g, int) or not 0 <= g < spec.size:
            raise DomainError(f"item {g!r} outside universe 0..{spec.size - 1}")
        mask |= 1 << g
    return mask


def is_independent(spec: ConstraintSpec, s: Iterable[int]) -> bool:
    """Membership query; the empty set is always independent."""
    mask = _check_universe(spec, s)
    if mask == 0:
        return True
    return spec.independent_mask(mask)


def augment(spec: ConstraintSpec, c: Iterable[int], d: Iterable[int]) -> int | None:
    """Smallest ``x`` in ``d - c`` with ``c + x`` independent, or ``None``.

    ``None`` certifies that ``spec`` violates the matroid augmentation axiom
    on the pair ``(c, d)``.
    """
    c, d = frozenset(c), frozenset(d)
    cm = _check_universe(spec, c)
    _check_universe(spec, d)
    if not (is_independent(spec, c) and is_independent(spec, d)):
        raise ContractError("augment requires both sets to be independent")
    if len(d) <= len(c):
        raise ContractError("augment requires |d| > |c|")
    for x in sorted(d - c):
        if spec.independent_mask(cm | (1 << x)):
            return x
    return None


def independent_sets(
    spec: ConstraintSpec,
    *,
    max_items: int = DEFAULT_MAX_ITEMS,
    max_family: int = DEFAULT_MAX_FAMILY,
) -> list[int]:
    """Every independent set as a bitmask, sorted ascending.

    Structured specs are enumerated over all ``2^m`` subsets and need
    ``m <= max_items``; explicit families are expanded from their generators
    and need the summed power-set sizes to stay within ``max_family``.
    """
    if isinstance(spec, Explicit):
        total = sum(1 << len(g) for g in spec.generators)
        if total > max_family:
            raise ResourceError(
                f"explicit family expands to up to {total} sets, above the cap of "
                f"{max_family}; raise max_family or shrink the generators"
            )
        family: set[int] = set()
        for gen in spec._gen_masks:
            family.update(_submasks(gen))
        return sorted(family)
    if spec.size > max_items:
        raise ResourceError(
            f"exhaustive enumeration over {spec.size} items exceeds the cap of "
            f"{max_items}; classification quantifies over all subsets"
        )
    return [mask for mask in range(1 << spec.size) if mask == 0 or spec.independent_mask(mask)]


@dataclass(frozen=True)
class Witness:
    """A concrete ``(C, D, H)`` configuration; ``H`` is ``{x}`` for single additions."""

    kind: str
    c: Bundle
    d: Bundle
    h: Bundle = frozenset()


@dataclass(frozen=True)
class ClassificationReport:
    is_hereditary: bool
    is_matroid: bool
    min_extendibility: int | None
    min_strong_extendibility: int | None
    p_bound: int
    family_size: int
    violation_witness: Witness | None = None
    extendibility_witness: Witness | None = None
    strong_witness: Witness | None = None

    def describe(self) -> str:
        def fmt(p: int | None) -> str:
            return str(p) if p is not None else f">={self.p_bound + 1}"

        return (
            f"hereditary: {str(self.is_hereditary).lower()}, "
            f"matroid: {str(self.is_matroid).lower()}, "
            f"p-extendible: {fmt(self.min_extendibility)}, "
            f"strongly p-extendible: {fmt(self.min_strong_extendibility)}"
        )


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def classify(
    spec: ConstraintSpec,
    p_bound: int = 8,
    *,
    max_items: int = DEFAULT_MAX_ITEMS,
    max_family: int = DEFAULT_MAX_FAMILY,
    max_work: int = DEFAULT_MAX_WORK,
) -> ClassificationReport:
    """Exhaustively classify the family described by ``spec``.

    The matroid test checks the augmentation axiom on every pair with
    ``|D| = |C| + 1`` (equivalent to the general axiom under heredity).

    For extendibility, the removal needed by a triple ``(C, D, H)`` is
    ``|D| - max{|S| : C <= S <= D, S | H independent}``. That quantity grows
    with ``D`` (removing extra items of a larger ``D`` at most adds them to the
    count), so only maximal ``D`` are scanned; for fixed ``(D, H)`` the worst
    ``C`` is the smallest maximal independent-with-``H`` subset of ``D - H``.
    Single-element ``H`` give Definition-3 extendibility, all nonempty ``H``
    give the strong variant with ratio ``ceil(need / |H|)``.
    """
    if p_bound < 1:
        raise ContractError("p_bound must be a positive integer")
    family = independent_sets(spec, max_items=max_items, max_family=max_family)
    member = set(family)
    universe = spec.size

    violation: Witness | None = None

    hereditary = 0 in member
    if not hereditary:
        violation = Witness("heredity", frozenset(), frozenset())
    else:
        for s in family:
            rest = s
            while rest:
                low = rest & -rest
                rest ^= low
                if s ^ low not in member:
                    hereditary = False
                    violation = Witness("heredity", frozenset(mask_items(s ^ low)), frozenset(mask_items(s)))
                    break
            if not hereditary:
                break

    by_size: dict[int, list[int]] = {}
    for s in family:
        by_size.setdefault(s.bit_count(), []).append(s)
    work = sum(len(by_size.get(k, ())) * len(by_size.get(k + 1, ())) for k in by_size)
    if work > max_work:
        raise ResourceError(f"augmentation check needs {work} pair tests (cap {max_work})")

    all_bits = (1 << universe) - 1
    extensions: dict[int, int] = {}
    for s in family:
        ext = 0
        rest = all_bits & ~s
        while rest:
            low = rest & -rest
            rest ^= low
            if s | low in member:
                ext |= low
        extensions[s] = ext

    is_matroid = hereditary
    if hereditary:
        for k in sorted(by_size):
            for c in by_size[k]:
                ext = extensions[c]
                for d in by_size.get(k + 1, ()):
                    if (d & ~c) & ext == 0:
                        is_matroid = False
                        if violation is None:
                            violation = Witness(
                                "augmentation", frozenset(mask_items(c)), frozenset(mask_items(d))
                            )
                        break
                if not is_matroid:
                    break
            if not is_matroid:
                break

    if not hereditary:
        return ClassificationReport(
            False, False, None, None, p_bound, len(family), violation_witness=violation
        )

    maximal = [s for s in family if extensions[s] == 0]
    largest = max((d.bit_count() for d in maximal), default=0)
    work = len(maximal) * len(family) * (1 << largest)
    if work > max_work:
        raise ResourceError(
            f"extendibility scan needs about {work} subset tests (cap {max_work}); "
            "classification is only sound on desk-scale families"
        )

    worst_single, single_w = 0, None
    worst_ratio, ratio_w = 0, None
    for d in maximal:
        for h in family:
            if h == 0 or h & ~d == 0:
                continue
            free = d & ~h
            smallest_max: int | None = None
            smallest_c = 0
            for sub in _submasks(free):
                if sub | h not in member:
                    continue
                size = sub.bit_count()
                if smallest_max is not None and size >= smallest_max:
                    continue
                is_max = True
                rest = free & ~sub
                while rest:
                    low = rest & -rest
                    rest ^= low
                    if sub | low | h in member:
                        is_max = False
                        break
                if is_max:
                    smallest_max, smallest_c = size, sub
            assert smallest_max is not None  # h itself is independent, so sub=0 qualifies
            need = free.bit_count() - smallest_max
            hsize = h.bit_count()
            ratio = _ceil_div(need, hsize)
            triple = Witness("extendibility", frozenset(mask_items(smallest_c)), frozenset(mask_items(d)),
                             frozenset(mask_items(h)))
            if hsize == 1 and need > worst_single:
                worst_single, single_w = need, triple
            if ratio > worst_ratio:
                worst_ratio, ratio_w = ratio, Witness("strong-extendibility", triple.c, triple.d, triple.h)

    p_ext = max(1, worst_single)
    p_strong = max(1, worst_ratio)
    min_ext = p_ext if p_ext <= p_bound else None
    min_strong = p_strong if p_strong <= p_bound else None
    if violation is None and min_ext is None:
        violation = single_w
    if violation is None and min_strong is None:
        violation = ratio_w
    return ClassificationReport(
        is_hereditary=True,
        is_matroid=is_matroid,
        min_extendibility=min_ext,
        min_strong_extendibility=min_strong,
        p_bound=p_bound,
        family_size=len(family),
        violation_witness=violation,
        extendibility_witness=single_w,
        strong_witness=ratio_w,
    )


def _augmenting_matching(adj: dict[int, list[int]], left: list[int], taken: set[int]) -> bool:
    """Kuhn's augmenting-path search: can every vertex of ``left`` be matched
    to a distinct right vertex outside ``taken``?"""
    match_right: dict[int, int] = {}

    def try_assign(z: int, seen: set[int]) -> bool:
        for y in adj[z]:
            if y in taken or y in seen:
                continue
            seen.add(y)
            if y not in match_right or try_assign(match_right[y], seen):
                match_right[y] = z
                return True
        return False

    return all(try_assign(z, set()) for z in left)


def exchange_bijection(spec: ConstraintSpec, i: Iterable[int], j: Iterable[int]) -> dict[int, int]:
    """Bijection ``sigma: i -> j`` with ``i - z + sigma(z)`` and ``j + z - sigma(z)``
    independent for every ``z``.

    Existence is guaranteed for matroids. The returned mapping is the
    lexicographically least perfect matching of the swap-compatibility graph
    (left vertices in index order, each taking its smallest feasible partner),
    found greedily with an augmenting-path feasibility test.
    """
    i, j = frozenset(i), frozenset(j)
    im, jm = _check_universe(spec, i), _check_universe(spec, j)
    if len(i) != len(j):
        raise ContractError("exchange_bijection needs |i| = |j|")
    if not (is_independent(spec, i) and is_independent(spec, j)):
        raise ContractError("exchange_bijection needs independent sets")

    left, right = sorted(i), sorted(j)
    adj: dict[int, list[int]] = {}
    for z in left:
        zb = 1 << z
        adj[z] = [
            y
            for y in right
            if spec.independent_mask((im & ~zb) | (1 << y)) and spec.independent_mask((jm & ~(1 << y)) | zb)
        ]

    sigma: dict[int, int] = {}
    taken: set[int] = set()
    for pos, z in enumerate(left):
        for y in adj[z]:
            if y in taken:
                continue
            taken.add(y)
            if _augmenting_matching(adj, left[pos + 1:], taken):
                sigma[z] = y
                break
            taken.discard(y)
        else:
            raise ContractError("precondition violated: spec is not a matroid (no perfect exchange matching)")

    for z, y in sigma.items():
        assert is_independent(spec, (i - {z}) | {y}) and is_independent(spec, (j - {y}) | {z})
    return sigma


def pad_with_dummies(universe_size: int, small: Iterable[int], target_size: int) -> Bundle:
    """``small`` plus fresh padding items numbered from ``universe_size`` upward."""
    small = frozenset(small)
    missing = target_size - len(small)
    if missing < 0:
        raise ContractError("target_size is smaller than the bundle")
    return small | frozenset(range(universe_size, universe_size + missing))


def with_free_items(spec: ConstraintSpec, count: int) -> ConstraintSpec:
    """``spec`` extended by ``count`` padding items (see :class:`FreeExtension`)."""
    if count == 0:
        return spec
    return FreeExtension(spec, count)


def rank_upper_bound(spec: ConstraintSpec) -> int:
    """Cheap upper bound on the size of any independent set."""
    if isinstance(spec, Uniform):
        return min(spec.size, spec.capacity)
    if isinstance(spec, Partition):
        return sum(min(len(items), cap) for items, cap in spec.categories)
    if isinstance(spec, Truncation):
        return min(spec.rank, rank_upper_bound(spec.base))
    if isinstance(spec, Explicit):
        return max(len(g) for g in spec.generators)
    if isinstance(spec, FreeExtension):
        return rank_upper_bound(spec.base) + spec.extra
    return spec.size


__all__ = [
    "Bundle",
    "ClassificationReport",
    "ConstraintSpec",
    "Explicit",
    "FreeExtension",
    "Partition",
    "Truncation",
    "Uniform",
    "Witness",
    "augment",
    "bundle",
    "classify",
    "exchange_bijection",
    "independent_sets",
    "is_independent",
    "is_known_matroid",
    "mask_items",
    "pad_with_dummies",
    "to_mask",
    "with_free_items",
]
