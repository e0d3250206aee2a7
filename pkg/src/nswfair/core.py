"""The two records every module passes around: instances and allocations."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

from nswfair.errors import ContractError
from nswfair.setsystem import Bundle, ConstraintSpec, is_independent
from nswfair.valuations import ValuationProfile


@dataclass(frozen=True)
class Instance:
    items: tuple[str, ...]
    profile: ValuationProfile
    constraint: ConstraintSpec
    metadata: str = ""

    def __post_init__(self) -> None:
        items = tuple(self.items)
        object.__setattr__(self, "items", items)
        if len(set(items)) != len(items):
            raise ContractError("item labels must be unique")
        if self.constraint.size != len(items):
            raise ContractError(
                f"constraint universe has {self.constraint.size} items, instance has {len(items)}"
            )
        if self.profile.n == 0:
            raise ContractError("an instance needs at least one agent")
        if self.profile.m != len(items):
            raise ContractError(f"valuations cover {self.profile.m} items, instance has {len(items)}")

    @property
    def n(self) -> int:
        return self.profile.n

    @property
    def m(self) -> int:
        return len(self.items)

    @property
    def mode(self) -> str:
        return self.profile.mode

    def label_index(self) -> dict[str, int]:
        return {label: g for g, label in enumerate(self.items)}


@dataclass(frozen=True)
class Allocation:
    """One bundle per agent plus the items nobody received."""

    bundles: tuple[Bundle, ...]
    unallocated: Bundle = field(default=frozenset())

    def __post_init__(self) -> None:
        object.__setattr__(self, "bundles", tuple(frozenset(b) for b in self.bundles))
        object.__setattr__(self, "unallocated", frozenset(self.unallocated))

    @classmethod
    def from_bundles(cls, bundles: Iterable[Iterable[int]], m: int) -> Allocation:
        bundles = tuple(frozenset(b) for b in bundles)
        used = frozenset().union(*bundles) if bundles else frozenset()
        return cls(bundles, frozenset(range(m)) - used)

    @classmethod
    def empty(cls, n: int, m: int) -> Allocation:
        return cls((frozenset(),) * n, frozenset(range(m)))

    @classmethod
    def from_assignment(cls, assignment: Sequence[int], n: int) -> Allocation:
        """``assignment[g]`` is the agent receiving ``g``; ``n`` means unallocated."""
        bundles: list[set[int]] = [set() for _ in range(n)]
        rest = set()
        for g, a in enumerate(assignment):
            (rest if a == n else bundles[a]).add(g)
        return cls(tuple(frozenset(b) for b in bundles), frozenset(rest))

    def assignment(self, m: int) -> tuple[int, ...]:
        n = len(self.bundles)
        vec = [n] * m
        for a, b in enumerate(self.bundles):
            for g in b:
                vec[g] = a
        return tuple(vec)

    @property
    def complete(self) -> bool:
        return not self.unallocated

    def check(self, instance: Instance) -> None:
        """Raise :class:`ContractError` unless this is a feasible allocation."""
        if len(self.bundles) != instance.n:
            raise ContractError(f"allocation has {len(self.bundles)} bundles for {instance.n} agents")
        seen: set[int] = set()
        for a, b in enumerate(self.bundles):
            if seen & b:
                raise ContractError(f"bundles overlap on items {sorted(seen & b)}")
            seen |= b
            if not is_independent(instance.constraint, b):
                raise ContractError(f"bundle of agent {a} is not independent")
        if seen & self.unallocated:
            raise ContractError("an item is both allocated and unallocated")
        if seen | self.unallocated != set(range(instance.m)):
            raise ContractError("bundles and unallocated items must cover the universe")
