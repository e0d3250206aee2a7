"""Worst-case constructions, seeded random instances and the JSON file formats.

Instance file::

    {"agents": 2, "constraint": {...}, "items": ["g1", ...],
     "metadata": "", "mode": "additive", "valuations": [["1", "3/2", ...], ...]}

Lexicographic instances carry ``"mode": "lex"`` and ``"orders"`` (item labels,
best first) instead of ``"valuations"``. Constraint objects are one of::

    {"type": "uniform", "capacity": k}
    {"type": "partition", "categories": [{"items": [...], "capacity": k}, ...]}
    {"type": "truncation", "rank": r, "base": {...}}
    {"type": "explicit", "generators": [[...], ...]}

Allocation file: ``{"bundles": [[labels], ...], "unallocated": [labels]}``.
Rationals are strings ``"p/q"`` or ``"p"``; floats are rejected.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any

from nswfair.core import Allocation, Instance
from nswfair.errors import ContractError, ParseError
from nswfair.setsystem import (
    ConstraintSpec,
    DEFAULT_MAX_FAMILY,
    Explicit,
    Partition,
    Truncation,
    Uniform,
)
from nswfair.valuations import (
    AdditiveValuation,
    LexPreference,
    ValuationProfile,
    format_rational,
    parse_rational,
)

SPEC_KINDS = ("uniform", "partition", "truncation", "explicit")
VALUATION_CLASSES = ("additive", "identical", "binary", "identical_binary", "two_valued", "lexicographic")


def labels(m: int) -> tuple[str, ...]:
    return tuple(f"g{j + 1}" for j in range(m))


def _g(*one_based: int) -> frozenset[int]:
    return frozenset(j - 1 for j in one_based)


def _additive(spec: ConstraintSpec, rows, metadata: str) -> Instance:
    return Instance(labels(spec.size), ValuationProfile.additive(rows), spec, metadata)


def gen_lemma4(k: int, delta: Fraction | str) -> Instance:
    """Two agents, 2k+2 items, capacity k+1.

    Agent 1 values the first k+1 items at 2k+1-delta and the rest at k;
    agent 2 values the first k+1 items at k and the rest at 0.
    """
    delta = parse_rational(delta)
    if k < 1 or not 0 < delta < 1:
        raise ContractError("gen_lemma4 needs k >= 1 and 0 < delta < 1")
    half = k + 1
    big = 2 * k + 1 - delta
    rows = [[big] * half + [Fraction(k)] * half, [Fraction(k)] * half + [Fraction(0)] * half]
    return _additive(Uniform(2 * half, half), rows, f"lemma4 k={k} delta={format_rational(delta)}")


def gen_lemma5() -> Instance:
    spec = Explicit(8, (_g(1, 2), _g(1, 3, 4, 7, 8), _g(2, 3, 4, 7, 8), _g(3, 4, 5, 6, 7, 8)))
    return _additive(spec, [[1] * 8, [1] * 8], "lemma5")


def gen_lemma6() -> Instance:
    # g7, g8 appear in no generator and are dropped from the universe
    spec = Explicit(6, (_g(1, 2), _g(1, 3, 4), _g(2, 3, 4), _g(3, 4, 5, 6)))
    return _additive(spec, [[1] * 6, [1] * 6], "lemma6 (universe trimmed to g1..g6)")


def gen_lemma7(delta: Fraction | str) -> Instance:
    """Identical agents; g1 worth 1+delta and alone in its generator, 1/delta
    further items worth 4*delta each forming the other generator."""
    delta = parse_rational(delta)
    if delta <= 0 or (1 / delta).denominator != 1:
        raise ContractError("gen_lemma7 needs 1/delta to be a positive integer")
    m = 1 + int(1 / delta)
    spec = Explicit(m, (frozenset({0}), frozenset(range(1, m))))
    row = [1 + delta] + [4 * delta] * (m - 1)
    return _additive(spec, [row, list(row)], f"lemma7 delta={format_rational(delta)}")


def gen_lemma8(eta: int) -> tuple[Instance, tuple[tuple[int, ...], str]]:
    """Unit values under a partition matroid: 2*eta items with capacity eta,
    plus eta singleton categories. Also returns the adversarial Round-Robin
    tie-break (agent 1 prefers the singletons first, agent 2 goes by index)."""
    if eta < 2:
        raise ContractError("gen_lemma8 needs eta >= 2")
    m = 3 * eta
    cats = [(frozenset(range(2 * eta)), eta)] + [(frozenset({j}), 1) for j in range(2 * eta, m)]
    inst = _additive(Partition(tuple(cats)), [[1] * m, [1] * m], f"lemma8 eta={eta}")
    return inst, lemma8_tie_break(eta)


def lemma8_tie_break(eta: int) -> tuple[tuple[int, ...], str]:
    first = tuple(range(2 * eta, 3 * eta)) + tuple(range(2 * eta))
    return first, "by-index"


@dataclass(frozen=True)
class GeneratorParams:
    seed: int
    n: int
    m: int
    spec_kind: str = "partition"
    valuation_class: str = "additive"
    a: Fraction | None = None
    value_range: tuple[Fraction, Fraction] = (Fraction(0), Fraction(10))

    def __post_init__(self) -> None:
        if self.spec_kind not in SPEC_KINDS:
            raise ContractError(f"spec_kind must be one of {SPEC_KINDS}")
        if self.valuation_class not in VALUATION_CLASSES:
            raise ContractError(f"valuation_class must be one of {VALUATION_CLASSES}")
        if self.n < 1 or self.m < 0:
            raise ContractError("need n >= 1 and m >= 0")
        if self.valuation_class == "two_valued" and (self.a is None or Fraction(self.a) <= 1):
            raise ContractError("two_valued valuations need a > 1")
        if self.spec_kind == "explicit" and 4 * (1 << max(self.m - 1, 0)) > DEFAULT_MAX_FAMILY:
            raise ContractError(f"explicit families over m={self.m} items exceed the classification cap")
        lo, hi = self.value_range
        if not 0 <= Fraction(lo) <= Fraction(hi):
            raise ContractError("value_range must satisfy 0 <= lo <= hi")


def _random_partition(rng: random.Random, m: int) -> Partition:
    count = rng.randint(1, max(1, min(m, 3)))
    groups: list[list[int]] = [[] for _ in range(count)]
    for g in range(m):
        groups[rng.randrange(count)].append(g)
    cats = tuple((frozenset(grp), rng.randint(1, len(grp))) for grp in groups if grp)
    if not cats:
        cats = ((frozenset(), 0),)
    return Partition(cats)


def _random_spec(rng: random.Random, kind: str, m: int) -> ConstraintSpec:
    if kind == "uniform":
        return Uniform(m, rng.randint(1, max(1, m - 1)))
    if kind == "partition":
        return _random_partition(rng, m)
    if kind == "truncation":
        base = _random_partition(rng, m)
        top = sum(cap for _, cap in base.categories)
        return Truncation(base, rng.randint(1, max(1, top)))
    gens = []
    for _ in range(rng.randint(2, 4)):
        size = rng.randint(1, max(1, m - 1)) if m else 0
        gens.append(frozenset(rng.sample(range(m), min(size, m))))
    return Explicit(m, tuple(gens))


def _random_value(rng: random.Random, lo: Fraction, hi: Fraction) -> Fraction:
    den = rng.randint(1, 10)
    return Fraction(rng.randint(int(lo * den), int(hi * den)), den)


def gen_random(params: GeneratorParams) -> Instance:
    """Deterministic function of ``params``; the same seed gives the same instance."""
    rng = random.Random(params.seed)
    n, m = params.n, params.m
    spec = _random_spec(rng, params.spec_kind, m)
    vc = params.valuation_class
    lo, hi = Fraction(params.value_range[0]), Fraction(params.value_range[1])
    if vc == "lexicographic":
        orders = []
        for _ in range(n):
            perm = list(range(m))
            rng.shuffle(perm)
            orders.append(tuple(perm))
        profile = ValuationProfile.lexicographic(orders)
    else:
        def row() -> list[Fraction]:
            if vc in ("binary", "identical_binary"):
                return [Fraction(rng.randint(0, 1)) for _ in range(m)]
            if vc == "two_valued":
                return [rng.choice((Fraction(1), Fraction(params.a))) for _ in range(m)]
            return [_random_value(rng, lo, hi) for _ in range(m)]

        if vc in ("identical", "identical_binary"):
            first = row()
            rows = [first] * n
        else:
            rows = [row() for _ in range(n)]
        profile = ValuationProfile.additive(rows)
    meta = f"random seed={params.seed} n={n} m={m} spec={params.spec_kind} vals={vc}"
    if params.a is not None:
        meta += f" a={format_rational(Fraction(params.a))}"
    return Instance(labels(m), profile, spec, meta)


# --- serialization -----------------------------------------------------------


def _spec_to_json(spec: ConstraintSpec, items: tuple[str, ...]) -> dict[str, Any]:
    def names(s) -> list[str]:
        return [items[g] for g in sorted(s)]

    if isinstance(spec, Uniform):
        return {"type": "uniform", "capacity": spec.capacity}
    if isinstance(spec, Partition):
        return {
            "type": "partition",
            "categories": [{"items": names(s), "capacity": cap} for s, cap in spec.categories],
        }
    if isinstance(spec, Truncation):
        return {"type": "truncation", "rank": spec.rank, "base": _spec_to_json(spec.base, items)}
    if isinstance(spec, Explicit):
        return {"type": "explicit", "generators": [names(gen) for gen in spec.generators]}
    raise ContractError(f"constraint kind {spec.kind!r} has no file representation")


def instance_to_json(instance: Instance) -> dict[str, Any]:
    items = instance.items
    doc: dict[str, Any] = {
        "items": list(items),
        "agents": instance.n,
        "mode": instance.mode,
        "constraint": _spec_to_json(instance.constraint, items),
        "metadata": instance.metadata,
    }
    if instance.mode == "lex":
        doc["orders"] = [[items[g] for g in p.order] for p in instance.profile.agents]  # type: ignore[union-attr]
    else:
        doc["valuations"] = [[format_rational(x) for x in v.values] for v in instance.profile.agents]  # type: ignore[union-attr]
    return doc


def _field(doc: Any, key: str, path: str, kind: type | tuple[type, ...]) -> Any:
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: expected an object")
    if key not in doc:
        raise ParseError(f"{path}.{key}: missing field")
    val = doc[key]
    if isinstance(val, bool) and kind is int:
        raise ParseError(f"{path}.{key}: expected an integer")
    if not isinstance(val, kind):
        raise ParseError(f"{path}.{key}: expected {getattr(kind, '__name__', kind)}")
    return val


def _item_set(raw: Any, index: dict[str, int], path: str) -> frozenset[int]:
    if not isinstance(raw, list):
        raise ParseError(f"{path}: expected a list of item labels")
    out = set()
    for pos, label in enumerate(raw):
        if label not in index:
            raise ParseError(f"{path}[{pos}]: unknown item {label!r}")
        if index[label] in out:
            raise ParseError(f"{path}[{pos}]: duplicate item {label!r}")
        out.add(index[label])
    return frozenset(out)


def _spec_from_json(doc: Any, index: dict[str, int], path: str) -> ConstraintSpec:
    kind = _field(doc, "type", path, str)
    m = len(index)
    try:
        if kind == "uniform":
            return Uniform(m, _field(doc, "capacity", path, int))
        if kind == "partition":
            cats = _field(doc, "categories", path, list)
            parsed = []
            for c, cat in enumerate(cats):
                cpath = f"{path}.categories[{c}]"
                parsed.append((_item_set(_field(cat, "items", cpath, list), index, f"{cpath}.items"),
                               _field(cat, "capacity", cpath, int)))
            return Partition(tuple(parsed))
        if kind == "truncation":
            base = _spec_from_json(_field(doc, "base", path, dict), index, f"{path}.base")
            return Truncation(base, _field(doc, "rank", path, int))
        if kind == "explicit":
            gens = _field(doc, "generators", path, list)
            return Explicit(m, tuple(_item_set(g, index, f"{path}.generators[{i}]") for i, g in enumerate(gens)))
    except ContractError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    raise ParseError(f"{path}.type: unknown constraint type {kind!r}")


def instance_from_json(doc: Any) -> Instance:
    items = _field(doc, "items", "$", list)
    if not all(isinstance(x, str) for x in items):
        raise ParseError("$.items: labels must be strings")
    if len(set(items)) != len(items):
        raise ParseError("$.items: duplicate labels")
    index = {label: g for g, label in enumerate(items)}
    n = _field(doc, "agents", "$", int)
    mode = _field(doc, "mode", "$", str)
    spec = _spec_from_json(_field(doc, "constraint", "$", dict), index, "$.constraint")
    metadata = doc.get("metadata", "")
    if not isinstance(metadata, str):
        raise ParseError("$.metadata: expected a string")
    agents: list[AdditiveValuation | LexPreference] = []
    if mode == "additive":
        rows = _field(doc, "valuations", "$", list)
        if len(rows) != n:
            raise ParseError(f"$.valuations: expected {n} rows, found {len(rows)}")
        for i, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != len(items):
                raise ParseError(f"$.valuations[{i}]: expected {len(items)} values")
            vals = []
            for j, raw in enumerate(row):
                if isinstance(raw, float):
                    raise ParseError(f"$.valuations[{i}][{j}]: floats are not allowed, use \"p/q\"")
                try:
                    vals.append(parse_rational(raw))
                except (ValueError, ZeroDivisionError) as exc:
                    raise ParseError(f"$.valuations[{i}][{j}]: {exc}") from exc
                if vals[-1] < 0:
                    raise ParseError(f"$.valuations[{i}][{j}]: values must be nonnegative")
            agents.append(AdditiveValuation(tuple(vals)))
    elif mode == "lex":
        orders = _field(doc, "orders", "$", list)
        if len(orders) != n:
            raise ParseError(f"$.orders: expected {n} orders, found {len(orders)}")
        for i, order in enumerate(orders):
            path = f"$.orders[{i}]"
            perm = _item_set(order, index, path)
            if len(perm) != len(items):
                raise ParseError(f"{path}: must rank every item exactly once")
            agents.append(LexPreference(tuple(index[label] for label in order)))
    else:
        raise ParseError(f"$.mode: expected 'additive' or 'lex', found {mode!r}")
    try:
        return Instance(tuple(items), ValuationProfile(tuple(agents)), spec, metadata)
    except ContractError as exc:
        raise ParseError(f"$: {exc}") from exc


def allocation_to_json(instance: Instance, alloc: Allocation) -> dict[str, Any]:
    items = instance.items
    return {
        "bundles": [[items[g] for g in sorted(b)] for b in alloc.bundles],
        "unallocated": [items[g] for g in sorted(alloc.unallocated)],
    }


def allocation_from_json(instance: Instance, doc: Any) -> Allocation:
    index = instance.label_index()
    bundles = _field(doc, "bundles", "$", list)
    if len(bundles) != instance.n:
        raise ParseError(f"$.bundles: expected {instance.n} bundles, found {len(bundles)}")
    parsed = tuple(_item_set(b, index, f"$.bundles[{i}]") for i, b in enumerate(bundles))
    rest = _item_set(doc.get("unallocated", []), index, "$.unallocated")
    alloc = Allocation(parsed, rest)
    used = frozenset().union(*parsed) if parsed else frozenset()
    if len(used) != sum(len(b) for b in parsed):
        raise ParseError("$.bundles: an item appears in two bundles")
    if used & rest:
        raise ParseError("$.unallocated: lists an allocated item")
    if "unallocated" not in doc:
        alloc = Allocation(parsed, frozenset(range(instance.m)) - used)
    elif used | rest != set(range(instance.m)):
        raise ParseError("$.unallocated: bundles and unallocated items must cover every item")
    try:
        alloc.check(instance)
    except ContractError as exc:
        raise ParseError(f"$: {exc}") from exc
    return alloc


def dumps(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _read_json(path: str | Path) -> Any:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def save(instance: Instance, path: str | Path) -> None:
    Path(path).write_text(dumps(instance_to_json(instance)))


def load(path: str | Path) -> Instance:
    try:
        return instance_from_json(_read_json(path))
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def save_alloc(instance: Instance, alloc: Allocation, path: str | Path) -> None:
    Path(path).write_text(dumps(allocation_to_json(instance, alloc)))


def load_alloc(instance: Instance, path: str | Path) -> Allocation:
    try:
        return allocation_from_json(instance, _read_json(path))
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}") from exc


__all__ = [
    "GeneratorParams",
    "Instance",
    "allocation_from_json",
    "allocation_to_json",
    "dumps",
    "gen_lemma4",
    "gen_lemma5",
    "gen_lemma6",
    "gen_lemma7",
    "gen_lemma8",
    "gen_random",
    "instance_from_json",
    "instance_to_json",
    "labels",
    "lemma8_tie_break",
    "load",
    "load_alloc",
    "save",
    "save_alloc",
]
