"""Exact model of mixed-goods instances: rationals, interval sets, bundles, atoms.

All quantities (lengths, sizes, budgets, utilities) are exact
``fractions.Fraction`` values; nothing in this module touches floats.
Goods are identified by their names; their order in ``Instance.goods``
is the canonical order used for tie-breaking everywhere.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import (
    InvalidAllocationError,
    InvalidGroupError,
    MalformedIntervalError,
)

Rational = Fraction


def parse_rational(text: str | int) -> Fraction:
    """Parse a rational from "p/q" (or a bare integer)."""
    return Fraction(text)


def format_rational(value: Fraction) -> str:
    """Serialize a rational as "p/q", omitting "/q" for integers."""
    return str(Fraction(value))


# ---------------------------------------------------------------------------
# Interval sets


@dataclass(frozen=True, order=True)
class IntervalSet:
    """Normalized finite union of disjoint closed subintervals of the cake.

    Invariants: pairs are sorted by lo, pairwise disjoint with
    ``previous.hi < next.lo``, and degenerate pairs (lo == hi) are dropped.
    Closed intervals sharing a single endpoint are merged, since single
    points carry no measure.
    """

    intervals: tuple[tuple[Fraction, Fraction], ...] = ()

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    def measure(self) -> Fraction:
        return sum((hi - lo for lo, hi in self.intervals), Fraction(0))

    def intersect(self, other: "IntervalSet") -> "IntervalSet":
        out: list[tuple[Fraction, Fraction]] = []
        i = j = 0
        a, b = self.intervals, other.intervals
        while i < len(a) and j < len(b):
            lo = max(a[i][0], b[j][0])
            hi = min(a[i][1], b[j][1])
            if lo < hi:
                out.append((lo, hi))
            if a[i][1] <= b[j][1]:
                i += 1
            else:
                j += 1
        return IntervalSet(tuple(out))

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return normalize(list(self.intervals) + list(other.intervals))

    def subtract(self, other: "IntervalSet") -> "IntervalSet":
        """Set difference up to measure zero (endpoints are not tracked)."""
        out: list[tuple[Fraction, Fraction]] = []
        for lo, hi in self.intervals:
            cur = lo
            for olo, ohi in other.intervals:
                if ohi <= cur:
                    continue
                if olo >= hi:
                    break
                if olo > cur:
                    out.append((cur, olo))
                cur = max(cur, ohi)
                if cur >= hi:
                    break
            if cur < hi:
                out.append((cur, hi))
        return normalize(out)

    def contains(self, other: "IntervalSet") -> bool:
        """True if ``other`` is covered by this set (up to measure zero)."""
        return other.subtract(self).is_empty

    def contains_point(self, x: Fraction) -> bool:
        return any(lo <= x <= hi for lo, hi in self.intervals)

    def prefix(self, length: Fraction) -> "IntervalSet":
        """Leftmost sub-piece of the given total length."""
        if length < 0:
            raise MalformedIntervalError("prefix length must be nonnegative")
        out: list[tuple[Fraction, Fraction]] = []
        remaining = Fraction(length)
        for lo, hi in self.intervals:
            if remaining <= 0:
                break
            take = min(hi - lo, remaining)
            out.append((lo, lo + take))
            remaining -= take
        if remaining > 0:
            raise MalformedIntervalError("prefix length exceeds available measure")
        return normalize(out)

    def to_json(self) -> list[list[str]]:
        return [[format_rational(lo), format_rational(hi)] for lo, hi in self.intervals]

    @staticmethod
    def from_json(pairs: Iterable[Sequence[str]]) -> "IntervalSet":
        return normalize([(parse_rational(lo), parse_rational(hi)) for lo, hi in pairs])


def normalize(pairs: Iterable[tuple[Fraction, Fraction]]) -> IntervalSet:
    """Sort, merge, and drop degenerate pairs; reject reversed pairs."""
    cleaned: list[tuple[Fraction, Fraction]] = []
    for lo, hi in pairs:
        lo, hi = Fraction(lo), Fraction(hi)
        if lo > hi:
            raise MalformedIntervalError(f"reversed interval [{lo}, {hi}]")
        if lo < hi:
            cleaned.append((lo, hi))
    cleaned.sort()
    merged: list[tuple[Fraction, Fraction]] = []
    for lo, hi in cleaned:
        if merged and lo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return IntervalSet(tuple(merged))


def measure(s: IntervalSet) -> Fraction:
    return s.measure()


def intersect(s: IntervalSet, t: IntervalSet) -> IntervalSet:
    return s.intersect(t)


EMPTY_CAKE = IntervalSet()


# ---------------------------------------------------------------------------
# Bundles and instances


@dataclass(frozen=True)
class Bundle:
    """A piece of cake together with a set of indivisible goods."""

    cake: IntervalSet = EMPTY_CAKE
    goods: frozenset[str] = frozenset()

    @property
    def is_empty(self) -> bool:
        return self.cake.is_empty and not self.goods

    def size(self) -> Fraction:
        return self.cake.measure() + len(self.goods)

    def intersect(self, other: "Bundle") -> "Bundle":
        return Bundle(self.cake.intersect(other.cake), self.goods & other.goods)

    def union(self, other: "Bundle") -> "Bundle":
        return Bundle(self.cake.union(other.cake), self.goods | other.goods)

    def contains(self, other: "Bundle") -> bool:
        return other.goods <= self.goods and self.cake.contains(other.cake)

    def key(self, good_order: dict[str, int] | None = None) -> tuple:
        """Canonical sort key: goods by instance order, then cake intervals."""
        if good_order is None:
            goods = tuple(sorted(self.goods))
        else:
            goods = tuple(sorted(self.goods, key=good_order.__getitem__))
        return (goods, self.cake.intervals)


EMPTY_BUNDLE = Bundle()


@dataclass(frozen=True)
class Instance:
    """A mixed-goods instance: cake [0, c], goods, approval bundles, and alpha."""

    cake_length: Fraction
    goods: tuple[str, ...]
    agents: tuple[Bundle, ...]
    alpha: Fraction

    def __post_init__(self):
        object.__setattr__(self, "cake_length", Fraction(self.cake_length))
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        object.__setattr__(self, "goods", tuple(self.goods))
        object.__setattr__(self, "agents", tuple(self.agents))
        c, m = self.cake_length, len(self.goods)
        if c < 0:
            raise MalformedIntervalError("cake length must be nonnegative")
        if max(c, m) <= 0:
            raise InvalidAllocationError("instance must contain cake or goods")
        if len(set(self.goods)) != m:
            raise InvalidAllocationError("duplicate good names")
        if not self.agents:
            raise InvalidGroupError("instance needs at least one agent")
        if not (0 < self.alpha <= c + m):
            raise InvalidAllocationError(
                f"alpha must lie in (0, c + m] = (0, {c + m}], got {self.alpha}"
            )
        cake_span = normalize([(Fraction(0), c)]) if c > 0 else EMPTY_CAKE
        good_set = set(self.goods)
        for i, bundle in enumerate(self.agents):
            if not bundle.goods <= good_set:
                raise InvalidAllocationError(f"agent {i} approves unknown goods")
            if not cake_span.contains(bundle.cake):
                raise MalformedIntervalError(
                    f"agent {i} approves cake outside [0, {c}]"
                )
        object.__setattr__(
            self, "good_index", {g: k for k, g in enumerate(self.goods)}
        )

    @property
    def n(self) -> int:
        return len(self.agents)

    @property
    def m(self) -> int:
        return len(self.goods)

    def full_cake(self) -> IntervalSet:
        if self.cake_length == 0:
            return EMPTY_CAKE
        return IntervalSet(((Fraction(0), self.cake_length),))

    def sorted_goods(self, goods: Iterable[str]) -> list[str]:
        return sorted(goods, key=self.good_index.__getitem__)

    def validate_allocation(self, bundle: Bundle) -> None:
        if not bundle.goods <= set(self.goods):
            raise InvalidAllocationError("allocation contains unknown goods")
        if not self.full_cake().contains(bundle.cake):
            raise InvalidAllocationError("allocation cake outside [0, c]")
        if bundle.size() > self.alpha:
            raise InvalidAllocationError(
                f"allocation size {bundle.size()} exceeds alpha {self.alpha}"
            )


def bundle_size(b: Bundle) -> Fraction:
    return b.size()


def utility(inst: Instance, agent: int, allocation: Bundle) -> Fraction:
    """Size of the overlap between the agent's approval and the allocation."""
    if not 0 <= agent < inst.n:
        raise InvalidGroupError(f"agent index {agent} out of range")
    return inst.agents[agent].intersect(allocation).size()


def utilities(inst: Instance, allocation: Bundle) -> list[Fraction]:
    return [inst.agents[i].intersect(allocation).size() for i in range(inst.n)]


def common_bundle(inst: Instance, group: Iterable[int]) -> Bundle:
    """Componentwise intersection of the group's approval bundles."""
    members = sorted(set(group))
    if not members:
        raise InvalidGroupError("group must be nonempty")
    if members[0] < 0 or members[-1] >= inst.n:
        raise InvalidGroupError("agent index out of range")
    acc = inst.agents[members[0]]
    for i in members[1:]:
        acc = acc.intersect(inst.agents[i])
    return acc


# ---------------------------------------------------------------------------
# Atomization


@dataclass(frozen=True)
class Atom:
    """A unit the MES/PAV machinery can price: a good, or a cake interval
    that every agent approves entirely or not at all."""

    approvers: frozenset[int]
    good: str | None = None
    interval: tuple[Fraction, Fraction] | None = None

    @property
    def is_good(self) -> bool:
        return self.good is not None

    def size(self) -> Fraction:
        if self.is_good:
            return Fraction(1)
        lo, hi = self.interval
        return hi - lo


def cake_breakpoints(inst: Instance) -> list[Fraction]:
    """Sorted endpoints of all approved intervals plus 0 and c."""
    points = {Fraction(0), inst.cake_length}
    for bundle in inst.agents:
        for lo, hi in bundle.cake.intervals:
            points.add(lo)
            points.add(hi)
    return sorted(points)


def atomize(
    inst: Instance,
    remaining_cake: IntervalSet,
    remaining_goods: Iterable[str],
) -> list[Atom]:
    """Split the remaining resource into all-or-nothing units.

    Cake atoms partition ``remaining_cake`` at the agents' approval
    endpoints; good atoms carry their approver sets. Goods come first
    (in instance order), then cake atoms from left to right.
    """
    atoms: list[Atom] = []
    for g in inst.sorted_goods(remaining_goods):
        approvers = frozenset(i for i, b in enumerate(inst.agents) if g in b.goods)
        atoms.append(Atom(approvers=approvers, good=g))
    if not remaining_cake.is_empty:
        points = cake_breakpoints(inst)
        for lo, hi in remaining_cake.intervals:
            cuts = [lo] + [p for p in points if lo < p < hi] + [hi]
            for a, b in zip(cuts, cuts[1:]):
                mid = (a + b) / 2
                approvers = frozenset(
                    i
                    for i, bun in enumerate(inst.agents)
                    if bun.cake.contains_point(mid)
                )
                atoms.append(Atom(approvers=approvers, interval=(a, b)))
    return atoms


# ---------------------------------------------------------------------------
# Serialization


def instance_to_dict(inst: Instance) -> dict:
    return {
        "cake_length": format_rational(inst.cake_length),
        "goods": list(inst.goods),
        "alpha": format_rational(inst.alpha),
        "agents": [
            {
                "goods": inst.sorted_goods(b.goods),
                "cake": b.cake.to_json(),
            }
            for b in inst.agents
        ],
    }


def instance_from_dict(data: dict) -> Instance:
    agents = tuple(
        Bundle(
            cake=IntervalSet.from_json(entry.get("cake", [])),
            goods=frozenset(entry.get("goods", [])),
        )
        for entry in data["agents"]
    )
    return Instance(
        cake_length=parse_rational(data["cake_length"]),
        goods=tuple(data["goods"]),
        agents=agents,
        alpha=parse_rational(data["alpha"]),
    )


def allocation_to_dict(inst: Instance, bundle: Bundle) -> dict:
    return {
        "goods": inst.sorted_goods(bundle.goods),
        "cake": bundle.cake.to_json(),
        "size": format_rational(bundle.size()),
    }


def allocation_from_dict(data: dict) -> Bundle:
    return Bundle(
        cake=IntervalSet.from_json(data.get("cake", [])),
        goods=frozenset(data.get("goods", [])),
    )


def save_json(path: str, data: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


@lru_cache(maxsize=1024)
def approval_closure(
    inst: Instance,
    agents: frozenset[int] | None = None,
    max_size: int = 1 << 17,
) -> list[tuple[Bundle, frozenset[int]]]:
    """All distinct common bundles of nonempty agent groups, with approver sets.

    The returned list contains, for every nonempty X within ``agents``, the
    bundle intersection of X's approvals, deduplicated, each paired with the
    full set of agents whose approval contains it.  Raises CapacityError if
    the closure would exceed ``max_size`` bundles.  Cached per instance:
    callers must treat the result as read-only.
    """
    from .errors import CapacityError

    pool = sorted(range(inst.n) if agents is None else agents)
    approvals = [inst.agents[i] for i in pool]
    seen: dict[tuple, Bundle] = {}
    worklist: list[Bundle] = []
    for b in approvals:
        k = b.key(inst.good_index)
        if k not in seen:
            seen[k] = b
            worklist.append(b)
    while worklist:
        current = worklist.pop()
        for b in approvals:
            cut = current.intersect(b)
            k = cut.key(inst.good_index)
            if k not in seen:
                if len(seen) >= max_size:
                    raise CapacityError(
                        f"approval closure exceeds {max_size} bundles"
                    )
                seen[k] = cut
                worklist.append(cut)
    out: list[tuple[Bundle, frozenset[int]]] = []
    for k in sorted(seen):
        bundle = seen[k]
        approvers = frozenset(i for i in pool if inst.agents[i].contains(bundle))
        out.append((bundle, approvers))
    return out


def instance_digest(inst: Instance) -> str:
    """Digest of the canonical serialization; stable under key reordering."""
    blob = json.dumps(instance_to_dict(inst), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def floor_fraction(x: Fraction) -> int:
    return math.floor(x)


def ceil_fraction(x: Fraction) -> int:
    return math.ceil(x)
