"""Brute-force maximum Nash welfare over indivisible instances.

Zero products are handled lexicographically: first maximize the number of
agents with positive utility, then the product of utilities over exactly
those agents.  All optimal allocations are returned.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

from ..core import Bundle, Instance
from ..errors import CapacityError, UnsupportedInstanceError

DEFAULT_GOOD_CAP = 20


def _nash_key(inst: Instance, goods: frozenset[str]) -> tuple[int, Fraction]:
    positive = []
    for agent in inst.agents:
        u = len(agent.goods & goods)
        if u > 0:
            positive.append(u)
    product = math.prod(positive) if positive else Fraction(0)
    return len(positive), Fraction(product)


def mnw_indivisible(
    inst: Instance,
    good_cap: int = DEFAULT_GOOD_CAP,
    force: bool = False,
) -> list[Bundle]:
    """All Nash-optimal goods subsets of size at most alpha."""
    if inst.cake_length != 0:
        raise UnsupportedInstanceError(
            "Nash-welfare enumeration supports indivisible instances only"
        )
    if inst.m > good_cap and not force:
        raise CapacityError(
            f"goods enumeration capped at {good_cap} (instance has {inst.m})"
        )
    limit = min(inst.m, math.floor(inst.alpha))
    best_key: tuple[int, Fraction] | None = None
    best: list[frozenset[str]] = []
    for size in range(limit + 1):
        for combo in itertools.combinations(range(inst.m), size):
            goods = frozenset(inst.goods[i] for i in combo)
            key = _nash_key(inst, goods)
            if best_key is None or key > best_key:
                best_key = key
                best = [goods]
            elif key == best_key:
                best.append(goods)
    bundles = [Bundle(goods=g) for g in best]
    bundles.sort(key=lambda b: b.key(inst.good_index))
    return bundles
