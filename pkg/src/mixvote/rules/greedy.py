"""Greedy cohesive-group rule for mixed goods.

Each round finds the largest t* such that some remaining group is
t*-cohesive and commonly approves a sub-bundle of size exactly t*, removes
one such group, and adds its witness bundle to the allocation.  The group
search is exhaustive over common-bundle classes (exponential in the worst
case; the instance size is capped unless forced).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ..core import (
    Bundle,
    EMPTY_BUNDLE,
    Instance,
    approval_closure,
    common_bundle,
)
from ..errors import CapacityError, ScriptError

DEFAULT_AGENT_CAP = 20


def achievable_exact_size(m_star: int, ell_star: Fraction, cap: Fraction) -> Fraction:
    """Largest exact-witness size from a bundle with ``m_star`` goods and
    cake length ``ell_star``, subject to ``t <= cap``.

    The achievable sizes form the union of [j, j + ell_star] over integer
    j = 0..m_star; the maximum at or below the cap is closed-form.
    Returns 0 when no positive size is achievable.
    """
    if m_star < 0 or ell_star < 0:
        raise ValueError("m_star and ell_star must be nonnegative")
    ub = min(Fraction(cap), m_star + Fraction(ell_star))
    if ub <= 0:
        return Fraction(0)
    j = min(m_star, math.floor(ub))
    return min(ub, j + Fraction(ell_star))


@dataclass(frozen=True)
class GreedyRound:
    t_star: Fraction
    group: frozenset[int]
    witness: Bundle


@dataclass(frozen=True)
class GreedyTrace:
    rounds: tuple[GreedyRound, ...]

    def positive_rounds(self) -> list[GreedyRound]:
        return [r for r in self.rounds if r.t_star > 0]


def canonical_witness(inst: Instance, group: frozenset[int], t_star: Fraction) -> Bundle:
    """Witness of size exactly t_star: lowest-index goods first, then the
    leftmost piece of the group's common cake."""
    common = common_bundle(inst, group)
    goods_sorted = inst.sorted_goods(common.goods)
    j = min(len(goods_sorted), math.floor(t_star))
    cake_needed = t_star - j
    return Bundle(cake=common.cake.prefix(cake_needed), goods=frozenset(goods_sorted[:j]))


class DefaultTieBreaker:
    """Picks the lexicographically smallest inclusion-maximal group
    achieving t*, with the canonical witness."""

    def choose(
        self,
        inst: Instance,
        remaining: frozenset[int],
        t_star: Fraction,
        achieving_groups: Sequence[frozenset[int]],
    ) -> tuple[frozenset[int], Bundle]:
        maximal = [
            g for g in achieving_groups
            if not any(g < h for h in achieving_groups)
        ]
        group = min(maximal, key=lambda g: tuple(sorted(g)))
        return group, canonical_witness(inst, group, t_star)


class ScriptedTieBreaker:
    """Replays a fixed list of (group, witness) rounds, validating each
    against the computed t*; falls back to the default policy afterwards.

    Theorems about worst-case executions quantify over all admissible
    tie-breaks, so reproducing them requires steering specific rounds.
    """

    def __init__(self, steps: Sequence[tuple[Sequence[int], Bundle]]):
        self._steps = [(frozenset(g), w) for g, w in steps]
        self._cursor = 0
        self._fallback = DefaultTieBreaker()

    def choose(
        self,
        inst: Instance,
        remaining: frozenset[int],
        t_star: Fraction,
        achieving_groups: Sequence[frozenset[int]],
    ) -> tuple[frozenset[int], Bundle]:
        if self._cursor >= len(self._steps):
            return self._fallback.choose(inst, remaining, t_star, achieving_groups)
        group, witness = self._steps[self._cursor]
        self._cursor += 1
        if not group <= remaining:
            raise ScriptError("scripted group contains already-removed agents")
        if len(group) * inst.alpha < t_star * inst.n:
            raise ScriptError(
                f"scripted group of size {len(group)} is not {t_star}-cohesive"
            )
        if witness.size() != t_star:
            raise ScriptError(
                f"scripted witness has size {witness.size()}, round requires {t_star}"
            )
        if not common_bundle(inst, group).contains(witness):
            raise ScriptError("scripted witness is not commonly approved")
        return group, witness


def greedy_ejr_m(
    inst: Instance,
    tie_breaker: DefaultTieBreaker | ScriptedTieBreaker | None = None,
    force: bool = False,
    agent_cap: int = DEFAULT_AGENT_CAP,
) -> tuple[Bundle, GreedyTrace]:
    """Run the greedy rule; returns the allocation and its round trace."""
    if inst.n > agent_cap and not force:
        raise CapacityError(
            f"exhaustive group search capped at {agent_cap} agents "
            f"(instance has {inst.n}); pass force=True to override"
        )
    policy = tie_breaker or DefaultTieBreaker()
    remaining = frozenset(range(inst.n))
    allocation = EMPTY_BUNDLE
    rounds: list[GreedyRound] = []
    prev_t: Fraction | None = None
    while remaining:
        best_t = Fraction(0)
        achieving: dict[frozenset[int], None] = {}
        for bundle, approvers in approval_closure(inst, remaining):
            cap = Fraction(len(approvers)) * inst.alpha / inst.n
            t = achievable_exact_size(
                len(bundle.goods), bundle.cake.measure(), cap
            )
            if t > best_t:
                best_t = t
                achieving = {approvers: None}
            elif t == best_t and t > 0:
                achieving[approvers] = None
        if best_t == 0:
            # every leftover group is only 0-cohesive; nothing more to add
            rounds.append(GreedyRound(Fraction(0), remaining, EMPTY_BUNDLE))
            break
        group, witness = policy.choose(inst, remaining, best_t, list(achieving))
        assert prev_t is None or best_t <= prev_t, "round sizes must not increase"
        prev_t = best_t
        allocation = allocation.union(witness)
        rounds.append(GreedyRound(best_t, group, witness))
        remaining = remaining - group
    assert allocation.size() <= inst.alpha, "greedy exceeded the size budget"
    return allocation, GreedyTrace(tuple(rounds))
