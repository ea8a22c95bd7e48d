"""Shared fixtures and independent brute-force oracles for the test suite.

The oracles here deliberately re-derive results from the raw definitions
(direct subset scans, reference rule implementations) so the library's
faster paths are checked against a second route.
"""

from fractions import Fraction
from itertools import combinations

import pytest

from mixvote import Bundle, Instance, gen_random
from mixvote.core import common_bundle, utilities
from mixvote.generate import gen_fig1


@pytest.fixture
def fig1() -> Instance:
    return gen_fig1()[0]


def make_mixed(seed: int, n_max: int = 8, m_max: int = 6, atoms_max: int = 4) -> Instance:
    """Deterministic family of small mixed instances for property tests."""
    n = 2 + seed % (n_max - 1)
    m = seed % (m_max + 1)
    atoms = seed // 3 % (atoms_max + 1)
    if m + atoms == 0:
        atoms = 1
    total = Fraction(m) + Fraction(atoms, 2)
    alpha = max(Fraction(1, 2), Fraction(total * (1 + seed % 3), 4))
    density = 0.3 + 0.15 * (seed % 4)
    return gen_random(
        n=n, m=m, cake_atoms=atoms, alpha=alpha, density=density, seed=seed
    )


def all_groups(inst: Instance):
    for size in range(1, inst.n + 1):
        yield from combinations(range(inst.n), size)


def brute_max_round_t(inst: Instance, remaining: set[int]) -> Fraction:
    """Largest exact-witness cohesive size over raw subsets (greedy oracle)."""
    from mixvote.rules import achievable_exact_size

    best = Fraction(0)
    members = sorted(remaining)
    for size in range(1, len(members) + 1):
        for combo in combinations(members, size):
            common = common_bundle(inst, combo)
            cap = Fraction(size) * inst.alpha / inst.n
            t = achievable_exact_size(
                len(common.goods), common.cake.measure(), cap
            )
            best = max(best, t)
    return best


def _achievable_set_contains(m_star: int, ell: Fraction, t: Fraction) -> bool:
    for j in range(m_star + 1):
        if j <= t <= j + ell:
            return True
    return False


def brute_ejr_m_violation(inst: Instance, allocation: Bundle):
    """Direct definitional scan: subsets crossed with a fine grid of exact
    witness sizes t below each subset's supremum."""
    utils = utilities(inst, allocation)
    for group in all_groups(inst):
        common = common_bundle(inst, group)
        m_star, ell = len(common.goods), common.cake.measure()
        cap = Fraction(len(group)) * inst.alpha / inst.n
        sup = min(cap, common.size())
        candidates = {sup}
        for j in range(m_star + 1):
            for frac in range(8):
                candidates.add(Fraction(j) + ell * Fraction(frac, 7))
        max_u = max(utils[i] for i in group)
        for t in sorted(candidates, reverse=True):
            if t <= 0 or t > cap:
                continue
            if not _achievable_set_contains(m_star, ell, t):
                continue
            if max_u < t:
                return group, t
    return None


def brute_ejr_beta_violation(inst: Instance, allocation: Bundle, beta: Fraction, mode: str):
    utils = utilities(inst, allocation)
    for group in all_groups(inst):
        common = common_bundle(inst, group)
        cap = Fraction(len(group)) * inst.alpha / inst.n
        sup = min(cap, common.size())
        if sup <= 0:
            continue
        max_u = max(utils[i] for i in group)
        bad = max_u <= sup - beta if mode == "strict" else max_u < sup - beta
        if bad:
            return group, sup
    return None


def reference_mes_indivisible(inst: Instance):
    """Textbook equal-shares loop for indivisible instances (test oracle)."""
    assert inst.cake_length == 0
    budgets = {i: inst.alpha / inst.n for i in range(inst.n)}
    remaining = list(inst.goods)
    chosen: list[str] = []
    payments: list[dict[int, Fraction]] = []
    while True:
        best = None
        for g in remaining:
            approvers = [i for i in range(inst.n) if g in inst.agents[i].goods and budgets[i] > 0]
            if sum((budgets[i] for i in approvers), Fraction(0)) < 1:
                continue
            levels = sorted(budgets[i] for i in approvers)
            paid = Fraction(0)
            rho = None
            for idx, cap in enumerate(levels):
                cand = (1 - paid) / (len(levels) - idx)
                if cand <= cap:
                    rho = cand
                    break
                paid += cap
            if rho is None:
                rho = levels[-1]
            key = (rho, inst.good_index[g])
            if best is None or key < best[0]:
                best = (key, g, approvers, rho)
        if best is None:
            return chosen, payments
        _, g, approvers, rho = best
        pay = {i: min(budgets[i], rho) for i in approvers}
        for i, v in pay.items():
            budgets[i] -= v
        remaining.remove(g)
        chosen.append(g)
        payments.append(pay)
