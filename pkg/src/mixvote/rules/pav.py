"""Harmonic-score maximization over mixed bundles.

The outer loop enumerates goods subsets exactly; for each subset the cake
part is a concave maximization over atom lengths, solved numerically with
a duality-gap certificate (the objective is concave because H' is
decreasing).  Outputs carry rational cake endpoints, so downstream axiom
checks stay exact; only the score and the gap are floats.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import minimize

from ..core import Atom, Bundle, Instance, atomize, normalize
from ..errors import CapacityError, DomainError
from ..harmonic import (
    DEFAULT_TOL,
    HarmonicValue,
    harmonic,
    harmonic_deriv2_vec,
    harmonic_deriv_vec,
    harmonic_vec,
)

DEFAULT_GOOD_CAP = 16
DEFAULT_EPS = 1e-9

# slack added to every reported certificate for float evaluation error
_CERT_SLACK = 1e-12


@dataclass(frozen=True)
class PavSolution:
    allocation: Bundle
    score: HarmonicValue
    optimality_gap: float
    atom_lengths: dict[tuple[Fraction, Fraction], Fraction]


def _linmax_gap(g: np.ndarray, y: np.ndarray, lengths: np.ndarray, budget: float) -> float:
    """max_z g.(z - y) over the box-plus-budget polytope (greedy fill)."""
    order = np.argsort(-g)
    remaining = budget
    best = 0.0
    for c in order:
        if remaining <= 0 or g[c] <= 0:
            break
        take = min(lengths[c], remaining)
        best += g[c] * take
        remaining -= take
    return best - float(g @ np.maximum(y, 0.0))


def _project_budget_box(v: np.ndarray, lengths: np.ndarray, budget: float) -> np.ndarray:
    clipped = np.clip(v, 0.0, lengths)
    if clipped.sum() <= budget:
        return clipped
    lo = float(np.min(v - lengths)) - 1.0
    hi = float(np.max(v)) + 1.0
    for _ in range(200):
        tau = 0.5 * (lo + hi)
        s = np.clip(v - tau, 0.0, lengths).sum()
        if s > budget:
            lo = tau
        else:
            hi = tau
    return np.clip(v - hi, 0.0, lengths)


def _objective(base: np.ndarray, inc: np.ndarray, y: np.ndarray) -> float:
    return float(harmonic_vec(base + inc @ y).sum())


def _gradient(base: np.ndarray, inc: np.ndarray, y: np.ndarray) -> np.ndarray:
    return inc.T @ harmonic_deriv_vec(base + inc @ y)


def _newton_polish(
    base: np.ndarray,
    inc: np.ndarray,
    lengths: np.ndarray,
    budget: float,
    y: np.ndarray,
    target: float,
) -> tuple[np.ndarray, float]:
    """Equality-constrained Newton steps on the current face; budget is
    kept tight throughout (the objective is strictly increasing)."""
    y = _project_budget_box(y, lengths, budget)
    deficit = budget - y.sum()
    if deficit > 0:  # push onto the budget plane if there is room
        slack = lengths - y
        room = slack.sum()
        if room > 0:
            y = y + slack * min(1.0, deficit / room)
    ncls = len(lengths)
    gap = math.inf
    for _ in range(80):
        g = _gradient(base, inc, y)
        gap = _linmax_gap(g, y, lengths, budget)
        if gap <= target:
            return y, gap
        interior = (y > 1e-11) & (y < lengths - 1e-11)
        lam = float(np.median(g[interior])) if interior.any() else float(np.max(g))
        at_lo = (y <= 1e-11) & (g <= lam)
        at_hi = (y >= lengths - 1e-11) & (g >= lam)
        free = np.where(~(at_lo | at_hi))[0]
        if len(free) == 0:
            free = np.arange(ncls)
        af = inc[:, free]
        curv = harmonic_deriv2_vec(base + inc @ y)
        hess = af.T @ (curv[:, None] * af)
        k = len(free)
        kkt = np.zeros((k + 1, k + 1))
        kkt[:k, :k] = hess
        kkt[:k, k] = 1.0
        kkt[k, :k] = 1.0
        rhs = np.zeros(k + 1)
        rhs[:k] = lam - g[free]
        rhs[k] = 0.0
        sol, *_ = np.linalg.lstsq(kkt, rhs, rcond=None)
        dy = np.zeros(ncls)
        dy[free] = sol[:k]
        if not np.isfinite(dy).all() or np.abs(dy).max() == 0.0:
            break
        step = 1.0
        for c in range(ncls):  # stay inside the box
            if dy[c] > 0 and lengths[c] - y[c] < dy[c] * step:
                step = (lengths[c] - y[c]) / dy[c]
            elif dy[c] < 0 and -y[c] > dy[c] * step:
                step = y[c] / -dy[c]
        f_old = _objective(base, inc, y)
        improved = False
        while step > 1e-14:
            cand = np.clip(y + step * dy, 0.0, lengths)
            if _objective(base, inc, cand) >= f_old - 1e-15:
                y = cand
                improved = True
                break
            step *= 0.5
        if not improved:
            break
    return y, gap


def _fista(
    base: np.ndarray,
    inc: np.ndarray,
    lengths: np.ndarray,
    budget: float,
    y: np.ndarray,
    target: float,
    max_iter: int = 50000,
) -> tuple[np.ndarray, float]:
    lam_max = np.linalg.norm(inc, 2) ** 2
    step = 1.0 / (2.5 * max(lam_max, 1e-9))
    z = y.copy()
    t_acc = 1.0
    gap = math.inf
    for it in range(max_iter):
        g = _gradient(base, inc, z)
        y_new = _project_budget_box(z + step * g, lengths, budget)
        t_new = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t_acc * t_acc))
        z = y_new + ((t_acc - 1.0) / t_new) * (y_new - y)
        y, t_acc = y_new, t_new
        if it % 50 == 0:
            gap = _linmax_gap(_gradient(base, inc, y), y, lengths, budget)
            if gap <= target:
                return y, gap
    gap = _linmax_gap(_gradient(base, inc, y), y, lengths, budget)
    return y, gap


def _solve_classes(
    base_utils: list[Fraction],
    classes: list[frozenset[int]],
    class_lengths: list[Fraction],
    budget: Fraction,
    eps: float,
) -> tuple[list[Fraction], float]:
    """Maximize sum_i H(u0_i + sum over approved classes) over class lengths.

    Returns rational lengths summing to at most the budget and a certified
    duality gap.  Exact shortcuts when the budget is slack or zero.
    """
    nclasses = len(classes)
    if nclasses == 0 or budget <= 0:
        return [Fraction(0)] * nclasses, 0.0
    total = sum(class_lengths, Fraction(0))
    if total <= budget:
        return list(class_lengths), 0.0

    nagents = len(base_utils)
    inc = np.zeros((nagents, nclasses))
    for c, members in enumerate(classes):
        for i in members:
            inc[i, c] = 1.0
    base = np.array([float(u) for u in base_utils])
    lengths = np.array([float(l) for l in class_lengths])
    bud = float(budget)
    target = eps / 4.0

    y0 = lengths * (bud / lengths.sum())
    res = minimize(
        lambda y: -_objective(base, inc, y),
        y0,
        jac=lambda y: -_gradient(base, inc, y),
        bounds=[(0.0, l) for l in lengths],
        constraints=[{"type": "ineq", "fun": lambda y: bud - y.sum(),
                      "jac": lambda y: -np.ones_like(y)}],
        method="SLSQP",
        options={"maxiter": 400, "ftol": 1e-14},
    )
    y = _project_budget_box(np.asarray(res.x, dtype=float), lengths, bud)
    y, gap = _newton_polish(base, inc, lengths, bud, y, target)
    if gap > target:
        y, gap = _fista(base, inc, lengths, bud, y, target)
    if gap > target:
        y, gap = _newton_polish(base, inc, lengths, bud, y, target)
    if not gap <= eps / 2.0:
        raise DomainError(f"cake solver could not certify gap {gap} <= {eps / 2.0}")

    # exact rationalization: clip into the box, then trim any overshoot
    y_rat = [
        min(max(Fraction(float(v)).limit_denominator(10**12), Fraction(0)), cl)
        for v, cl in zip(y, class_lengths)
    ]
    excess = sum(y_rat, Fraction(0)) - budget
    if excess > 0:
        for c in sorted(range(nclasses), key=lambda c: -y_rat[c]):
            cut = min(excess, y_rat[c])
            y_rat[c] -= cut
            excess -= cut
            if excess == 0:
                break
    y_final = np.array([float(v) for v in y_rat])
    gap_final = _linmax_gap(_gradient(base, inc, y_final), y_final, lengths, bud)
    return y_rat, max(gap_final, 0.0) + _CERT_SLACK


def concave_cake_opt(
    inst: Instance,
    atoms: list[Atom],
    fixed_goods: frozenset[str] | set[str],
    budget: Fraction,
    eps: float = DEFAULT_EPS,
    tol: float = DEFAULT_TOL,
) -> tuple[dict[tuple[Fraction, Fraction], Fraction], HarmonicValue, float]:
    """Best cake lengths per atom given a fixed goods selection.

    Atoms sharing an approver set are interchangeable for the score, so they
    are merged for the solve and refilled left to right afterwards.
    """
    fixed = frozenset(fixed_goods)
    base_utils = [
        Fraction(len(inst.agents[i].goods & fixed)) for i in range(inst.n)
    ]
    cake_atoms = [a for a in atoms if not a.is_good and a.approvers]
    class_index: dict[frozenset[int], int] = {}
    classes: list[frozenset[int]] = []
    class_lengths: list[Fraction] = []
    class_atoms: list[list[Atom]] = []
    for atom in cake_atoms:
        c = class_index.get(atom.approvers)
        if c is None:
            c = len(classes)
            class_index[atom.approvers] = c
            classes.append(atom.approvers)
            class_lengths.append(Fraction(0))
            class_atoms.append([])
        class_lengths[c] += atom.size()
        class_atoms[c].append(atom)

    y_rat, gap = _solve_classes(base_utils, classes, class_lengths, budget, eps)

    atom_lengths: dict[tuple[Fraction, Fraction], Fraction] = {
        a.interval: Fraction(0) for a in cake_atoms
    }
    agent_utils = list(base_utils)
    for c, amount in enumerate(y_rat):
        left = amount
        for atom in sorted(class_atoms[c], key=lambda a: a.interval):
            take = min(atom.size(), left)
            atom_lengths[atom.interval] = take
            left -= take
            if left == 0:
                break
        for i in classes[c]:
            agent_utils[i] += amount

    total = 0.0
    bound = 0.0
    for u in agent_utils:
        hv = harmonic(u, tol)
        total += hv.value
        bound += hv.abs_error_bound
    return atom_lengths, HarmonicValue(total, bound), gap


def generalized_pav(
    inst: Instance,
    eps: float = DEFAULT_EPS,
    force: bool = False,
    good_cap: int = DEFAULT_GOOD_CAP,
    tol: float = DEFAULT_TOL,
    threads: int = 1,
) -> PavSolution:
    """Enumerate goods subsets exactly; solve the cake part per subset.

    The per-subset solves are independent; with ``threads > 1`` they fan out
    over a pool, and results merge in enumeration order so the output does
    not depend on the worker count.
    """
    if inst.m > good_cap and not force:
        raise CapacityError(
            f"goods enumeration capped at {good_cap} (instance has {inst.m}); "
            "pass force=True to override"
        )
    atoms = [a for a in atomize(inst, inst.full_cake(), inst.goods) if not a.is_good]
    max_goods = min(inst.m, math.floor(inst.alpha))
    subsets = [
        frozenset(inst.goods[i] for i in combo)
        for size in range(max_goods + 1)
        for combo in itertools.combinations(range(inst.m), size)
    ]

    def solve(goods: frozenset[str]):
        budget = inst.alpha - len(goods)
        return concave_cake_opt(inst, atoms, goods, budget, eps, tol)

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            solved = list(pool.map(solve, subsets))
    else:
        solved = [solve(goods) for goods in subsets]

    best: PavSolution | None = None
    best_upper = -math.inf
    for goods, (atom_lengths, score, gap) in zip(subsets, solved):
        upper = score.value + score.abs_error_bound + gap
        best_upper = max(best_upper, upper)
        if best is None or score.value > best.score.value:
            pieces = [
                (lo, lo + ln)
                for (lo, _hi), ln in atom_lengths.items()
                if ln > 0
            ]
            allocation = Bundle(cake=normalize(pieces), goods=goods)
            best = PavSolution(
                allocation=allocation,
                score=score,
                optimality_gap=gap,
                atom_lengths=atom_lengths,
            )
    assert best is not None
    global_gap = max(best_upper - best.score.value, 0.0) + best.score.abs_error_bound
    return PavSolution(
        allocation=best.allocation,
        score=best.score,
        optimality_gap=max(best.optimality_gap, global_gap),
        atom_lengths=best.atom_lengths,
    )
