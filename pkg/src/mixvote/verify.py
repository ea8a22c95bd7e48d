"""Axiom checkers and proportionality-degree auditors.

The representation axioms quantify over all real thresholds t and all agent
groups.  Both quantifiers reduce to a finite exact test: the requirement is
monotone in t and the feasible t-sets are closed, so each group only needs
checking at its supremum threshold; and for a fixed common bundle B and
group size k, the hardest group consists of the k approvers of B with the
lowest utilities.  Enumerating (B, k) over the intersection closure of the
approval bundles is therefore exhaustive, and every reported witness
re-validates against the raw definition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .core import (
    Bundle,
    Instance,
    approval_closure,
    format_rational,
    utilities,
)
from .errors import DomainError, UnsupportedInstanceError
from .rules.greedy import achievable_exact_size

DEFAULT_CLOSURE_CAP = 1 << 17


@dataclass(frozen=True)
class CohesiveProfile:
    """One (common bundle, group size) tier of the cohesive-group lattice."""

    group: tuple[int, ...]
    t_cohesive_sup: Fraction
    t_exact_max: Fraction
    group_utilities: tuple[Fraction, ...]


@dataclass(frozen=True)
class Witness:
    group: tuple[int, ...]
    t: Fraction
    threshold: Fraction
    max_utility: Fraction

    def to_dict(self) -> dict:
        return {
            "group": list(self.group),
            "t": format_rational(self.t),
            "threshold": format_rational(self.threshold),
            "max_utility": format_rational(self.max_utility),
        }


@dataclass(frozen=True)
class AxiomReport:
    axiom: str
    passed: bool
    witness: Witness | None = None

    def to_dict(self) -> dict:
        data = {"axiom": self.axiom, "pass": self.passed}
        if self.witness is not None:
            data["witness"] = self.witness.to_dict()
        return data


def _profile_tiers(
    inst: Instance,
    utils: list[Fraction] | None,
    max_closure: int,
):
    """Yield (bundle, sorted approver list, cumulative utility sums).

    Approvers are sorted worst-utility-first (ties by index), so the k-th
    prefix is the hardest group of size k for that bundle.
    """
    utils = utils if utils is not None else [Fraction(0)] * inst.n
    for bundle, approvers in approval_closure(inst, max_size=max_closure):
        if bundle.size() <= 0 or not approvers:
            continue
        members = sorted(approvers, key=lambda i: (utils[i], i))
        yield bundle, members


def cohesive_profiles(
    inst: Instance,
    allocation: Bundle | None = None,
    max_closure: int = DEFAULT_CLOSURE_CAP,
) -> list[CohesiveProfile]:
    """All deduplicated (common bundle, size) tiers with a positive threshold."""
    utils = (
        utilities(inst, allocation)
        if allocation is not None
        else [Fraction(0)] * inst.n
    )
    profiles = []
    for bundle, members in _profile_tiers(inst, utils, max_closure):
        size = bundle.size()
        m_star = len(bundle.goods)
        ell = bundle.cake.measure()
        for k in range(1, len(members) + 1):
            cap = Fraction(k) * inst.alpha / inst.n
            t_sup = min(cap, size)
            if t_sup <= 0:
                continue
            group = tuple(sorted(members[:k]))
            profiles.append(
                CohesiveProfile(
                    group=group,
                    t_cohesive_sup=t_sup,
                    t_exact_max=achievable_exact_size(m_star, ell, cap),
                    group_utilities=tuple(sorted(utils[i] for i in group)),
                )
            )
    return profiles


def _scan(
    inst: Instance,
    allocation: Bundle,
    axiom: str,
    threshold_of: Callable[[Bundle, Fraction], Fraction | None],
    satisfied: Callable[[Fraction, Fraction], bool],
    max_closure: int,
) -> AxiomReport:
    """Shared sup-threshold scan over (bundle, k) tiers.

    ``threshold_of(bundle, cap)`` maps a tier to the decisive t (None skips
    the tier); ``satisfied(max_utility, t)`` is the definitional test.  The
    reported witness is the most violated tier (ties: smaller t, then
    lexicographically smaller group).
    """
    inst.validate_allocation(allocation)
    utils = utilities(inst, allocation)
    worst: tuple | None = None
    witness: Witness | None = None
    for bundle, members in _profile_tiers(inst, utils, max_closure):
        running_max = Fraction(0)
        for k in range(1, len(members) + 1):
            running_max = max(running_max, utils[members[k - 1]])
            cap = Fraction(k) * inst.alpha / inst.n
            t = threshold_of(bundle, cap)
            if t is None or t <= 0:
                continue
            if satisfied(running_max, t):
                continue
            violation = t - running_max
            group = tuple(sorted(members[:k]))
            rank = (-violation, t, group)
            if worst is None or rank < worst:
                worst = rank
                witness = Witness(
                    group=group,
                    t=t,
                    threshold=t,
                    max_utility=running_max,
                )
    return AxiomReport(axiom=axiom, passed=witness is None, witness=witness)


def verify_ejr_m(
    inst: Instance,
    allocation: Bundle,
    max_closure: int = DEFAULT_CLOSURE_CAP,
) -> AxiomReport:
    """Exact-witness representation: every group that is t-cohesive with a
    commonly approved sub-bundle of size exactly t must contain a member
    with utility at least t."""

    def threshold(bundle: Bundle, cap: Fraction) -> Fraction:
        return achievable_exact_size(
            len(bundle.goods), bundle.cake.measure(), cap
        )

    return _scan(
        inst,
        allocation,
        "ejr-m",
        threshold,
        lambda max_u, t: max_u >= t,
        max_closure,
    )


def verify_ejr_beta(
    inst: Instance,
    allocation: Bundle,
    beta: Fraction,
    mode: str = "strict",
    max_closure: int = DEFAULT_CLOSURE_CAP,
) -> AxiomReport:
    """Representation up to beta: some member of every t-cohesive group gets
    utility > t - beta ("strict") or >= t - beta ("weak")."""
    beta = Fraction(beta)
    if beta < 0:
        raise DomainError("beta must be nonnegative")
    if mode not in ("strict", "weak"):
        raise DomainError(f"unknown mode {mode!r}")

    def threshold(bundle: Bundle, cap: Fraction) -> Fraction:
        return min(cap, bundle.size())

    if mode == "strict":
        ok = lambda max_u, t: max_u > t - beta
    else:
        ok = lambda max_u, t: max_u >= t - beta
    report = _scan(inst, allocation, f"ejr-beta[{beta},{mode}]", threshold, ok, max_closure)
    if report.witness is not None:
        w = report.witness
        report = AxiomReport(
            axiom=report.axiom,
            passed=False,
            witness=Witness(w.group, w.t, w.t - beta, w.max_utility),
        )
    return report


def verify_ejr_1(
    inst: Instance,
    allocation: Bundle,
    margin: float = 0.0,
    max_closure: int = DEFAULT_CLOSURE_CAP,
) -> AxiomReport:
    """EJR up to one: utilities are exact rationals, so the strict compare
    is exact; ``margin`` relaxes the threshold for scores produced by
    approximate optimizers."""
    beta = Fraction(1) + Fraction(margin)
    report = verify_ejr_beta(inst, allocation, beta, "strict", max_closure)
    return AxiomReport(axiom="ejr-1", passed=report.passed, witness=report.witness)


def verify_cake_ejr(
    inst: Instance,
    allocation: Bundle,
    max_closure: int = DEFAULT_CLOSURE_CAP,
) -> AxiomReport:
    """Cake-only representation; coincides with the exact-witness axiom on
    cake instances (any size up to the common piece is an exact witness)."""
    if inst.m > 0:
        raise UnsupportedInstanceError(
            "cake-EJR applies to instances without indivisible goods"
        )
    report = verify_ejr_m(inst, allocation, max_closure)
    return AxiomReport(axiom="cake-ejr", passed=report.passed, witness=report.witness)


# ---------------------------------------------------------------------------
# Proportionality-degree audits


def degree_ejr_m(t: Fraction) -> Fraction:
    ft = math.floor(t)
    return Fraction(ft) * (1 - Fraction(ft + 1) / (2 * t))


def degree_ejr_1(t: Fraction) -> Fraction:
    return (t - 2 + 1 / Fraction(t)) / 2


def degree_gpav(t: Fraction) -> Fraction:
    return Fraction(t) - 1


def degree_mes_upper(t: Fraction) -> Fraction:
    return Fraction(math.ceil(t) + 1, 2)


DEGREE_BOUNDS: dict[str, Callable[[Fraction], Fraction]] = {
    "ejr-m": degree_ejr_m,
    "ejr-1": degree_ejr_1,
    "gpav": degree_gpav,
    "mes-upper": degree_mes_upper,
}


@dataclass(frozen=True)
class DegreeEntry:
    group: tuple[int, ...]
    t: Fraction
    average: Fraction
    bound: Fraction
    slack: Fraction


@dataclass(frozen=True)
class DegreeAuditReport:
    bound_name: str
    min_slack: Fraction | None
    witness: DegreeEntry | None
    entries: tuple[DegreeEntry, ...]

    def entry_for(self, group: tuple[int, ...]) -> DegreeEntry | None:
        for e in self.entries:
            if e.group == group:
                return e
        return None

    def to_dict(self) -> dict:
        data = {
            "bound": self.bound_name,
            "min_slack": None if self.min_slack is None else format_rational(self.min_slack),
            "entries": len(self.entries),
        }
        if self.witness is not None:
            data["witness"] = {
                "group": list(self.witness.group),
                "t": format_rational(self.witness.t),
                "average": format_rational(self.witness.average),
                "bound_value": format_rational(self.witness.bound),
            }
        return data


def audit_degree(
    inst: Instance,
    allocation: Bundle,
    bound: str | Callable[[Fraction], Fraction],
    t_min: Fraction = Fraction(1),
    max_closure: int = DEFAULT_CLOSURE_CAP,
) -> DegreeAuditReport:
    """Minimum slack of group average satisfaction over the bound f(t).

    Scans every cohesive tier with threshold at least ``t_min``; the group
    minimizing average - f(t) is exact because, per bundle and size, the
    lowest-utility approvers minimize the average while only enlarging the
    common bundle.
    """
    if isinstance(bound, str):
        if bound not in DEGREE_BOUNDS:
            raise DomainError(f"unknown degree bound {bound!r}")
        name, f = bound, DEGREE_BOUNDS[bound]
    else:
        name, f = getattr(bound, "__name__", "custom"), bound
    inst.validate_allocation(allocation)
    utils = utilities(inst, allocation)
    entries: list[DegreeEntry] = []
    best: DegreeEntry | None = None
    for bundle, members in _profile_tiers(inst, utils, max_closure):
        size = bundle.size()
        running_sum = Fraction(0)
        for k in range(1, len(members) + 1):
            running_sum += utils[members[k - 1]]
            t = min(Fraction(k) * inst.alpha / inst.n, size)
            if t < t_min:
                continue
            avg = running_sum / k
            val = f(t)
            entry = DegreeEntry(
                group=tuple(sorted(members[:k])),
                t=t,
                average=avg,
                bound=val,
                slack=avg - val,
            )
            entries.append(entry)
            if (
                best is None
                or entry.slack < best.slack
                or (entry.slack == best.slack and (entry.t, entry.group) < (best.t, best.group))
            ):
                best = entry
    return DegreeAuditReport(
        bound_name=name,
        min_slack=None if best is None else best.slack,
        witness=best,
        entries=tuple(entries),
    )
