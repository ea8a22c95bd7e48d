"""Oracle tests: enumeration counts, impossibility scans, discretized optima."""

import math
from fractions import Fraction as F

import pytest

from mixvote import (
    Bundle,
    Instance,
    enumerate_allocations,
    generalized_pav,
    oracle_discretized_opt,
    oracle_min_max_avg,
    oracle_no_ejr_beta,
)
from mixvote.errors import CapacityError
from mixvote.generate import gen_appendix, gen_prop1, gen_prop4, gen_random
from mixvote.harmonic import harmonic
from mixvote.oracle import EnumerationConfig

from conftest import make_mixed


class TestEnumerationCounts:
    def test_three_goods_budget_two(self):
        inst = gen_random(n=2, m=3, cake_atoms=0, alpha=F(2), density=0.5, seed=1)
        assert sum(1 for _ in enumerate_allocations(inst)) == 7

    def test_prop4_counts(self):
        inst, _ = gen_prop4(1)
        assert sum(1 for _ in enumerate_allocations(inst)) == 57

    def test_fig1_grid_nine(self, fig1):
        cfg = EnumerationConfig(cake_grid=9)
        # 9 cells of length 1/10: all masks fit alpha for 0 or 1 good,
        # only the empty mask fits alongside both goods
        count = sum(1 for _ in enumerate_allocations(fig1, cfg))
        assert count == 512 + 2 * 512 + 1

    def test_capacity_guard(self, fig1):
        with pytest.raises(CapacityError):
            list(enumerate_allocations(fig1, EnumerationConfig(cake_grid=9, max_candidates=10)))

    def test_cells_align_with_breakpoints(self):
        inst = make_mixed(7, atoms_max=3)
        cfg = EnumerationConfig(cake_grid=4, max_candidates=1 << 22)
        for bundle in enumerate_allocations(inst, cfg):
            assert bundle.size() <= inst.alpha
            break


class TestNoEjrBeta:
    def test_prop1_impossibility(self):
        inst, _ = gen_prop1(F(1, 2), 4)
        assert oracle_no_ejr_beta(inst, F(2, 5), "weak") is True

    def test_prop1_relaxed_to_one_is_satisfiable(self):
        inst, _ = gen_prop1(F(1, 2), 4)
        assert oracle_no_ejr_beta(inst, F(1), "weak") is False

    def test_universal_good_weak_zero_satisfiable(self):
        inst = Instance(
            cake_length=F(0),
            goods=("g1",),
            agents=tuple(Bundle(goods=frozenset({"g1"})) for _ in range(3)),
            alpha=F(1),
        )
        assert oracle_no_ejr_beta(inst, F(0), "weak") is False


class TestMinMaxAvg:
    def test_appendix_value(self):
        inst, _ = gen_appendix(F(3, 2), F(1, 4), F(1, 4), 4)
        assert oracle_min_max_avg(inst, F(3, 2)) == F(5, 6)

    def test_covering_allocation_reaches_sup(self):
        inst = Instance(
            cake_length=F(0),
            goods=("g1",),
            agents=tuple(Bundle(goods=frozenset({"g1"})) for _ in range(3)),
            alpha=F(1),
        )
        assert oracle_min_max_avg(inst, F(1)) == 1

    def test_vacuous_when_no_cohesive_group(self):
        inst = gen_prop1(F(1, 2), 4)[0]
        assert oracle_min_max_avg(inst, F(2)) is None


class TestDiscretizedOpt:
    def test_fig1_gpav_grid_nine(self, fig1):
        bundle, score = oracle_discretized_opt(
            fig1, "gpav", EnumerationConfig(cake_grid=9)
        )
        expected = harmonic(F(19, 10)).value + harmonic(F(9, 10)).value
        assert abs(score - expected) < 1e-9
        assert len(bundle.goods) == 1
        assert bundle.cake.measure() == F(9, 10)

    def test_exact_on_indivisible(self):
        inst = gen_random(n=3, m=5, cake_atoms=0, alpha=F(2), density=0.6, seed=11)
        _, score = oracle_discretized_opt(inst, "gpav")
        sol = generalized_pav(inst)
        assert abs(float(score) - sol.score.value) <= 1e-9

    def test_identical_approvals_take_max_size(self):
        inst = gen_random(n=3, m=2, cake_atoms=0, alpha=F(2), density=1.0, seed=3)
        bundle, _ = oracle_discretized_opt(inst, "gpav")
        assert bundle.goods == frozenset(inst.goods)

    @pytest.mark.parametrize("seed", [0, 5, 10])
    def test_grid_resolution_bound_versus_solver(self, seed):
        inst = make_mixed(seed, n_max=4, m_max=2, atoms_max=2)
        grid = 6
        _, score = oracle_discretized_opt(
            inst, "gpav", EnumerationConfig(cake_grid=grid, max_candidates=1 << 22)
        )
        sol = generalized_pav(inst)
        # the objective is at most pi^2/6-Lipschitz per unit of cake
        bound = (math.pi**2 / 6) * float(inst.cake_length) / grid * inst.n + 1e-6
        assert sol.score.value >= score - 1e-9
        assert abs(sol.score.value - score) <= bound

    def test_nash_objective(self):
        inst, _ = gen_prop4(1)
        bundle, score = oracle_discretized_opt(inst, "nash")
        assert score[0] == 12  # all agents covered
