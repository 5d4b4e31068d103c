"""GA operator and search-loop tests."""

import numpy as np
import pytest

from oosplan.ga import (CROSSOVER_OPS, GaConfig, adaptive_pc, adaptive_pm,
                        crossover_hopc, crossover_multi_rbc, crossover_rbc,
                        detect_stagnation, inject_diversity, mate, mutate,
                        roulette_weights, run, update_credit)
from oosplan.rps import random_chromosome, validate


def is_perm(route, n):
    return np.array_equal(np.sort(route), np.arange(n))


class TestSelection:
    def test_weights_favor_low_fitness(self, rng):
        f = np.array([10.0, 20.0, 30.0])
        w = roulette_weights(f)
        assert w[0] > w[1] > w[2]
        assert w.sum() == pytest.approx(1.0)

    def test_worst_keeps_nonzero_weight(self):
        f = np.array([1.0, 100.0])
        w = roulette_weights(f, eps=0.01)
        assert w[1] > 0.0

    def test_uniform_when_flat(self):
        f = np.full(5, 42.0)
        w = roulette_weights(f)
        assert np.allclose(w, 0.2)


class TestAdaptiveRates:
    def test_pc_bounds_and_monotonicity(self, rng):
        f_mean, f_worst = 100.0, 200.0
        assert adaptive_pc(150.0, f_mean, f_worst, 0.6, 0.9) == 0.9
        assert adaptive_pc(f_mean, f_mean, f_worst, 0.6, 0.9) == 0.9
        vals = [adaptive_pc(f, f_mean, f_worst, 0.6, 0.9)
                for f in (95.0, 50.0, 0.0, -500.0)]
        assert all(0.6 <= v <= 0.9 for v in vals)
        assert vals == sorted(vals, reverse=True)

    def test_pc_degenerate_spread(self):
        # worst == mean (uniform population): clamped, never divides by 0
        v = adaptive_pc(50.0, 100.0, 100.0, 0.6, 0.9)
        assert 0.6 <= v <= 0.9

    def test_pm_infeasible_gets_max(self):
        assert adaptive_pm(10.0, 100.0, 200.0, 0.08, 0.2,
                           feasible=False) == 0.2

    def test_pm_bounds(self):
        for f in (-100.0, 0.0, 99.0, 100.0, 150.0, 1e9):
            v = adaptive_pm(f, 100.0, 200.0, 0.08, 0.2)
            assert 0.08 <= v <= 0.2


class TestCrossover:
    @pytest.mark.parametrize("op", [crossover_rbc, crossover_multi_rbc,
                                    crossover_hopc])
    def test_children_are_permutations(self, op, rng):
        for _ in range(1000):
            n = int(rng.integers(2, 25))
            a = rng.permutation(n).astype(np.int64)
            b = rng.permutation(n).astype(np.int64)
            child = op(a, b, rng)
            assert is_perm(child, n)

    def test_rbc_keeps_block_in_place(self, rng):
        a = np.arange(10, dtype=np.int64)
        b = a[::-1].copy()
        for _ in range(100):
            child = crossover_rbc(a, b, rng)
            # positions taken from a appear at their a positions
            kept = child == a
            assert kept.any()

    def test_hopc_preserves_prefix(self, rng):
        for _ in range(200):
            a = rng.permutation(12).astype(np.int64)
            b = rng.permutation(12).astype(np.int64)
            child = crossover_hopc(a, b, rng)
            c = int((child == a).argmin()) or 12
            # some prefix of a survives verbatim
            assert np.array_equal(child[:1], a[:1])

    def test_length_weighted_policy(self, rng):
        a = rng.permutation(10).astype(np.int64)
        b = rng.permutation(10).astype(np.int64)
        child = crossover_rbc(a, b, rng, policy="length_weighted")
        assert is_perm(child, 10)


class TestCredit:
    def test_update_formula(self):
        credits = {"rbc": 1.0}
        update_credit(credits, "rbc", 0.0, 0.1)
        assert credits["rbc"] == pytest.approx(0.9)
        update_credit(credits, "rbc", 1.0, 0.1)
        assert credits["rbc"] == pytest.approx(0.9 * 0.9 + 0.1)


class TestMateAndMutate:
    def test_mate_produces_valid_children(self, rng):
        for _ in range(500):
            n = int(rng.integers(2, 20))
            m = int(rng.integers(1, 4))
            kmax = int(rng.integers(1, 6))
            pa = random_chromosome(rng, n, m, kmax)
            pb = random_chromosome(rng, n, m, kmax)
            op = CROSSOVER_OPS[int(rng.integers(3))]
            child = mate(pa, pb, op, rng, kmax)
            validate(child, n, m, kmax)

    def test_mate_rotations_follow_tasks(self, rng):
        """With identical parents the child keeps per-task rotations."""
        pa = random_chromosome(rng, 10, 2, 5)
        pb = pa.copy()
        child = mate(pa, pb, "rbc", rng, 5, reseed_prob=0.0)
        by_task_parent = np.empty(10, np.int64)
        by_task_parent[pa.route] = pa.rotations
        by_task_child = np.empty(10, np.int64)
        by_task_child[child.route] = child.rotations
        assert np.array_equal(by_task_parent, by_task_child)

    def test_mutate_preserves_invariants(self, rng):
        for _ in range(1000):
            n = int(rng.integers(2, 20))
            m = int(rng.integers(1, 4))
            kmax = int(rng.integers(1, 6))
            c = random_chromosome(rng, n, m, kmax)
            mutate(c, 1.0, rng, kmax, anneal=rng.random())
            validate(c, n, m, kmax)

    def test_mutate_zero_rate_is_identity(self, rng):
        c = random_chromosome(rng, 14, 2, 5)
        d = c.copy()
        mutate(c, 0.0, rng, 5)
        assert np.array_equal(c.route, d.route)
        assert np.array_equal(c.rotations, d.rotations)
        assert np.array_equal(c.splits, d.splits)


class TestStagnation:
    def make_cfg(self, **kw):
        kw.setdefault("pop_size", 10)
        return GaConfig(**kw)

    def test_no_trigger_during_burn_in(self):
        cfg = self.make_cfg(burn_in=20)
        flat = [100.0] * 30
        pop_f = np.full(10, 100.0)
        assert not detect_stagnation(flat, pop_f, 5, cfg)

    def test_triggers_on_collapse(self):
        cfg = self.make_cfg(burn_in=5)
        flat = [100.0] * 30
        pop_f = np.full(10, 100.0)
        assert detect_stagnation(flat, pop_f, 25, cfg)

    def test_no_trigger_with_spread(self):
        cfg = self.make_cfg(burn_in=5)
        flat = [100.0] * 30
        pop_f = np.linspace(100.0, 150.0, 10)
        assert not detect_stagnation(flat, pop_f, 25, cfg)

    def test_no_trigger_while_improving(self):
        cfg = self.make_cfg(burn_in=5)
        improving = list(np.linspace(200.0, 100.0, 30))
        pop_f = np.full(10, 100.0)
        assert not detect_stagnation(improving, pop_f, 25, cfg)

    def test_injection_keeps_best_and_size(self, geo14, rng):
        cfg = GaConfig(pop_size=20)
        pop = [random_chromosome(rng, 14, 2, 5) for _ in range(20)]
        f = np.arange(20, dtype=float)
        new_pop = inject_diversity(pop, f, cfg, rng, geo14)
        assert len(new_pop) == 20
        assert np.array_equal(new_pop[0].route, pop[0].route)
        for c in new_pop:
            validate(c, 14, 2, 5)


class TestRun:
    SMALL = dict(pop_size=30, min_generations=10, max_generations=15,
                 improvement_window=5, burn_in=5)

    def test_small_run_valid_and_monotone(self, geo14):
        res = run(geo14, GaConfig(seed=7, **self.SMALL))
        validate(res.best, 14, 2, 5)
        bests = [t.best_fitness for t in res.history]
        assert all(b2 <= b1 + 1e-9 for b1, b2 in zip(bests, bests[1:]))
        assert res.generations == len(res.history)
        assert res.n_evals > 0

    def test_seed_determinism(self, geo14):
        r1 = run(geo14, GaConfig(seed=11, **self.SMALL))
        r2 = run(geo14, GaConfig(seed=11, **self.SMALL))
        assert r1.best_fitness == r2.best_fitness
        assert np.array_equal(r1.best.route, r2.best.route)
        assert np.array_equal(r1.best.rotations, r2.best.rotations)
        assert np.array_equal(r1.best.splits, r2.best.splits)
        assert [t.best_fitness for t in r1.history] == \
               [t.best_fitness for t in r2.history]

    def test_seeds_differ(self, geo14):
        r1 = run(geo14, GaConfig(seed=1, **self.SMALL))
        r2 = run(geo14, GaConfig(seed=2, **self.SMALL))
        assert [t.mean_fitness for t in r1.history] != \
               [t.mean_fitness for t in r2.history]

    def test_result_detail_consistent(self, geo14):
        res = run(geo14, GaConfig(seed=3, **self.SMALL))
        assert res.total_dv == pytest.approx(
            float(res.per_servicer_dv.sum()))
        if res.best_feasible:
            assert res.best_fitness == pytest.approx(res.total_dv)
            assert (res.per_servicer_dv <= geo14.dv_max + 1e-9).all()
            assert res.final_completion <= geo14.t_max + 1e-9

    def test_config_validation(self):
        with pytest.raises(ValueError):
            GaConfig(pop_size=2)
        with pytest.raises(ValueError):
            GaConfig(pc_min=0.9, pc_max=0.6)
        with pytest.raises(ValueError):
            GaConfig(pm_min=-0.1)
