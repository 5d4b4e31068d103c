"""Schedule propagation and penalty bookkeeping tests."""

import numpy as np
import pytest

from conftest import ABLATION_PLAN, BEST_PLAN
from oosplan.mission import (DuplicateTask, Evaluator, MissingTask,
                             check_feasible, evaluate, propagate_route)


class TestPropagateRoute:
    def test_published_schedule_ssc1(self, geo14):
        sched = propagate_route(geo14.servicers[0], BEST_PLAN["ssc1_order"],
                                BEST_PLAN["ssc1_rot"], geo14)
        for leg, coast, phase, end, dv in zip(
                sched.legs, BEST_PLAN["ssc1_coast"],
                BEST_PLAN["ssc1_phase"], BEST_PLAN["ssc1_end"],
                BEST_PLAN["ssc1_dv"]):
            assert leg.leg.coast_time == pytest.approx(coast, abs=0.02)
            assert leg.leg.phasing_time == pytest.approx(phase, abs=0.02)
            assert leg.completion_time == pytest.approx(end, abs=0.05)
            assert leg.leg.dv_total == pytest.approx(dv, abs=1.0)
        assert sched.total_dv == pytest.approx(BEST_PLAN["ssc1_total"],
                                               abs=2.0)

    def test_published_schedule_ssc2(self, geo14):
        sched = propagate_route(geo14.servicers[1], BEST_PLAN["ssc2_order"],
                                BEST_PLAN["ssc2_rot"], geo14)
        for leg, coast, end, dv in zip(
                sched.legs, BEST_PLAN["ssc2_coast"],
                BEST_PLAN["ssc2_end"], BEST_PLAN["ssc2_dv"]):
            assert leg.leg.coast_time == pytest.approx(coast, abs=0.02)
            assert leg.completion_time == pytest.approx(end, abs=0.05)
            assert leg.leg.dv_total == pytest.approx(dv, abs=1.5)
        assert sched.total_dv == pytest.approx(BEST_PLAN["ssc2_total"],
                                               abs=2.0)

    def test_published_impulse_vectors(self, geo14):
        """Spot-check the two impulse examples from the results table."""
        s1 = propagate_route(geo14.servicers[0], BEST_PLAN["ssc1_order"],
                             BEST_PLAN["ssc1_rot"], geo14)
        np.testing.assert_allclose(s1.legs[0].leg.impulse_1,
                                   [-4.42, 1.84, 77.80], atol=0.02)
        np.testing.assert_allclose(s1.legs[0].leg.impulse_2,
                                   [5.33, -2.22, 0.00], atol=0.02)
        s2 = propagate_route(geo14.servicers[1], BEST_PLAN["ssc2_order"],
                             BEST_PLAN["ssc2_rot"], geo14)
        np.testing.assert_allclose(s2.legs[0].leg.impulse_1,
                                   [0.48, -36.49, 252.28], atol=0.05)
        np.testing.assert_allclose(s2.legs[0].leg.impulse_2,
                                   [-0.83, 24.82, 2.17], atol=0.05)

    def test_schedule_chaining(self, geo14):
        """Leg j+1 departs at leg j's completion, plus the repair stay."""
        sched = propagate_route(geo14.servicers[0], BEST_PLAN["ssc1_order"],
                                BEST_PLAN["ssc1_rot"], geo14)
        t = 0.0
        for leg in sched.legs:
            assert leg.leg.departure_time == pytest.approx(t)
            assert leg.arrive_time == pytest.approx(
                t + leg.leg.coast_time + leg.leg.phasing_time)
            repair = geo14.task_by_id(leg.task_id).repair_duration
            assert leg.completion_time == pytest.approx(
                leg.arrive_time + repair)
            t = leg.completion_time

    def test_empty_route(self, geo14):
        sched = propagate_route(geo14.servicers[0], [], [], geo14)
        assert sched.total_dv == 0.0
        assert sched.final_completion == 0.0
        assert sched.legs == []

    def test_rotation_bounds_enforced(self, geo14):
        with pytest.raises(ValueError):
            propagate_route(geo14.servicers[0], [1], [0], geo14)
        with pytest.raises(ValueError):
            propagate_route(geo14.servicers[0], [1],
                            [geo14.rotation_max + 1], geo14)


class TestEvaluate:
    def test_best_plan_feasible(self, geo14, best_plan_routes):
        plan = evaluate(best_plan_routes, geo14)
        assert plan.feasible
        assert check_feasible(plan)
        assert plan.penalty.p_team == 0.0
        assert plan.penalty.p_infeasible == 0.0
        assert plan.fitness == pytest.approx(plan.total_dv)
        assert plan.total_dv == pytest.approx(BEST_PLAN["mission_total"],
                                              abs=3.0)

    def test_ablation_plan_infeasible(self, geo14):
        plan = evaluate(
            [(ABLATION_PLAN["ssc1_order"], ABLATION_PLAN["ssc1_rot"]),
             (ABLATION_PLAN["ssc2_order"], ABLATION_PLAN["ssc2_rot"])],
            geo14, kappa=1000.0)
        assert not plan.feasible
        assert plan.routes[1].final_completion == pytest.approx(
            ABLATION_PLAN["ssc2_end"], abs=0.05)
        assert plan.penalty.p_infeasible == 1000.0

    def test_penalty_arithmetic(self, geo14):
        """The team penalty must equal (sum p_s)^2 + lam * sum p_s^2."""
        plan = evaluate(
            [(ABLATION_PLAN["ssc1_order"], ABLATION_PLAN["ssc1_rot"]),
             (ABLATION_PLAN["ssc2_order"], ABLATION_PLAN["ssc2_rot"])],
            geo14, lam=2.5, kappa=77.0)
        p = [row[2] for row in plan.penalty.per_servicer]
        expected = sum(p) ** 2 + 2.5 * sum(x * x for x in p)
        assert plan.penalty.p_team == pytest.approx(expected, rel=1e-12)
        assert plan.penalty.p_infeasible == 77.0
        assert plan.fitness == pytest.approx(
            plan.total_dv + plan.penalty.p_team + 77.0, rel=1e-12)
        # per-servicer terms match the max(0, overshoot) definition
        for (p_dv, p_t, p_s), r in zip(plan.penalty.per_servicer,
                                       plan.routes):
            assert p_dv == pytest.approx(
                max(0.0, r.total_dv - geo14.dv_max))
            assert p_t == pytest.approx(
                max(0.0, r.final_completion - geo14.t_max))
            assert p_s == pytest.approx(p_dv + p_t)

    def test_kappa_defaults_to_dv_budget(self, geo14):
        plan = evaluate(
            [(ABLATION_PLAN["ssc1_order"], ABLATION_PLAN["ssc1_rot"]),
             (ABLATION_PLAN["ssc2_order"], ABLATION_PLAN["ssc2_rot"])],
            geo14)
        assert plan.penalty.p_infeasible == geo14.dv_max

    def test_duplicate_task_rejected(self, geo14, best_plan_routes):
        bad = ([7, 7, 1, 14, 5, 11, 13, 3], [2, 2, 3, 3, 1, 3, 2, 2])
        with pytest.raises(DuplicateTask):
            evaluate([bad, best_plan_routes[1]], geo14)

    def test_missing_task_rejected(self, geo14, best_plan_routes):
        short = (BEST_PLAN["ssc1_order"][:-1], BEST_PLAN["ssc1_rot"][:-1])
        with pytest.raises(MissingTask):
            evaluate([short, best_plan_routes[1]], geo14)

    def test_unknown_task_rejected(self, geo14, best_plan_routes):
        bad = (BEST_PLAN["ssc1_order"][:-1] + [99],
               BEST_PLAN["ssc1_rot"])
        with pytest.raises(MissingTask):
            evaluate([bad, best_plan_routes[1]], geo14)


class TestEvaluator:
    def test_fast_path_matches_reference(self, geo14, best_plan_routes):
        ev = Evaluator(geo14, lam=1.0, kappa=500.0)
        plan = evaluate(best_plan_routes, geo14, lam=1.0, kappa=500.0)
        idx = geo14.packed().index_of
        route = np.array([idx[t] for order, _ in best_plan_routes
                          for t in order], np.int64)
        rot = np.array([k for _, rots in best_plan_routes for k in rots],
                       np.int64)
        splits = np.array([len(o) for o, _ in best_plan_routes], np.int64)
        f, feas, dv, end = ev.detail(route, rot, splits)
        assert f == pytest.approx(plan.fitness, rel=1e-12)
        assert feas == plan.feasible
        for i, r in enumerate(plan.routes):
            assert dv[i] == pytest.approx(r.total_dv, rel=1e-12)
            assert end[i] == pytest.approx(r.final_completion, rel=1e-12)

    def test_fast_path_empty_route(self, geo14):
        ev = Evaluator(geo14)
        route = np.arange(geo14.n_tasks, dtype=np.int64)
        rot = np.ones(geo14.n_tasks, np.int64)
        splits = np.array([geo14.n_tasks, 0], np.int64)
        f, feas, dv, end = ev.detail(route, rot, splits)
        assert dv[1] == 0.0 and end[1] == 0.0

    def test_eval_counter(self, geo14):
        ev = Evaluator(geo14)
        route = np.arange(geo14.n_tasks, dtype=np.int64)
        rot = np.ones(geo14.n_tasks, np.int64)
        splits = np.array([7, 7], np.int64)
        for _ in range(3):
            ev.fitness(route, rot, splits)
        assert ev.n_evals == 3


class TestScenario:
    def test_duplicate_ids_rejected(self, geo14):
        from oosplan.mission import Scenario
        tasks = list(geo14.tasks)
        tasks[1] = tasks[0]
        with pytest.raises(ValueError):
            Scenario(geo14.servicers, tasks, 1000.0, 720.0)

    def test_task_lookup(self, geo14):
        assert geo14.task_by_id(7).name == "T7"
        assert geo14.n_tasks == 14
        assert geo14.n_servicers == 2
