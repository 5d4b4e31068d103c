"""Scenario definition, schedule propagation and penalized fitness.

A Scenario bundles the servicer fleet, the task set and the mission-level
budgets.  Route schedules are propagated leg by leg through the transfer
kernel; constraint violations are priced by the team penalty
P_team = (sum P_s)^2 + lambda * sum P_s^2 plus a binary infeasibility
penalty kappa, and fitness = total dv + P_team + P_infeasible.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .constants import GEO, PhysicalConstants
from .orbits import DEFAULT_REF_RATE, OrbitalElements, TransferLeg


class DuplicateTask(ValueError):
    """A task id appears more than once across the plan's routes."""


class MissingTask(ValueError):
    """A scenario task is absent from the plan's routes."""


@dataclass(frozen=True)
class Task:
    id: int
    name: str
    orbit: OrbitalElements
    repair_duration: float

    def __post_init__(self):
        if self.repair_duration < 0:
            raise ValueError(f"task {self.id}: repair_duration must be >= 0")


@dataclass(frozen=True)
class Servicer:
    id: int
    name: str
    orbit: OrbitalElements


@dataclass(frozen=True)
class _PackedScenario:
    """Flat array view of a scenario for the numeric kernels."""

    ssc_inc: np.ndarray
    ssc_raan: np.ndarray
    ssc_u0: np.ndarray
    task_inc: np.ndarray
    task_raan: np.ndarray
    task_u0: np.ndarray
    task_repair: np.ndarray
    index_of: Dict[int, int]
    ids: np.ndarray


@dataclass(frozen=True)
class Scenario:
    servicers: List[Servicer]
    tasks: List[Task]
    dv_max: float
    t_max: float
    constants: PhysicalConstants = GEO
    rotation_max: int = 5
    coast_ref_rate: float = DEFAULT_REF_RATE

    def __post_init__(self):
        if not self.servicers or not self.tasks:
            raise ValueError("scenario needs at least 1 servicer and 1 task")
        if self.dv_max <= 0 or self.t_max <= 0:
            raise ValueError("dv_max and t_max must be positive")
        if self.rotation_max < 1:
            raise ValueError("rotation_max must be >= 1")
        sids = [s.id for s in self.servicers]
        tids = [t.id for t in self.tasks]
        if len(set(sids)) != len(sids) or len(set(tids)) != len(tids):
            raise ValueError("servicer/task ids must be unique")

    @property
    def n_tasks(self) -> int:
        return len(self.tasks)

    @property
    def n_servicers(self) -> int:
        return len(self.servicers)

    def packed(self) -> _PackedScenario:
        cached = getattr(self, "_packed", None)
        if cached is None:
            cached = _PackedScenario(
                ssc_inc=np.array([s.orbit.inclination
                                  for s in self.servicers]),
                ssc_raan=np.array([s.orbit.raan for s in self.servicers]),
                ssc_u0=np.array([s.orbit.true_anomaly_at_epoch
                                 for s in self.servicers]),
                task_inc=np.array([t.orbit.inclination for t in self.tasks]),
                task_raan=np.array([t.orbit.raan for t in self.tasks]),
                task_u0=np.array([t.orbit.true_anomaly_at_epoch
                                  for t in self.tasks]),
                task_repair=np.array([t.repair_duration
                                      for t in self.tasks]),
                index_of={t.id: i for i, t in enumerate(self.tasks)},
                ids=np.array([t.id for t in self.tasks], np.int64),
            )
            object.__setattr__(self, "_packed", cached)
        return cached

    def task_by_id(self, task_id: int) -> Task:
        return self.tasks[self.packed().index_of[task_id]]


@dataclass(frozen=True)
class ScheduledLeg:
    task_id: int
    leg: TransferLeg
    arrive_time: float
    completion_time: float


@dataclass(frozen=True)
class RouteSchedule:
    servicer_id: int
    legs: List[ScheduledLeg]
    total_dv: float
    final_completion: float


@dataclass(frozen=True)
class PenaltyBreakdown:
    per_servicer: List[Tuple[float, float, float]]
    p_team: float
    p_infeasible: float
    lam: float
    kappa: float


@dataclass(frozen=True)
class MissionPlan:
    routes: List[RouteSchedule]
    assignment: Dict[int, int]
    penalty: PenaltyBreakdown
    fitness: float

    @property
    def total_dv(self) -> float:
        return sum(r.total_dv for r in self.routes)

    @property
    def final_completion(self) -> float:
        return max((r.final_completion for r in self.routes), default=0.0)

    @property
    def feasible(self) -> bool:
        return self.penalty.p_team == 0.0


def _leg_from_row(row: np.ndarray, k: int) -> TransferLeg:
    return TransferLeg(
        departure_time=row[kernels.COL_DEPART],
        coast_time=row[kernels.COL_COAST],
        phase_angle=row[kernels.COL_THETA],
        rotations=int(k),
        phasing_time=row[kernels.COL_TPHASE],
        phasing_sma=row[kernels.COL_APHASE],
        impulse_1=row[kernels.COL_IMP1:kernels.COL_IMP1 + 3].copy(),
        impulse_2=row[kernels.COL_IMP2:kernels.COL_IMP2 + 3].copy(),
        dv_total=row[kernels.COL_DV],
        maneuver_point=row[kernels.COL_RM:kernels.COL_RM + 3].copy(),
        plane_change_dv=row[kernels.COL_PLANE_DV],
        phasing_dv=row[kernels.COL_PHASE_DV],
        plane_separation=row[kernels.COL_ALPHA],
    )


def propagate_route(servicer: Servicer, task_order: Sequence[int],
                    rotations: Sequence[int],
                    scenario: Scenario) -> RouteSchedule:
    """Chain transfer legs and repair stops along one servicer route.

    ``task_order`` holds task ids; departure of leg j+1 happens at the
    completion time of leg j, from the just-serviced satellite's orbit.
    """
    if len(task_order) != len(rotations):
        raise ValueError("task_order and rotations must have equal length")
    for k in rotations:
        if not 1 <= int(k) <= scenario.rotation_max:
            raise ValueError(f"rotation {k} outside [1, "
                             f"{scenario.rotation_max}]")
    p = scenario.packed()
    n = len(task_order)
    if n == 0:
        return RouteSchedule(servicer.id, [], 0.0, 0.0)
    order = np.array([p.index_of[t] for t in task_order], np.int64)
    rot = np.array([int(k) for k in rotations], np.int64)
    out = np.zeros((n, kernels.LEG_COLS))
    c = scenario.constants
    kernels.route_schedule(
        servicer.orbit.inclination, servicer.orbit.raan,
        servicer.orbit.true_anomaly_at_epoch,
        p.task_inc, p.task_raan, p.task_u0, p.task_repair,
        order, rot, scenario.coast_ref_rate, c.mu, c.r_geo, c.t_geo, out)
    legs = [ScheduledLeg(task_id=int(task_order[j]),
                         leg=_leg_from_row(out[j], rot[j]),
                         arrive_time=out[j, kernels.COL_ARRIVE],
                         completion_time=out[j, kernels.COL_END])
            for j in range(n)]
    return RouteSchedule(servicer.id, legs,
                         float(out[:, kernels.COL_DV].sum()),
                         float(out[-1, kernels.COL_END]))


def _check_assignment(plan_routes, scenario: Scenario):
    seen = {}
    for si, (order, _rot) in enumerate(plan_routes):
        for t in order:
            if t in seen:
                raise DuplicateTask(f"task {t} assigned to servicer "
                                    f"{seen[t]} and {si}")
            if t not in scenario.packed().index_of:
                raise MissingTask(f"unknown task id {t}")
            seen[t] = si
    missing = set(scenario.packed().index_of) - set(seen)
    if missing:
        raise MissingTask(f"tasks not assigned: {sorted(missing)}")


def evaluate(plan_routes: Sequence[Tuple[Sequence[int], Sequence[int]]],
             scenario: Scenario,
             lam: float = 1.0,
             kappa: Optional[float] = None,
             w_dv: float = 1.0,
             w_t: float = 1.0) -> MissionPlan:
    """Propagate every route and attach the penalty/fitness breakdown.

    ``plan_routes`` is one (task_order, rotations) pair per servicer in
    scenario order; the union of orders must cover every task exactly
    once.  ``kappa`` defaults to the scenario's dv budget.
    """
    if len(plan_routes) != scenario.n_servicers:
        raise ValueError("need one (order, rotations) pair per servicer")
    _check_assignment(plan_routes, scenario)
    if kappa is None:
        kappa = scenario.dv_max
    routes = []
    assignment = {}
    per = []
    p_sum = 0.0
    p_sq = 0.0
    for servicer, (order, rot) in zip(scenario.servicers, plan_routes):
        sched = propagate_route(servicer, order, rot, scenario)
        routes.append(sched)
        for t in order:
            assignment[int(t)] = servicer.id
        p_dv = w_dv * max(0.0, sched.total_dv - scenario.dv_max)
        p_t = w_t * max(0.0, sched.final_completion - scenario.t_max)
        per.append((p_dv, p_t, p_dv + p_t))
        p_sum += p_dv + p_t
        p_sq += (p_dv + p_t) ** 2
    p_team = p_sum * p_sum + lam * p_sq
    p_inf = kappa if p_team != 0.0 else 0.0
    penalty = PenaltyBreakdown(per, p_team, p_inf, lam, kappa)
    fitness = sum(r.total_dv for r in routes) + p_team + p_inf
    return MissionPlan(routes, assignment, penalty, fitness)


def check_feasible(plan: MissionPlan) -> bool:
    """True iff every servicer meets both the dv budget and the deadline."""
    return plan.penalty.p_team == 0.0


class Evaluator:
    """Allocation-light fitness evaluation for the search inner loop.

    Holds the packed scenario arrays and a scratch buffer; evaluates
    index-based (route, rotations, splits) gene arrays directly through
    the compiled kernel.
    """

    def __init__(self, scenario: Scenario, lam: float = 1.0,
                 kappa: Optional[float] = None,
                 w_dv: float = 1.0, w_t: float = 1.0):
        self.scenario = scenario
        self.lam = float(lam)
        self.kappa = float(scenario.dv_max if kappa is None else kappa)
        self.w_dv = float(w_dv)
        self.w_t = float(w_t)
        p = scenario.packed()
        self._p = p
        self._scratch = np.zeros((scenario.n_tasks, kernels.LEG_COLS))
        self._dv = np.zeros(scenario.n_servicers)
        self._end = np.zeros(scenario.n_servicers)
        self.n_evals = 0

    def fitness(self, route: np.ndarray, rot: np.ndarray,
                splits: np.ndarray) -> Tuple[float, bool]:
        """Return (fitness, feasible) for 0-based index gene arrays."""
        c = self.scenario.constants
        p = self._p
        f, p_team, _p_inf = kernels.evaluate_genes(
            p.ssc_inc, p.ssc_raan, p.ssc_u0,
            p.task_inc, p.task_raan, p.task_u0, p.task_repair,
            route, rot, splits,
            self.scenario.dv_max, self.scenario.t_max,
            self.w_dv, self.w_t, self.lam, self.kappa,
            self.scenario.coast_ref_rate, c.mu, c.r_geo, c.t_geo,
            self._dv, self._end, self._scratch)
        self.n_evals += 1
        return float(f), p_team == 0.0

    def detail(self, route: np.ndarray, rot: np.ndarray,
               splits: np.ndarray):
        """Like fitness() but also returns per-servicer dv and completion."""
        f, feasible = self.fitness(route, rot, splits)
        return f, feasible, self._dv.copy(), self._end.copy()
