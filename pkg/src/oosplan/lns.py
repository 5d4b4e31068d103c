"""Large neighborhood search intensification for RPS chromosomes.

Destroy-and-repair with rotating removal strategies, 2-regret reinsertion
that re-prices every candidate position through the full schedule, and a
zero-sum rotation polish.  Works on the same 0-based gene arrays as the
GA so the two layers share one evaluator.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .mission import Evaluator
from .rps import RpsChromosome

DESTROY_STRATEGIES = ("random", "high_cost", "cluster")


@dataclass
class LnsConfig:
    iterations: int = 5
    destroy_fraction: float = 0.30
    accept: str = "greedy"
    sa_t0: float = 50.0
    sa_decay: float = 0.9
    polish: bool = True


@dataclass
class PartialPlan:
    """Chromosome with some tasks removed from the route.

    ``route`` keeps the surviving genes, ``splits`` the shrunken block
    lengths; removed tasks carry their rotation genes along so repair can
    reuse them.
    """

    route: np.ndarray
    rotations: np.ndarray
    splits: np.ndarray
    removed: List[Tuple[int, int]]


def _leg_costs(chrom: RpsChromosome, ev: Evaluator) -> np.ndarray:
    """dv of the leg serving each task, indexed by task, m/s."""
    p = ev.scenario.packed()
    c = ev.scenario.constants
    costs = np.zeros(ev.scenario.n_tasks)
    buf = np.zeros((ev.scenario.n_tasks, kernels.LEG_COLS))
    pos = 0
    for i in range(ev.scenario.n_servicers):
        n = int(chrom.splits[i])
        if n > 0:
            seg = slice(pos, pos + n)
            kernels.route_schedule(
                p.ssc_inc[i], p.ssc_raan[i], p.ssc_u0[i],
                p.task_inc, p.task_raan, p.task_u0, p.task_repair,
                chrom.route[seg], chrom.rotations[seg],
                ev.scenario.coast_ref_rate, c.mu, c.r_geo, c.t_geo, buf[:n])
            costs[chrom.route[seg]] = buf[:n, kernels.COL_DV]
        pos += n
    return costs


def destroy(chrom: RpsChromosome, strategy: str, fraction: float,
            rng: np.random.Generator, ev: Evaluator) -> PartialPlan:
    """Remove ceil(fraction * N) tasks from the route.

    random: uniform positions.  high_cost: the most expensive legs.
    cluster: a contiguous run of positions around a random seed, which
    targets one servicer's neighborhood.
    """
    n = chrom.n_tasks
    n_remove = min(n, int(math.ceil(fraction * n)))
    if strategy == "random":
        pos = rng.choice(n, n_remove, replace=False)
    elif strategy == "high_cost":
        costs = _leg_costs(chrom, ev)
        order = np.argsort(-costs[chrom.route], kind="stable")
        pos = order[:n_remove]
    elif strategy == "cluster":
        start = int(rng.integers(n))
        pos = (start + np.arange(n_remove)) % n
    else:
        raise ValueError(f"unknown destroy strategy {strategy!r}")
    mask = np.zeros(n, bool)
    mask[pos] = True
    removed = [(int(chrom.route[i]), int(chrom.rotations[i]))
               for i in sorted(np.flatnonzero(mask))]
    # shrink each servicer block by the removals that fell inside it
    splits = chrom.splits.copy()
    bounds = np.concatenate(([0], np.cumsum(chrom.splits)))
    for i in range(splits.shape[0]):
        splits[i] -= int(mask[bounds[i]:bounds[i + 1]].sum())
    keep = ~mask
    return PartialPlan(chrom.route[keep].copy(),
                       chrom.rotations[keep].copy(), splits, removed)


def _insertion_fitness(partial: PartialPlan, task: int, rot: int,
                       servicer: int, pos: int, ev: Evaluator,
                       route_buf: np.ndarray, rot_buf: np.ndarray,
                       splits_buf: np.ndarray) -> float:
    """Fitness of the partial plan with one task inserted, full re-price."""
    bounds = np.concatenate(([0], np.cumsum(partial.splits)))
    at = int(bounds[servicer]) + pos
    m = partial.route.shape[0]
    route_buf[:at] = partial.route[:at]
    route_buf[at] = task
    route_buf[at + 1:m + 1] = partial.route[at:]
    rot_buf[:at] = partial.rotations[:at]
    rot_buf[at] = rot
    rot_buf[at + 1:m + 1] = partial.rotations[at:]
    splits_buf[:] = partial.splits
    splits_buf[servicer] += 1
    f, _ = ev.fitness(route_buf[:m + 1], rot_buf[:m + 1], splits_buf)
    return f


def _apply_insertion(partial: PartialPlan, task: int, rot: int,
                     servicer: int, pos: int) -> None:
    bounds = np.concatenate(([0], np.cumsum(partial.splits)))
    at = int(bounds[servicer]) + pos
    partial.route = np.insert(partial.route, at, task)
    partial.rotations = np.insert(partial.rotations, at, rot)
    partial.splits[servicer] += 1


def regret_repair(partial: PartialPlan, ev: Evaluator) -> RpsChromosome:
    """Reinsert removed tasks by 2-regret, best position, stored rotations.

    Each round prices every (task, servicer, position) triple by the full
    fitness of the augmented plan, computes regret = second-best minus
    best per task, and commits the highest-regret task first.  Ties break
    toward the cheaper insertion, then the lower task index.
    """
    n_total = partial.route.shape[0] + len(partial.removed)
    route_buf = np.empty(n_total, np.int64)
    rot_buf = np.empty(n_total, np.int64)
    splits_buf = np.empty(partial.splits.shape[0], np.int64)
    pending = list(partial.removed)
    while pending:
        best_pick = None
        for task, rot in pending:
            c1 = c2 = math.inf
            arg1 = None
            for s in range(partial.splits.shape[0]):
                for pos in range(int(partial.splits[s]) + 1):
                    f = _insertion_fitness(partial, task, rot, s, pos, ev,
                                           route_buf, rot_buf, splits_buf)
                    if f < c1:
                        c2 = c1
                        c1 = f
                        arg1 = (s, pos)
                    elif f < c2:
                        c2 = f
            regret = (c2 - c1) if math.isfinite(c2) else 0.0
            key = (-regret, c1, task)
            if best_pick is None or key < best_pick[0]:
                best_pick = (key, task, rot, arg1)
        _, task, rot, (s, pos) = best_pick
        _apply_insertion(partial, task, rot, s, pos)
        pending = [(t, r) for t, r in pending if t != task]
    return RpsChromosome(partial.route, partial.rotations, partial.splits)


def accept(f_new: float, f_cur: float, temperature: float,
           rng: np.random.Generator) -> bool:
    """Greedy at T=0, otherwise simulated-annealing Metropolis rule."""
    if f_new < f_cur:
        return True
    if temperature <= 0.0:
        return False
    return rng.random() < math.exp(-(f_new - f_cur) / temperature)


def rotation_polish(chrom: RpsChromosome, fitness: float, ev: Evaluator,
                    rotation_max: int, rng: np.random.Generator,
                    budget: Optional[int] = None,
                    ) -> Tuple[RpsChromosome, float]:
    """Zero-sum rotation perturbations, keeping the best improvement.

    Each trial draws a subset of rotation genes and a delta vector in
    {-1, 0, 1} summing to zero; candidates that would clamp outside
    [1, rotation_max] are discarded.  Half the trials also swap two route
    genes (the permutation-augmented variant).
    """
    n = chrom.n_tasks
    if budget is None:
        budget = 2 * n
    best = chrom
    best_f = fitness
    for trial in range(budget):
        k = int(rng.integers(2, min(n, 4) + 1))
        idx = rng.choice(n, k, replace=False)
        delta = rng.integers(-1, 2, k)
        delta[-1] -= delta.sum()
        if abs(delta[-1]) > 1:
            continue
        rot = best.rotations.copy()
        rot[idx] += delta
        if rot[idx].min() < 1 or rot[idx].max() > rotation_max:
            continue
        cand = RpsChromosome(best.route.copy(), rot, best.splits.copy())
        if trial % 2 == 1 and n >= 2:
            i, j = rng.choice(n, 2, replace=False)
            cand.route[i], cand.route[j] = cand.route[j], cand.route[i]
        f, _ = ev.fitness(cand.route, cand.rotations, cand.splits)
        if f < best_f:
            best, best_f = cand, f
    return best, best_f


def lns_improve(chrom: RpsChromosome, fitness: float, ev: Evaluator,
                rotation_max: int, rng: np.random.Generator,
                config: Optional[LnsConfig] = None,
                strategy_offset: int = 0) -> Tuple[RpsChromosome, float]:
    """Run the destroy/repair/polish loop from one incumbent.

    Strategies rotate round-robin starting at ``strategy_offset`` so
    successive calls from the outer search cycle through all of them.
    Returns the best chromosome found and its fitness.
    """
    if config is None:
        config = LnsConfig()
    cur, cur_f = chrom, fitness
    best, best_f = chrom, fitness
    temp = config.sa_t0 if config.accept == "sa" else 0.0
    for it in range(config.iterations):
        strat = DESTROY_STRATEGIES[(strategy_offset + it)
                                   % len(DESTROY_STRATEGIES)]
        partial = destroy(cur, strat, config.destroy_fraction, rng, ev)
        cand = regret_repair(partial, ev)
        f, _ = ev.fitness(cand.route, cand.rotations, cand.splits)
        if config.polish:
            cand, f = rotation_polish(cand, f, ev, rotation_max, rng)
        if accept(f, cur_f, temp, rng):
            cur, cur_f = cand, f
        if f < best_f:
            best, best_f = cand, f
        temp *= config.sa_decay
    return best, best_f
