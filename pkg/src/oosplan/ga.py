"""Adaptive genetic algorithm over Route-Phasing-Split chromosomes.

Elitist generational GA with roulette selection, adaptive crossover and
mutation rates, credit-weighted choice among three order crossovers,
stagnation-triggered diversity injection and optional per-generation LNS
intensification of the incumbent.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .lns import LnsConfig, lns_improve
from .mission import Evaluator, Scenario
from .rps import RpsChromosome, random_chromosome, repair

CROSSOVER_OPS = ("rbc", "multi_rbc", "hopc")


@dataclass
class GaConfig:
    pop_size: int = 100
    min_generations: int = 100
    max_generations: int = 400
    improvement_window: int = 50
    improvement_tol: float = 1e-6
    pc_min: float = 0.6
    pc_max: float = 0.9
    pm_min: float = 0.08
    pm_max: float = 0.2
    n_elite: int = 2
    n_elite_pool: int = 4
    selection_eps: float = 0.01
    credit_beta: float = 0.1
    credit_reward: float = 1.0
    credit_floor: float = 0.05
    block_policy: str = "uniform"
    reseed_prob: float = 0.05
    burn_in: int = 20
    stagnation_spread: float = 0.005
    stagnation_window: int = 5
    stagnation_delta: float = 1e-4
    injection_fraction: float = 0.9
    lam: float = 1.0
    kappa: float = 1000.0
    w_dv: float = 1.0
    w_t: float = 1.0
    lns_enabled: bool = True
    lns_every: int = 1
    lns: LnsConfig = field(default_factory=LnsConfig)
    seed: Optional[int] = None

    def __post_init__(self):
        if self.pop_size < 4:
            raise ValueError("pop_size must be at least 4")
        if not (0.0 <= self.pc_min <= self.pc_max <= 1.0):
            raise ValueError("need 0 <= pc_min <= pc_max <= 1")
        if not (0.0 <= self.pm_min <= self.pm_max <= 1.0):
            raise ValueError("need 0 <= pm_min <= pm_max <= 1")
        if self.n_elite < 1 or self.n_elite > self.pop_size // 2:
            raise ValueError("n_elite must be in [1, pop_size/2]")


@dataclass
class GenerationTrace:
    generation: int
    best_fitness: float
    mean_fitness: float
    worst_fitness: float
    best_feasible: bool
    feasible_count: int
    pc_mean: float
    pm_mean: float
    injected: bool
    lns_improved: bool
    credits: Dict[str, float]


@dataclass
class GaResult:
    best: RpsChromosome
    best_fitness: float
    best_feasible: bool
    per_servicer_dv: np.ndarray
    per_servicer_end: np.ndarray
    history: List[GenerationTrace]
    generations: int
    n_evals: int
    seed: Optional[int]

    @property
    def total_dv(self) -> float:
        return float(self.per_servicer_dv.sum())

    @property
    def final_completion(self) -> float:
        return float(self.per_servicer_end.max()) if len(
            self.per_servicer_end) else 0.0


def roulette_weights(fitness: np.ndarray, eps: float = 0.01) -> np.ndarray:
    """Minimization roulette: w_i = f_max - f_i + eps, normalized."""
    w = fitness.max() - fitness + eps
    return w / w.sum()


def adaptive_pc(f_pair: float, f_mean: float, f_worst: float,
                pc_min: float, pc_max: float, eps: float = 1e-12) -> float:
    """Crossover rate for a pair, driven by its better parent's fitness.

    Individuals at or below (better than) the mean are partially shielded;
    the spread is clamped at f_worst - f_mean so the rate stays in range
    under minimization.
    """
    if f_pair >= f_mean:
        return pc_max
    spread = max(f_worst - f_mean, 0.0) + eps
    pc = pc_max - (pc_max - pc_min) * (f_mean - f_pair) / spread
    return min(pc_max, max(pc_min, pc))


def adaptive_pm(f_ind: float, f_mean: float, f_worst: float,
                pm_min: float, pm_max: float, feasible: bool = True,
                eps: float = 1e-12) -> float:
    """Mutation rate per individual; infeasible individuals get pm_max."""
    if not feasible or f_ind >= f_mean:
        return pm_max
    spread = max(f_worst - f_mean, 0.0) + eps
    pm = pm_max - (pm_max - pm_min) * (f_mean - f_ind) / spread
    return min(pm_max, max(pm_min, pm))


def _pick_block(n: int, rng: np.random.Generator, policy: str,
                ) -> Tuple[int, int]:
    if policy == "length_weighted":
        lengths = np.arange(1, n)
        length = int(rng.choice(lengths, p=lengths / lengths.sum()))
        i = int(rng.integers(0, n - length + 1))
        return i, i + length
    i, j = sorted(rng.choice(n + 1, 2, replace=False))
    if j - i == n:
        j -= 1
    if i == j:
        j += 1
    return int(i), int(j)


def crossover_rbc(a: np.ndarray, b: np.ndarray, rng: np.random.Generator,
                  policy: str = "uniform") -> np.ndarray:
    """Random block crossover: one block of a kept in place, rest in b order."""
    n = a.shape[0]
    i, j = _pick_block(n, rng, policy)
    child = np.full(n, -1, np.int64)
    child[i:j] = a[i:j]
    held = np.zeros(n, bool)
    held[a[i:j]] = True
    filler = b[~held[b]]
    child[:i] = filler[:i]
    child[j:] = filler[i:]
    return child


def crossover_multi_rbc(a: np.ndarray, b: np.ndarray,
                        rng: np.random.Generator) -> np.ndarray:
    """Two or three disjoint blocks of a kept in place, rest in b order."""
    n = a.shape[0]
    n_blocks = min(int(rng.integers(2, 4)), (n + 1) // 2)
    if n_blocks < 2:
        return crossover_rbc(a, b, rng)
    cuts = np.sort(rng.choice(n + 1, 2 * n_blocks, replace=False))
    keep = np.zeros(n, bool)
    for bi in range(n_blocks):
        keep[cuts[2 * bi]:cuts[2 * bi + 1]] = True
    child = np.full(n, -1, np.int64)
    child[keep] = a[keep]
    held = np.zeros(n, bool)
    held[a[keep]] = True
    child[~keep] = b[~held[b]]
    return child


def crossover_hopc(a: np.ndarray, b: np.ndarray,
                   rng: np.random.Generator) -> np.ndarray:
    """Head-preserving order crossover: prefix of a, remainder in b order."""
    n = a.shape[0]
    c = int(rng.integers(1, n))
    child = np.empty(n, np.int64)
    child[:c] = a[:c]
    held = np.zeros(n, bool)
    held[a[:c]] = True
    child[c:] = b[~held[b]]
    return child


def update_credit(credits: Dict[str, float], op: str, reward: float,
                  beta: float) -> None:
    """Exponentially averaged operator credit: Q <- (1-beta) Q + beta r."""
    credits[op] = (1.0 - beta) * credits[op] + beta * reward


def _pick_operator(credits: Dict[str, float], rng: np.random.Generator,
                   floor: float) -> str:
    q = np.array([max(credits[op], floor) for op in CROSSOVER_OPS])
    return CROSSOVER_OPS[int(rng.choice(len(CROSSOVER_OPS), p=q / q.sum()))]


def _rot_by_task(chrom: RpsChromosome) -> np.ndarray:
    by_task = np.empty(chrom.n_tasks, np.int64)
    by_task[chrom.route] = chrom.rotations
    return by_task


def mate(pa: RpsChromosome, pb: RpsChromosome, op: str,
         rng: np.random.Generator, rotation_max: int,
         block_policy: str = "uniform",
         reseed_prob: float = 0.05) -> RpsChromosome:
    """One child from a parent pair.

    The route comes from the chosen order crossover; rotation genes follow
    task identity (not position) and are mixed with a uniform mask; splits
    come from a disruptive arithmetic blend of the parents, with a small
    reseed probability.
    """
    n = pa.n_tasks
    m = pa.n_servicers
    if op == "rbc":
        route = crossover_rbc(pa.route, pb.route, rng, block_policy)
    elif op == "multi_rbc":
        route = crossover_multi_rbc(pa.route, pb.route, rng)
    elif op == "hopc":
        route = crossover_hopc(pa.route, pb.route, rng)
    else:
        raise ValueError(f"unknown crossover operator {op!r}")
    mask = rng.random(n) < 0.5
    rot_task = np.where(mask, _rot_by_task(pa), _rot_by_task(pb))
    rotations = rot_task[route]
    if rng.random() < reseed_prob:
        cuts = np.sort(rng.integers(0, n + 1, m - 1))
        splits = np.diff(np.concatenate(([0], cuts, [n]))).astype(np.int64)
    else:
        alpha = rng.uniform(-0.25, 1.25)
        splits = np.rint(alpha * pa.splits
                         + (1.0 - alpha) * pb.splits).astype(np.int64)
    child = RpsChromosome(route, rotations, splits)
    return repair(child, n, rotation_max, rng)


def mutate(chrom: RpsChromosome, pm: float, rng: np.random.Generator,
           rotation_max: int, anneal: float = 0.0) -> RpsChromosome:
    """In-place mutation; each gene family fires independently with pm.

    Route: swap, inversion or scramble, the scramble window shrinking as
    ``anneal`` goes from 0 to 1.  Rotations: one or two genes nudged by
    +-1 or +-2.  Splits: a unit transfer, a route split or a route merge.
    """
    n = chrom.n_tasks
    m = chrom.n_servicers
    if rng.random() < pm and n >= 2:
        move = rng.random()
        i, j = sorted(rng.choice(n, 2, replace=False))
        if move < 1 / 3:
            chrom.route[i], chrom.route[j] = chrom.route[j], chrom.route[i]
        elif move < 2 / 3:
            chrom.route[i:j + 1] = chrom.route[i:j + 1][::-1]
        else:
            span = max(2, int(round(n * 0.5 * (1.0 - anneal))))
            i = int(rng.integers(0, n - span + 1))
            seg = chrom.route[i:i + span]
            chrom.route[i:i + span] = rng.permutation(seg)
    if rng.random() < pm:
        for idx in rng.choice(n, int(rng.integers(1, 3)), replace=False):
            step = int(rng.choice([-2, -1, 1, 2]))
            chrom.rotations[idx] = min(rotation_max,
                                       max(1, chrom.rotations[idx] + step))
    if rng.random() < pm and m >= 2:
        move = rng.random()
        if move < 1 / 3:
            src, dst = rng.choice(m, 2, replace=False)
            if chrom.splits[src] > 0:
                chrom.splits[src] -= 1
                chrom.splits[dst] += 1
        elif move < 2 / 3:
            src = int(np.argmax(chrom.splits))
            dst = int(np.argmin(chrom.splits))
            give = int(chrom.splits[src]) // 2
            chrom.splits[src] -= give
            chrom.splits[dst] += give
        else:
            src = int(rng.integers(m))
            dst = int(rng.integers(m))
            if src != dst:
                chrom.splits[dst] += chrom.splits[src]
                chrom.splits[src] = 0
    return chrom


def detect_stagnation(best_history: List[float], fitness: np.ndarray,
                      generation: int, cfg: GaConfig) -> bool:
    """Population collapse test: tight spread and a flat incumbent."""
    if generation < cfg.burn_in:
        return False
    best = fitness.min()
    spread_ok = (np.percentile(fitness, 90) - best
                 <= cfg.stagnation_spread * max(abs(best), 1.0))
    w = cfg.stagnation_window
    if len(best_history) < w + 1:
        return False
    recent = best_history[-(w + 1):]
    flat = max(abs(recent[i] - recent[i + 1])
               for i in range(w)) < cfg.stagnation_delta
    return bool(spread_ok and flat)


def inject_diversity(pop: List[RpsChromosome], fitness: np.ndarray,
                     cfg: GaConfig, rng: np.random.Generator,
                     scenario: Scenario) -> List[RpsChromosome]:
    """Replace most of the population, keeping a deduplicated elite seed.

    Survivors are the best distinct chromosomes; replacements are half
    heavily mutated clones of survivors, half fresh random individuals.
    """
    order = np.argsort(fitness, kind="stable")
    n_keep = max(cfg.n_elite,
                 int(round(cfg.pop_size * (1.0 - cfg.injection_fraction))))
    survivors: List[RpsChromosome] = []
    seen = set()
    for i in order:
        key = (pop[i].route.tobytes(), pop[i].rotations.tobytes(),
               pop[i].splits.tobytes())
        if key not in seen:
            seen.add(key)
            survivors.append(pop[i])
        if len(survivors) == n_keep:
            break
    new_pop = [c.copy() for c in survivors]
    while len(new_pop) < cfg.pop_size:
        if rng.random() < 0.5 and survivors:
            c = survivors[int(rng.integers(len(survivors)))].copy()
            mutate(c, 1.0, rng, scenario.rotation_max)
            mutate(c, 1.0, rng, scenario.rotation_max)
            repair(c, scenario.n_tasks, scenario.rotation_max, rng)
            new_pop.append(c)
        else:
            new_pop.append(random_chromosome(rng, scenario.n_tasks,
                                             scenario.n_servicers,
                                             scenario.rotation_max))
    return new_pop


def run(scenario: Scenario, config: Optional[GaConfig] = None,
        rng: Optional[np.random.Generator] = None) -> GaResult:
    """Full GA + LNS solve of a scenario; deterministic given config.seed."""
    cfg = config if config is not None else GaConfig()
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    ev = Evaluator(scenario, lam=cfg.lam, kappa=cfg.kappa,
                   w_dv=cfg.w_dv, w_t=cfg.w_t)
    n, m = scenario.n_tasks, scenario.n_servicers
    kmax = scenario.rotation_max

    pop = [random_chromosome(rng, n, m, kmax) for _ in range(cfg.pop_size)]

    def eval_pop(chroms):
        f = np.empty(len(chroms))
        feas = np.empty(len(chroms), bool)
        for i, c in enumerate(chroms):
            f[i], feas[i] = ev.fitness(c.route, c.rotations, c.splits)
        return f, feas

    fitness, feasible = eval_pop(pop)
    credits = {op: 1.0 for op in CROSSOVER_OPS}
    history: List[GenerationTrace] = []
    best_history: List[float] = []
    gen = 0
    while True:
        order = np.argsort(fitness, kind="stable")
        pop = [pop[i] for i in order]
        fitness = fitness[order]
        feasible = feasible[order]
        best_history.append(float(fitness[0]))

        injected = False
        if detect_stagnation(best_history, fitness, gen, cfg):
            pop = inject_diversity(pop, fitness, cfg, rng, scenario)
            fitness, feasible = eval_pop(pop)
            order = np.argsort(fitness, kind="stable")
            pop = [pop[i] for i in order]
            fitness = fitness[order]
            feasible = feasible[order]
            injected = True

        lns_improved = False
        if cfg.lns_enabled and gen % cfg.lns_every == 0:
            cand, f = lns_improve(pop[0], float(fitness[0]), ev, kmax, rng,
                                  cfg.lns, strategy_offset=gen)
            if f < fitness[0]:
                pop[0] = cand
                fitness[0] = f
                _, feasible[0] = ev.fitness(cand.route, cand.rotations,
                                            cand.splits)
                lns_improved = True
                best_history[-1] = f

        f_mean = float(fitness.mean())
        f_worst = float(fitness.max())
        anneal = min(1.0, gen / max(cfg.min_generations, 1))

        pc_seen: List[float] = []
        pm_seen: List[float] = []
        probs = roulette_weights(fitness, cfg.selection_eps)

        # mating pool: roulette draws plus scrambled copies of the extra
        # elites to keep their building blocks in circulation
        pool_idx = rng.choice(cfg.pop_size, cfg.pop_size, p=probs)
        pool = [pop[i].copy() for i in pool_idx]
        pool_f = fitness[pool_idx].copy()
        pool_feas = feasible[pool_idx].copy()
        for e in range(cfg.n_elite, min(cfg.n_elite_pool, cfg.pop_size)):
            slot = int(rng.integers(cfg.pop_size))
            extra = pop[e].copy()
            mutate(extra, 1.0, rng, kmax, anneal)
            repair(extra, n, kmax, rng)
            pool[slot] = extra
            pool_f[slot] = fitness[e]
            pool_feas[slot] = feasible[e]

        children: List[RpsChromosome] = []
        child_f: List[float] = []
        child_feas: List[bool] = []
        for p0 in range(0, cfg.pop_size - 1, 2):
            pa, pb = pool[p0], pool[p0 + 1]
            fa, fb = pool_f[p0], pool_f[p0 + 1]
            parents_feasible = pool_feas[p0] or pool_feas[p0 + 1]
            pc = adaptive_pc(min(fa, fb), f_mean, f_worst,
                             cfg.pc_min, cfg.pc_max)
            pc_seen.append(pc)
            if rng.random() < pc:
                op = _pick_operator(credits, rng, cfg.credit_floor)
                ca = mate(pa, pb, op, rng, kmax, cfg.block_policy,
                          cfg.reseed_prob)
                cb = mate(pb, pa, op, rng, kmax, cfg.block_policy,
                          cfg.reseed_prob)
            else:
                op = None
                ca, cb = pa.copy(), pb.copy()
            for c in (ca, cb):
                fc, feas_c = ev.fitness(c.route, c.rotations, c.splits)
                pm = adaptive_pm(fc, f_mean, f_worst, cfg.pm_min,
                                 cfg.pm_max, feas_c)
                pm_seen.append(pm)
                mutate(c, pm, rng, kmax, anneal)
                repair(c, n, kmax, rng)
                fc, feas_c = ev.fitness(c.route, c.rotations, c.splits)
                if op is not None:
                    improved = fc < min(fa, fb)
                    restored = feas_c and not parents_feasible
                    reward = (cfg.credit_reward
                              if improved or restored else 0.0)
                    update_credit(credits, op, reward, cfg.credit_beta)
                children.append(c)
                child_f.append(fc)
                child_feas.append(feas_c)

        elites = [pop[i].copy() for i in range(cfg.n_elite)]
        elite_f = fitness[:cfg.n_elite].copy()
        elite_feas = feasible[:cfg.n_elite].copy()
        take = cfg.pop_size - cfg.n_elite
        pop = elites + children[:take]
        fitness = np.concatenate((elite_f, np.array(child_f[:take])))
        feasible = np.concatenate((elite_feas,
                                   np.array(child_feas[:take], bool)))

        gen_best_feasible = bool(feasible[int(np.argmin(fitness))])
        # forward invariance: with an active infeasibility penalty, the
        # elitist incumbent must never fall back from feasible to
        # infeasible (an infeasible successor would need a lower fitness
        # despite carrying the kappa term)
        if cfg.kappa > 0.0 and history and history[-1].best_feasible:
            assert gen_best_feasible, (
                "feasible incumbent displaced by an infeasible one "
                f"at generation {gen} despite kappa={cfg.kappa}")
        history.append(GenerationTrace(
            generation=gen,
            best_fitness=float(fitness.min()),
            mean_fitness=float(fitness.mean()),
            worst_fitness=float(fitness.max()),
            best_feasible=gen_best_feasible,
            feasible_count=int(feasible.sum()),
            pc_mean=float(np.mean(pc_seen)) if pc_seen else 0.0,
            pm_mean=float(np.mean(pm_seen)) if pm_seen else 0.0,
            injected=injected,
            lns_improved=lns_improved,
            credits=dict(credits)))

        gen += 1
        if gen >= cfg.max_generations:
            break
        if gen >= cfg.min_generations:
            w = cfg.improvement_window
            if len(best_history) > w:
                then = best_history[-(w + 1)]
                now = min(best_history[-1], float(fitness.min()))
                rel = (then - now) / max(abs(then), 1.0)
                if rel < cfg.improvement_tol:
                    break

    i_best = int(np.argmin(fitness))
    best = pop[i_best]
    f_best, feas_best, dv, end = ev.detail(best.route, best.rotations,
                                           best.splits)
    return GaResult(best=best, best_fitness=f_best, best_feasible=feas_best,
                    per_servicer_dv=dv, per_servicer_end=end,
                    history=history, generations=gen, n_evals=ev.n_evals,
                    seed=cfg.seed)
