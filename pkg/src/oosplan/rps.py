"""Route-Phasing-Split chromosome codec.

A chromosome is three gene arrays: a permutation of the N task indices
(route), a rotation count per task in [1, rotation_max] (phasing), and
one nonnegative route length per servicer summing to N (split).  The
split genes cut the permutation into consecutive servicer routes.
"""

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np


class InvalidChromosome(ValueError):
    """Gene arrays violate a structural invariant."""


@dataclass
class RpsChromosome:
    route: np.ndarray
    rotations: np.ndarray
    splits: np.ndarray

    def copy(self) -> "RpsChromosome":
        return RpsChromosome(self.route.copy(), self.rotations.copy(),
                             self.splits.copy())

    @property
    def n_tasks(self) -> int:
        return self.route.shape[0]

    @property
    def n_servicers(self) -> int:
        return self.splits.shape[0]

    def route_slices(self) -> List[slice]:
        """Consecutive slices of the permutation, one per servicer."""
        bounds = np.concatenate(([0], np.cumsum(self.splits)))
        return [slice(int(bounds[i]), int(bounds[i + 1]))
                for i in range(self.n_servicers)]


def validate(chrom: RpsChromosome, n_tasks: int, n_servicers: int,
             rotation_max: int) -> None:
    """Raise InvalidChromosome unless all three invariants hold."""
    r = np.asarray(chrom.route)
    k = np.asarray(chrom.rotations)
    s = np.asarray(chrom.splits)
    if r.shape != (n_tasks,) or k.shape != (n_tasks,):
        raise InvalidChromosome(
            f"route/rotations must have shape ({n_tasks},)")
    if s.shape != (n_servicers,):
        raise InvalidChromosome(f"splits must have shape ({n_servicers},)")
    if not np.array_equal(np.sort(r), np.arange(n_tasks)):
        raise InvalidChromosome("route is not a permutation of the tasks")
    if k.min() < 1 or k.max() > rotation_max:
        raise InvalidChromosome(
            f"rotations outside [1, {rotation_max}]: {k}")
    if s.min() < 0 or int(s.sum()) != n_tasks:
        raise InvalidChromosome(
            f"splits must be nonnegative and sum to {n_tasks}: {s}")


def random_chromosome(rng: np.random.Generator, n_tasks: int,
                      n_servicers: int, rotation_max: int) -> RpsChromosome:
    """Uniform random permutation, rotations and composition split."""
    route = rng.permutation(n_tasks).astype(np.int64)
    rot = rng.integers(1, rotation_max + 1, n_tasks, dtype=np.int64)
    # stars-and-bars: cut points drawn with replacement give every
    # composition of n_tasks into n_servicers parts positive probability
    cuts = np.sort(rng.integers(0, n_tasks + 1, n_servicers - 1))
    bounds = np.concatenate(([0], cuts, [n_tasks]))
    splits = np.diff(bounds).astype(np.int64)
    return RpsChromosome(route, rot, splits)


def decode(chrom: RpsChromosome, scenario) -> List[Tuple[List[int], List[int]]]:
    """Expand gene arrays into per-servicer (task ids, rotations) routes."""
    validate(chrom, scenario.n_tasks, scenario.n_servicers,
             scenario.rotation_max)
    ids = scenario.packed().ids
    out = []
    for sl in chrom.route_slices():
        out.append(([int(ids[i]) for i in chrom.route[sl]],
                    [int(k) for k in chrom.rotations[sl]]))
    return out


def repair_uniqueness(route: np.ndarray, n_tasks: int,
                      rng: np.random.Generator) -> np.ndarray:
    """Replace duplicate task genes with the missing tasks, in place.

    First occurrences keep their positions; later duplicates are
    overwritten by a random arrangement of the absent tasks, so a
    permutation passes through unchanged.
    """
    seen = np.zeros(n_tasks, bool)
    dup_pos = []
    for i, t in enumerate(route):
        t = int(t)
        if 0 <= t < n_tasks and not seen[t]:
            seen[t] = True
        else:
            dup_pos.append(i)
    if dup_pos:
        missing = np.flatnonzero(~seen)
        route[dup_pos] = rng.permutation(missing)
    return route


def repair_rotations(rotations: np.ndarray, rotation_max: int) -> np.ndarray:
    """Clamp every rotation gene into [1, rotation_max], in place."""
    np.clip(rotations, 1, rotation_max, out=rotations)
    return rotations


def repair_splits(splits: np.ndarray, n_tasks: int,
                  rng: np.random.Generator) -> np.ndarray:
    """Restore nonnegativity and the sum-to-N invariant, in place.

    Negative entries are zeroed, then the surplus or deficit is spread
    one unit at a time over random servicers (never driving an entry
    negative), which keeps the repair unbiased across servicers.
    """
    np.maximum(splits, 0, out=splits)
    m = splits.shape[0]
    diff = n_tasks - int(splits.sum())
    while diff > 0:
        splits[rng.integers(m)] += 1
        diff -= 1
    while diff < 0:
        j = rng.integers(m)
        if splits[j] > 0:
            splits[j] -= 1
            diff += 1
    return splits


def repair(chrom: RpsChromosome, n_tasks: int, rotation_max: int,
           rng: np.random.Generator) -> RpsChromosome:
    """Full repair pipeline: uniqueness, rotation clamp, split balance."""
    repair_uniqueness(chrom.route, n_tasks, rng)
    repair_rotations(chrom.rotations, rotation_max)
    repair_splits(chrom.splits, n_tasks, rng)
    return chrom
