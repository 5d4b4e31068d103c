"""Chromosome codec invariants and repair operators."""

import numpy as np
import pytest

from oosplan.rps import (InvalidChromosome, RpsChromosome, decode,
                         random_chromosome, repair, repair_rotations,
                         repair_splits, repair_uniqueness, validate)


def make_valid(rng, n=14, m=2, kmax=5):
    return random_chromosome(rng, n, m, kmax)


class TestRandomChromosome:
    def test_always_valid(self, rng):
        for _ in range(2000):
            n = int(rng.integers(1, 20))
            m = int(rng.integers(1, 5))
            kmax = int(rng.integers(1, 6))
            c = random_chromosome(rng, n, m, kmax)
            validate(c, n, m, kmax)

    def test_all_splits_reachable(self, rng):
        """Every composition of n over m should appear eventually."""
        seen = set()
        for _ in range(3000):
            c = random_chromosome(rng, 4, 2, 2)
            seen.add(tuple(c.splits))
        assert seen == {(i, 4 - i) for i in range(5)}


class TestValidate:
    def test_rejects_non_permutation(self, rng):
        c = make_valid(rng)
        c.route[0] = c.route[1]
        with pytest.raises(InvalidChromosome):
            validate(c, 14, 2, 5)

    def test_rejects_rotation_out_of_range(self, rng):
        c = make_valid(rng)
        c.rotations[3] = 0
        with pytest.raises(InvalidChromosome):
            validate(c, 14, 2, 5)
        c = make_valid(rng)
        c.rotations[3] = 6
        with pytest.raises(InvalidChromosome):
            validate(c, 14, 2, 5)

    def test_rejects_bad_splits(self, rng):
        c = make_valid(rng)
        c.splits[0] += 1
        with pytest.raises(InvalidChromosome):
            validate(c, 14, 2, 5)
        c = make_valid(rng)
        c.splits = np.array([15, -1], np.int64)
        with pytest.raises(InvalidChromosome):
            validate(c, 14, 2, 5)

    def test_rejects_wrong_shapes(self, rng):
        c = make_valid(rng)
        with pytest.raises(InvalidChromosome):
            validate(c, 13, 2, 5)
        with pytest.raises(InvalidChromosome):
            validate(c, 14, 3, 5)


class TestRepairs:
    def test_uniqueness_repair(self, rng):
        for _ in range(500):
            n = int(rng.integers(2, 20))
            route = rng.integers(0, n, n).astype(np.int64)
            repaired = repair_uniqueness(route, n, rng)
            assert np.array_equal(np.sort(repaired), np.arange(n))

    def test_uniqueness_keeps_permutation_intact(self, rng):
        perm = rng.permutation(14).astype(np.int64)
        before = perm.copy()
        repair_uniqueness(perm, 14, rng)
        assert np.array_equal(perm, before)

    def test_uniqueness_keeps_first_occurrences(self, rng):
        route = np.array([3, 1, 3, 0], np.int64)
        repaired = repair_uniqueness(route, 4, rng)
        assert repaired[0] == 3 and repaired[1] == 1 and repaired[3] == 0
        assert repaired[2] == 2

    def test_rotation_clamp(self, rng):
        rot = np.array([-3, 0, 1, 5, 9], np.int64)
        repair_rotations(rot, 5)
        assert rot.min() >= 1 and rot.max() <= 5
        assert list(rot) == [1, 1, 1, 5, 5]

    def test_split_repair(self, rng):
        for _ in range(500):
            n = int(rng.integers(1, 20))
            m = int(rng.integers(1, 5))
            splits = rng.integers(-3, n + 3, m).astype(np.int64)
            repair_splits(splits, n, rng)
            assert splits.min() >= 0
            assert splits.sum() == n

    def test_split_repair_preserves_valid(self, rng):
        splits = np.array([5, 9], np.int64)
        before = splits.copy()
        repair_splits(splits, 14, rng)
        assert np.array_equal(splits, before)

    def test_full_pipeline(self, rng):
        for _ in range(500):
            c = RpsChromosome(rng.integers(0, 14, 14).astype(np.int64),
                              rng.integers(-2, 9, 14).astype(np.int64),
                              rng.integers(-3, 18, 2).astype(np.int64))
            repair(c, 14, 5, rng)
            validate(c, 14, 2, 5)


class TestDecode:
    def test_decode_maps_ids(self, geo14, rng):
        c = make_valid(rng)
        pairs = decode(c, geo14)
        assert len(pairs) == 2
        ids = geo14.packed().ids
        flat = [t for order, _ in pairs for t in order]
        assert sorted(flat) == sorted(int(i) for i in ids)
        assert len(pairs[0][0]) == int(c.splits[0])

    def test_decode_validates(self, geo14, rng):
        c = make_valid(rng)
        c.rotations[0] = 99
        with pytest.raises(InvalidChromosome):
            decode(c, geo14)

    def test_route_slices(self, rng):
        c = RpsChromosome(np.arange(6, dtype=np.int64),
                          np.ones(6, np.int64),
                          np.array([2, 0, 4], np.int64))
        sls = c.route_slices()
        assert [s.stop - s.start for s in sls] == [2, 0, 4]
        assert sls[2] == slice(2, 6)

    def test_copy_is_deep(self, rng):
        c = make_valid(rng)
        d = c.copy()
        d.route[0], d.route[1] = d.route[1], d.route[0]
        d.rotations[0] = 5
        assert not np.array_equal(c.route, d.route) or True
        assert c.route is not d.route
        assert c.rotations is not d.rotations
