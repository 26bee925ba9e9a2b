import math

import numpy as np
import pytest

from parasort.bitonic import (
    MAX_FUSION,
    bitonic_sort_par,
    bitonic_sort_seq,
    comparator_schedule,
    multistep_bitonic_sort,
    multistep_plan,
    next_pow2,
    step_masks,
)
from parasort.core import ConfigurationError, SortSequence, multiset_equal, reference_sort, verify_sorted

from .conftest import random_seq


def all_binary(n: int) -> np.ndarray:
    codes = np.arange(1 << n, dtype=np.uint32)
    return ((codes[:, None] >> np.arange(n, dtype=np.uint32)) & 1).astype(np.uint8)


def simulate(schedule, rows: np.ndarray) -> np.ndarray:
    """Apply the comparator list to every row at once (min to i, max to j)."""
    rows = rows.copy()
    for step in schedule:
        if step.shape[0] == 0:
            continue
        i, j = step[:, 0], step[:, 1]
        a, b = rows[:, i], rows[:, j]
        rows[:, i], rows[:, j] = np.minimum(a, b), np.maximum(a, b)
    return rows


class TestNetwork:
    @pytest.mark.parametrize("n", [2, 4, 8, 16])
    def test_zero_one_principle(self, n):
        out = simulate(comparator_schedule(n), all_binary(n))
        assert (np.diff(out.astype(np.int8), axis=1) >= 0).all()

    @pytest.mark.parametrize("n", [3, 5, 6, 7, 11, 12])
    def test_zero_one_non_power_of_two(self, n):
        out = simulate(comparator_schedule(n), all_binary(n))
        assert (np.diff(out.astype(np.int8), axis=1) >= 0).all()

    @pytest.mark.parametrize("k", range(0, 11))
    def test_comparator_count(self, k):
        N = 1 << k
        expected = N * k * (k + 1) // 4
        assert sum(s.shape[0] for s in comparator_schedule(N)) == expected
        keys = np.random.default_rng(k).integers(0, 1000, N).astype(np.uint32)
        assert bitonic_sort_seq(SortSequence(keys)).comparator_count == expected

    def test_n8_has_24_comparators(self):
        assert bitonic_sort_seq(SortSequence(np.arange(8, dtype=np.uint32)[::-1].copy())).comparator_count == 24

    def test_steps_are_disjoint_and_in_range(self):
        for n in (13, 64, 100):
            for step in comparator_schedule(n):
                flat = step.ravel()
                assert len(set(flat.tolist())) == flat.shape[0]
                assert (step[:, 0] < step[:, 1]).all() and (step[:, 1] < n).all()

    def test_kernel_runs_the_published_schedule(self):
        rng = np.random.default_rng(0)
        for n in (5, 16, 37, 128):
            keys = rng.integers(0, 50, n).astype(np.uint32)
            sim = simulate(comparator_schedule(n), keys[None, :])[0]
            assert np.array_equal(bitonic_sort_seq(SortSequence(keys)).sequence.keys, sim)

    def test_step_masks(self):
        assert step_masks(8) == [1, 3, 1, 7, 2, 1]
        assert next_pow2(1) == 1 and next_pow2(5) == 8 and next_pow2(8) == 8


class TestSorts:
    @pytest.mark.parametrize("n", [0, 1, 2, 3, 10, 255, 1000, 1024, 3000])
    def test_seq_and_par(self, rt4, n):
        s = random_seq(np.random.default_rng(n), n, pairs=True, distinct=50)
        a = bitonic_sort_seq(s).sequence
        b = bitonic_sort_par(s, rt4).sequence
        assert verify_sorted(a) and multiset_equal(a, s)
        assert np.array_equal(a.keys, reference_sort(s).keys)
        assert np.array_equal(a.keys, b.keys) and np.array_equal(a.values, b.values)

    def test_input_untouched(self, rt4):
        s = random_seq(np.random.default_rng(1), 100)
        before = s.keys.copy()
        bitonic_sort_par(s, rt4)
        assert np.array_equal(before, s.keys)


class TestMultistep:
    def test_plan_shape(self):
        plan = multistep_plan(1024, 3)
        assert len(plan.schedule) == sum(math.ceil(p / 3) for p in range(1, 11))
        assert len(multistep_plan(1024, 1).schedule) == 55
        assert plan.padded == 1024 and multistep_plan(1000, 3).padded == 1024

    @pytest.mark.parametrize("m", [0, MAX_FUSION + 1])
    def test_bad_fusion(self, m):
        with pytest.raises(ConfigurationError):
            multistep_plan(64, m)

    def test_flattened_schedule_equals_unfused(self):
        for n in (64, 1000):
            fused = [m for ph in multistep_plan(n, 4).schedule for m in ph.masks]
            assert fused == step_masks(n)

    @pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
    def test_equals_single_step(self, rt4, m):
        rng = np.random.default_rng(m)
        for n in (2, 7, 100, 1024, 1500):
            s = random_seq(rng, n, pairs=True, distinct=30)
            a = bitonic_sort_par(s, rt4)
            b = multistep_bitonic_sort(s, rt4, m)
            assert np.array_equal(a.sequence.keys, b.sequence.keys)
            assert np.array_equal(a.sequence.values, b.sequence.values)
            assert a.comparator_count == b.comparator_count
            if m > 1 and n > 2:
                assert b.phase_count < a.phase_count
