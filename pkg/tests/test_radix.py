import numpy as np
import pytest

from parasort.core import (
    ConfigurationError,
    ContractViolation,
    ElementWidth,
    PayloadMode,
    SortSequence,
    check_stability,
)
from parasort.radix import DigitHistogram, RadixConfig, counting_sort_pass, extract_digit, radix_sort
from parasort.rng import Distribution, DistributionSpec, generate

from .conftest import random_seq, stable_oracle


def same(a, b):
    return np.array_equal(a.keys, b.keys) and (a.values is None or np.array_equal(a.values, b.values))


class TestDigits:
    def test_examples(self):
        assert extract_digit(0xB4, 0, 4) == 0x4
        assert extract_digit(0xB4, 1, 4) == 0xB

    @pytest.mark.parametrize("r", [1, 3, 4, 8, 11, 16])
    def test_round_trip(self, r):
        keys = np.random.default_rng(r).integers(0, 2**64 - 1, 10**5, dtype=np.uint64, endpoint=True).tolist()
        d = RadixConfig(r).digit_count(64)
        for k in keys[:: 1 if r in (4, 8) else 50]:
            assert sum(extract_digit(k, i, r) << (i * r) for i in range(d)) == k

    def test_out_of_range(self):
        with pytest.raises(ContractViolation):
            extract_digit(1, 4, 8, ElementWidth.W32)
        with pytest.raises(ContractViolation):
            extract_digit(1, -1, 8)

    def test_config(self):
        assert RadixConfig().digit_count(ElementWidth.W32) == 4
        assert RadixConfig().digit_count(ElementWidth.W64) == 8
        assert RadixConfig(11).digit_count(32) == 3
        for r in (0, 17):
            with pytest.raises(ConfigurationError):
                RadixConfig(r)

    def test_histogram(self):
        keys = np.array([0x21, 0x13, 0x11, 0x2F], dtype=np.uint32)
        h = DigitHistogram.of(keys, 1, 4)
        assert h.counts[1] == 2 and h.counts[2] == 2 and h.counts.sum() == 4
        assert h.offsets[2] == 2 and h.offsets[3] == 4


class TestPass:
    @pytest.mark.parametrize("mode", ["seq", "par"])
    def test_example(self, rt4, mode):
        s = SortSequence(np.array([0x21, 0x13, 0x11], dtype=np.uint32))
        assert counting_sort_pass(s, 0, RadixConfig(4), rt4, mode).keys.tolist() == [0x21, 0x11, 0x13]

    def test_constant_digit_identity(self, rt4):
        s = SortSequence(np.array([0x15, 0x35, 0x05, 0xF5], dtype=np.uint32), np.arange(4, dtype=np.uint32))
        out = counting_sort_pass(s, 0, RadixConfig(4), rt4, "par")
        assert out.values.tolist() == [0, 1, 2, 3]

    @pytest.mark.parametrize("r", [1, 4, 8, 16])
    def test_parallel_equals_sequential(self, runtimes, r):
        s = random_seq(np.random.default_rng(r), 2**14, pairs=True)
        seq = counting_sort_pass(s, 1, RadixConfig(r))
        for rt in runtimes.values():
            assert same(counting_sort_pass(s, 1, RadixConfig(r), rt, "par"), seq)

    def test_pass_against_oracle(self):
        s = random_seq(np.random.default_rng(1), 3000, pairs=True)
        out = counting_sort_pass(s, 2, RadixConfig(8))
        order = sorted(range(s.n), key=lambda i: (int(s.keys[i]) >> 16) & 0xFF)
        assert out.values.tolist() == order


class TestRadixSort:
    @pytest.mark.parametrize("mode", ["seq", "par"])
    def test_stable_duplicates(self, rt4, mode):
        s = random_seq(np.random.default_rng(2), 2**14, pairs=True, distinct=16)
        out = radix_sort(s, rt4, mode).sequence
        assert check_stability(s, out)

    def test_sorted_input_unchanged(self, rt4):
        s = generate(DistributionSpec(Distribution.SORTED, seed=2), 5000, payload=PayloadMode.KEY_VALUE)
        out = radix_sort(s, rt4, "par").sequence
        assert same(out, s)

    @pytest.mark.parametrize("dist", list(Distribution))
    def test_64bit_2_17(self, rt4, dist):
        s = generate(DistributionSpec(dist, seed=6), 2**17, ElementWidth.W64, PayloadMode.KEY_VALUE)
        ref = stable_oracle(s)
        for mode in ("seq", "par"):
            assert same(radix_sort(s, rt4, mode).sequence, ref)

    def test_lsd_invariant_per_pass(self, rt4):
        s = random_seq(np.random.default_rng(3), 20_000, ElementWidth.W64)
        r = 8
        seen = []

        def hook(i, keys, vals):
            low = keys & np.uint64((1 << ((i + 1) * r)) - 1) if (i + 1) * r < 64 else keys
            assert (low[:-1] <= low[1:]).all()
            seen.append(i)

        out = radix_sort(s, rt4, "par", RadixConfig(r), pass_hook=hook)
        assert seen == list(range(8)) and out.partition_pass_count == 8

    def test_digit_width_does_not_change_output(self, rt4):
        s = random_seq(np.random.default_rng(4), 10_000, pairs=True, distinct=300)
        outs = [radix_sort(s, rt4, "par", RadixConfig(r)) for r in (4, 8, 16)]
        assert [o.partition_pass_count for o in outs] == [8, 4, 2]
        assert all(same(o.sequence, outs[0].sequence) for o in outs)

    def test_inplace_result_lands_in_input(self, rt4):
        s = random_seq(np.random.default_rng(5), 1000, pairs=True)
        ref = stable_oracle(s)
        out = radix_sort(s, rt4, "par", RadixConfig(11), inplace=True)  # 3 passes: odd count
        assert out.sequence.keys is s.keys and same(s, ref)
