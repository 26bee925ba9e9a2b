import numpy as np
import pytest

from parasort.adaptive import (
    adaptive_bitonic_merge,
    bitonic_tiebreak,
    build_bitonic_tree,
    find_q,
    ibr_sort,
    rearrange,
    tree_to_array,
)
from parasort.core import ContractViolation, SortSequence, multiset_equal, reference_sort

from .conftest import random_seq


def random_bitonic(rng, n: int, key_range: int) -> np.ndarray:
    """Ascending run then descending run, rotated by a random amount."""
    cut = int(rng.integers(0, n + 1))
    up = np.sort(rng.integers(0, key_range, cut))
    down = np.sort(rng.integers(0, key_range, n - cut))[::-1]
    return np.roll(np.concatenate([up, down]), int(rng.integers(0, n))).astype(np.uint32)


def cyclic_changes(bits) -> int:
    return sum(bits[i] != bits[i - 1] for i in range(len(bits)))


def is_cyclic_bitonic(x) -> bool:
    steps = np.sign(np.diff(np.r_[x, x[:1]].astype(np.int64)))
    return cyclic_changes(steps[steps != 0].tolist()) <= 2


def brute_force_shifts(a, b, ta, tb):
    """Every (q, suffix) whose exchange produces the half-cleaner result."""
    pa = list(zip(a.tolist(), ta.tolist()))
    pb = list(zip(b.tolist(), tb.tolist()))
    lo = [min(x, y) for x, y in zip(pa, pb)]
    hi = [max(x, y) for x, y in zip(pa, pb)]
    m = len(pa)
    valid = set()
    for suffix in (False, True):
        for q in range(m + 1):
            sl = slice(q, None) if suffix else slice(0, q)
            na, nb = pa[:], pb[:]
            na[sl], nb[sl] = pb[sl], pa[sl]
            if na == lo and nb == hi:
                valid.add((q, suffix))
    return valid


class TestFindQ:
    def test_examples(self):
        assert tuple(find_q([1, 3, 5, 7], [6, 4, 2, 0])) == (2, True)
        assert find_q([0, 1, 2, 3], [7, 6, 5, 4]).q == 0
        assert find_q([5, 5, 5, 5], [5, 5, 5, 5]).q == 0

    @pytest.mark.parametrize("n", [16, 32])
    def test_against_brute_force(self, n):
        rng = np.random.default_rng(n)
        m = n // 2
        for trial in range(1000):
            keys = random_bitonic(rng, n, 8 if trial % 2 else 2**32)
            tb = bitonic_tiebreak(keys)
            assert tb is not None
            shift = find_q(keys[:m], keys[m:], tb)
            valid = brute_force_shifts(keys[:m], keys[m:], tb[:m], tb[m:])
            assert (shift.q, shift.suffix) in valid
            # smallest valid boundary of its kind
            assert shift.q == min(q for q, s in valid if s == shift.suffix)
            x, y = rearrange(keys[:m], keys[m:], shift)
            assert x.max() <= y.min()
            assert is_cyclic_bitonic(x) and is_cyclic_bitonic(y)

    def test_rejects_non_bitonic(self):
        with pytest.raises(ContractViolation):
            find_q([1, 5, 2, 6], [3, 7, 4, 8])
        with pytest.raises(ContractViolation):
            find_q([1, 2], [3])


class TestMerge:
    def test_all_zero_one_bitonic_length_16(self):
        n = 16
        checked = 0
        for code in range(1 << n):
            bits = [(code >> i) & 1 for i in range(n)]
            if cyclic_changes(bits) > 2:
                continue
            keys = np.array(bits, dtype=np.uint32)
            tree = build_bitonic_tree(SortSequence(keys))
            adaptive_bitonic_merge(tree)
            out = tree_to_array(tree).keys
            assert out.tolist() == sorted(bits), bits
            checked += 1
        assert checked == 2 + n * (n - 1)  # constants plus one 1-run per (start, length)

    def test_descending_and_values(self):
        rng = np.random.default_rng(3)
        for n in (2, 8, 64, 256):
            keys = random_bitonic(rng, n, 20)
            s = SortSequence(keys, np.arange(n, dtype=np.uint32))
            tree = build_bitonic_tree(s)
            adaptive_bitonic_merge(tree, descending=True)
            out = tree_to_array(tree)
            assert out.keys.tolist() == sorted(keys.tolist(), reverse=True)
            assert multiset_equal(out, s)

    def test_touch_count_is_logarithmic(self):
        per_merge = []
        for k in range(4, 14):
            s = random_seq(np.random.default_rng(k), 1 << k)
            t = ibr_sort(s).stats["touch_per_merge_step"]
            per_merge.append(t[k][0])
            assert t[k][0] == 2 * k  # one root-to-leaf walk per half: 2 log2 n
        diffs = np.diff(per_merge)
        assert (diffs == diffs[0]).all()  # additive per doubling, not multiplicative

    def test_tree_needs_power_of_two(self):
        with pytest.raises(ContractViolation):
            build_bitonic_tree(SortSequence(np.arange(6, dtype=np.uint32)))


class TestIbrSort:
    @pytest.mark.parametrize("n", [0, 1, 2, 3, 5, 64, 100, 1023, 1025, 4096])
    def test_sorts(self, rt4, n):
        s = random_seq(np.random.default_rng(n), n, pairs=True, distinct=max(1, n // 4))
        ref = reference_sort(s)
        for mode in ("seq", "par"):
            out = ibr_sort(s, rt4, mode).sequence
            assert np.array_equal(out.keys, ref.keys)
            assert multiset_equal(out, s)

    def test_modes_agree_on_values(self, rt4):
        s = random_seq(np.random.default_rng(7), 3000, pairs=True, distinct=10)
        a = ibr_sort(s, rt4, "seq").sequence
        b = ibr_sort(s, rt4, "par").sequence
        assert np.array_equal(a.values, b.values)
