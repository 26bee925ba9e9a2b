import itertools
import os
import subprocess
import sys

import numpy as np
import pytest

from parasort.core import ContractViolation, SortSequence
from parasort.runtime import (
    Phase,
    Runtime,
    exclusive_scan,
    reduce_min_max,
    resolve_workers,
    run_phases,
    split_by_bit,
)


class TestRunPhases:
    def test_empty_plan(self, rt4):
        before = rt4.phases_run
        run_phases([], rt4)
        assert rt4.phases_run == before

    def test_every_index_once(self, rt4):
        hits = np.zeros(10_000, dtype=np.int64)

        def body(lo, hi):
            hits[lo:hi] += 1

        rt4.run(hits.shape[0], body, chunk=37)
        assert (hits == 1).all()

    def test_barrier_litmus(self):
        # phase 2 reads what phase 1 wrote at a different index
        with Runtime(workers=8, chunk_size=1) as rt:
            n = 512
            a = np.zeros(n, dtype=np.int64)
            b = np.zeros(n, dtype=np.int64)

            def p1(lo, hi):
                for i in range(lo, hi):
                    a[i] = i + 1

            def p2(lo, hi):
                for i in range(lo, hi):
                    b[i] = a[(i * 7 + 3) % n]

            for _ in range(20):
                a[:] = 0
                rt.run_phases([Phase(n, p1), Phase(n, p2)])
                assert np.array_equal(b, (np.arange(n) * 7 + 3) % n + 1)

    def test_failure_propagates_after_quiesce(self):
        done = []

        def body(lo, hi):
            if lo == 3:
                raise RuntimeError("boom")
            done.append(lo)

        with Runtime(workers=4) as rt:
            with pytest.raises(RuntimeError, match="boom"):
                rt.run(8, body, chunk=1)
            # the pool is still usable afterwards
            out = np.zeros(4)
            rt.run(4, lambda lo, hi: out.__setitem__(slice(lo, hi), 1), chunk=1)
            assert out.sum() == 4
        assert sorted(done) == [0, 1, 2, 4, 5, 6, 7]

    def test_resolve_workers(self, monkeypatch):
        monkeypatch.setenv("PARASORT_WORKERS", "3")
        assert resolve_workers() == 3
        assert resolve_workers(5) == 5
        monkeypatch.setenv("PARASORT_WORKERS", "x")
        with pytest.raises(ValueError):
            resolve_workers()
        with pytest.raises(ValueError):
            resolve_workers(0)

    def test_interpreter_exits_with_live_pool(self):
        code = "from parasort.runtime import Runtime\nrt = Runtime(workers=4)\nrt.run(100, lambda a, b: None, chunk=1)\nprint('ok')"
        r = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, timeout=120)
        assert r.returncode == 0 and r.stdout.strip() == "ok"


class TestReduceMinMax:
    def test_examples(self, rt4):
        for arr, exp in (([5, 2, 9], (2, 9)), ([7, 7, 7], (7, 7))):
            assert reduce_min_max(np.array(arr, dtype=np.uint32), rt4) == exp

    def test_empty(self):
        with pytest.raises(ContractViolation):
            reduce_min_max(np.array([], dtype=np.uint32))

    def test_against_fold(self, rt4):
        rng = np.random.default_rng(4)
        for _ in range(1000):
            n = int(rng.integers(1, 4097))
            dt = np.uint32 if rng.integers(2) else np.uint64
            a = rng.integers(0, np.iinfo(dt).max, size=n, dtype=dt, endpoint=True)
            lo = hi = int(a[0])
            for x in a.tolist():
                lo, hi = min(lo, x), max(hi, x)
            assert reduce_min_max(a, rt4) == (lo, hi)

    def test_million(self, rt4):
        a = np.random.default_rng(5).integers(0, 2**32, size=10**6, dtype=np.uint64).astype(np.uint32)
        assert reduce_min_max(a, rt4) == (int(a.min()), int(a.max()))


class TestExclusiveScan:
    def test_examples(self, rt4):
        assert exclusive_scan(np.array([3, 1, 7, 0], dtype=np.uint32), rt4).tolist() == [0, 3, 4, 11]
        assert exclusive_scan(np.array([], dtype=np.uint64), rt4).tolist() == []

    def test_against_sequential(self, rt4):
        c = np.random.default_rng(6).integers(0, 1000, size=4096, dtype=np.uint64)
        out = exclusive_scan(c, rt4)
        expected = list(itertools.accumulate([0] + c.tolist()[:-1]))
        assert out.tolist() == expected
        assert np.array_equal(np.diff(out.astype(np.int64)), c[:-1].astype(np.int64))

    def test_overflow(self, rt4):
        with pytest.raises(OverflowError):
            exclusive_scan(np.array([2**31, 2**31, 1], dtype=np.uint32), rt4)
        big = np.full(600, 2**32 - 1, dtype=np.uint32)  # overflow only across chunk totals
        with pytest.raises(OverflowError):
            exclusive_scan(big, rt4)

    def test_signed_rejected(self):
        with pytest.raises(ContractViolation):
            exclusive_scan(np.array([1, 2], dtype=np.int64))


class TestSplitByBit:
    def test_example(self, rt4):
        s = SortSequence(np.array([5, 2, 9, 4], dtype=np.uint32))
        assert split_by_bit(s, 0, rt4).keys.tolist() == [2, 4, 5, 9]

    def test_all_false_is_identity(self, rt4):
        s = SortSequence(np.array([8, 2, 6, 4], dtype=np.uint32), np.arange(4, dtype=np.uint32))
        out = split_by_bit(s, 0, rt4)
        assert out.keys.tolist() == [8, 2, 6, 4] and out.values.tolist() == [0, 1, 2, 3]

    @pytest.mark.parametrize("bit", [0, 5, 31])
    def test_against_two_pass_partition(self, rt4, bit):
        rng = np.random.default_rng(bit)
        k = rng.integers(0, 2**32, size=5000, dtype=np.uint64).astype(np.uint32)
        s = SortSequence(k, np.arange(5000, dtype=np.uint32))
        out = split_by_bit(s, bit, rt4)
        zeros = [i for i in range(5000) if not (int(k[i]) >> bit) & 1]
        ones = [i for i in range(5000) if (int(k[i]) >> bit) & 1]
        assert out.values.tolist() == zeros + ones
        assert out.keys.tolist() == [int(k[i]) for i in zeros + ones]

    def test_bit_range(self):
        with pytest.raises(ContractViolation):
            split_by_bit(SortSequence(np.array([1], dtype=np.uint32)), 32)


def test_primitives_independent_of_workers(runtimes):
    rng = np.random.default_rng(9)
    k = rng.integers(0, 2**64 - 1, size=20_000, dtype=np.uint64, endpoint=True)
    c = rng.integers(0, 100, size=20_000, dtype=np.uint64)
    s = SortSequence(k, np.arange(k.shape[0], dtype=np.uint64))
    ref = None
    for w, rt in runtimes.items():
        got = (reduce_min_max(k, rt), exclusive_scan(c, rt).tolist(), split_by_bit(s, 17, rt).values.tolist())
        ref = ref or got
        assert got == ref, f"workers={w}"
