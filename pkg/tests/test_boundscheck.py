"""Every kernel under numba's bounds checking, in a fresh process and cache.

Bounds checking is a compile-time switch, so it needs its own interpreter
and a private cache directory (the shared cache holds unchecked builds).
"""

import os
import subprocess
import sys
import textwrap

import pytest

SCRIPT = textwrap.dedent(
    """
    import numpy as np
    from parasort import ALGORITHMS, Runtime, SortSequence, reference_sort, multiset_equal
    from parasort.algorithms import SortOptions
    rng = np.random.default_rng(0)
    opts = [SortOptions(), SortOptions(fusion=3, radix_bits=11, tile=16, rank_stride=4, buckets=4, oversample=2, small_threshold=8, pivot="median3")]
    with Runtime(workers=3, chunk_size=64) as rt:
        for dt in (np.uint32, np.uint64):
            for n in (0, 1, 2, 3, 5, 17, 100, 257, 1000, 1500):
                for pairs in (False, True):
                    keys = rng.integers(0, 20 if n % 2 else np.iinfo(dt).max, size=n, dtype=dt)
                    s = SortSequence(keys, np.arange(n, dtype=dt) if pairs else None)
                    ref = reference_sort(s)
                    for name, algo in ALGORITHMS.items():
                        for mode in ("seq", "par"):
                            for o in opts:
                                out = algo(s, rt, mode, o).sequence
                                assert np.array_equal(out.keys, ref.keys), (name, mode, n)
                                assert multiset_equal(out, s), (name, mode, n)
    print("checked")
    """
)


@pytest.mark.slow
def test_all_kernels_in_bounds(tmp_path):
    env = dict(os.environ, NUMBA_BOUNDSCHECK="1", NUMBA_CACHE_DIR=str(tmp_path / "numba-cache"))
    r = subprocess.run([sys.executable, "-c", SCRIPT], env=env, capture_output=True, text=True, timeout=1800)
    assert r.returncode == 0, r.stderr[-4000:]
    assert r.stdout.strip().endswith("checked")
