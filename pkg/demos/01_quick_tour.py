"""A first look: generate inputs, sort them every way, and check the results.

Run: python3 demos/01_quick_tour.py
"""

import time

from parasort import ALGORITHMS, Distribution, DistributionSpec, ElementWidth, Mode, PayloadMode, Runtime
from parasort import generate, multiset_equal, verify_sorted

n = 1 << 18
print(f"Sorting {n} 32-bit key/value pairs drawn from each input distribution.\n")

with Runtime(workers=4) as rt:
    print(f"{'algorithm':<24}{'distribution':<14}{'seq ms':>9}{'par ms':>9}  ok")
    for dist in (Distribution.UNIFORM, Distribution.GAUSSIAN, Distribution.ZERO, Distribution.SORTED_DESC):
        data = generate(DistributionSpec(dist, seed=42), n, ElementWidth.W32, PayloadMode.KEY_VALUE)
        for algo in ALGORITHMS.values():
            times, ok = [], True
            for mode in Mode:
                algo(data, rt, mode)  # first call loads compiled kernels
                t = time.perf_counter()
                out = algo(data, rt, mode)
                times.append((time.perf_counter() - t) * 1e3)
                ok &= verify_sorted(out.sequence) and multiset_equal(data, out.sequence)
            print(f"{algo.legend:<24}{dist.value:<14}{times[0]:>9.1f}{times[1]:>9.1f}  {'yes' if ok else 'NO'}")
        print()

# Each call returns an outcome with counters besides the sorted sequence.
data = generate(DistributionSpec(Distribution.ZERO), n)
out = ALGORITHMS["quick"](data)
print(f"Quicksort on all-zero keys: {out.partition_pass_count} partition passes (min == max ends it at once).")
out = ALGORITHMS["bitonic"](generate(DistributionSpec(Distribution.UNIFORM), 1024))
print(f"Bitonic network on 1024 keys: {out.comparator_count} compare-exchanges (1024 * 10 * 11 / 4).")
