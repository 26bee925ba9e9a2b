"""Certifying the bitonic network and watching multistep fusion shorten it.

A comparator network sorts every input if and only if it sorts every 0-1
input, so small networks can be checked exhaustively.

Run: python3 demos/03_bitonic_networks.py
"""

import itertools

import numpy as np

from parasort import SortSequence, bitonic_sort_par, comparator_schedule, find_q, multistep_bitonic_sort, multistep_plan, Runtime

for n in (2, 4, 8, 16):
    steps = comparator_schedule(n)
    rows = np.array(list(itertools.product((0, 1), repeat=n)), dtype=np.uint8)
    for pairs in steps:
        i, j = pairs[:, 0], pairs[:, 1]
        lo = np.minimum(rows[:, i], rows[:, j])
        rows[:, j] = np.maximum(rows[:, i], rows[:, j])
        rows[:, i] = lo
    ok = (np.diff(rows.astype(int), axis=1) >= 0).all()
    count = sum(len(s) for s in steps)
    print(f"n={n:<3} {len(steps):>2} steps, {count:>3} comparators, all {2**n} 0-1 inputs sorted: {ok}")

print("\nFusing M consecutive steps into one pass over memory:")
for m in range(1, 6):
    plan = multistep_plan(1 << 20, m)
    print(f"  M={m}: {len(plan.schedule):>3} phases for 2^20 keys")

rng = np.random.default_rng(3)
data = SortSequence(rng.integers(0, 2**32, 5000, dtype=np.uint32), np.arange(5000, dtype=np.uint32))
with Runtime(workers=4) as rt:
    a = bitonic_sort_par(data, rt)
    b = multistep_bitonic_sort(data, rt, 4)
print(f"\nn=5000 (padded to 8192): plain {a.phase_count} phases, fused {b.phase_count}; identical output:",
      np.array_equal(a.sequence.keys, b.sequence.keys) and np.array_equal(a.sequence.values, b.sequence.values))

# The adaptive variant merges a bitonic sequence by locating one split point q.
half1 = np.array([1, 4, 6, 9], dtype=np.uint32)
half2 = np.array([8, 5, 3, 2], dtype=np.uint32)
q = find_q(half1, half2)
print(f"\nfind_q on {half1.tolist()} | {half2.tolist()}: q={q.q}, exchange the {'suffix' if q.suffix else 'prefix'}")
