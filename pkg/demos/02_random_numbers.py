"""The Mersenne Twister generators behind every benchmark input.

Run: python3 demos/02_random_numbers.py
"""

import numpy as np

from parasort import MT19937, MT19937_64, Distribution, DistributionSpec, ElementWidth, generate

# Default seed 5489: these draws are the published reference values.
g32 = MT19937(5489)
first = g32.random_raw(10000)
print("MT19937    draw 1      :", first[0])
print("MT19937    draw 10000  :", first[-1])
print("MT19937-64 draw 10000  :", MT19937_64(5489).random_raw(10000)[-1])

# Same seed, same stream; the generator is a plain state machine.
again = MT19937(5489)
assert [again.next() for _ in range(5)] == first[:5].tolist()

print("\nHow the six input shapes look (16 keys, 32-bit, seed 7):")
for dist in Distribution:
    keys = generate(DistributionSpec(dist, seed=7), 16, ElementWidth.W32).keys
    print(f"  {dist.value:<12}", " ".join(f"{k >> 28:x}" for k in keys), " (top hex digit)")

# The gaussian shape is the floor of the mean of 4 uniform draws: a bell curve.
g = generate(DistributionSpec(Distribution.GAUSSIAN), 200_000).keys.astype(np.float64) / 2**32
hist, _ = np.histogram(g, bins=10, range=(0, 1))
print("\ngaussian histogram (10 bins):")
for i, c in enumerate(hist):
    print(f"  {i / 10:.1f} {'#' * int(60 * c / hist.max())}")
