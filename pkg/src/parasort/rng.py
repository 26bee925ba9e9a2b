"""Mersenne Twister generators and the six benchmark input distributions."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .core import ElementWidth, PayloadMode, SortSequence

_M32 = 0xFFFFFFFF
_M64 = 0xFFFFFFFFFFFFFFFF


class MT19937:
    """32-bit Mersenne Twister (Matsumoto & Nishimura reference recurrence)."""

    N = 624
    M = 397
    MATRIX_A = np.uint32(0x9908B0DF)
    UPPER = np.uint32(0x80000000)
    LOWER = np.uint32(0x7FFFFFFF)
    dtype = np.uint32

    def __init__(self, seed: int = 5489):
        self.state = np.zeros(self.N, dtype=self.dtype)
        self.index = self.N
        self.seed(seed)

    def seed(self, seed: int) -> None:
        if not 0 <= seed <= _M32:
            words = []
            while seed:
                words.append(seed & _M32)
                seed >>= 32
            self.seed_by_array(words)
            return
        mt = [0] * self.N
        mt[0] = seed
        for i in range(1, self.N):
            mt[i] = (1812433253 * (mt[i - 1] ^ (mt[i - 1] >> 30)) + i) & _M32
        self.state[:] = mt
        self.index = self.N

    def seed_by_array(self, key) -> None:
        self.seed(19650218)
        mt = [int(x) for x in self.state]
        n, klen = self.N, max(len(key), 1)
        key = list(key) or [0]
        i, j = 1, 0
        for _ in range(max(n, klen)):
            mt[i] = ((mt[i] ^ ((mt[i - 1] ^ (mt[i - 1] >> 30)) * 1664525)) + key[j] + j) & _M32
            i += 1
            j += 1
            if i >= n:
                mt[0] = mt[n - 1]
                i = 1
            if j >= klen:
                j = 0
        for _ in range(n - 1):
            mt[i] = ((mt[i] ^ ((mt[i - 1] ^ (mt[i - 1] >> 30)) * 1566083941)) - i) & _M32
            i += 1
            if i >= n:
                mt[0] = mt[n - 1]
                i = 1
        mt[0] = 0x80000000
        self.state[:] = mt
        self.index = self.N

    def _twist(self) -> None:
        # Three slices so every read sees the same (old or new) word the
        # element-by-element recurrence would.
        mt, n, m = self.state, self.N, self.M
        for lo in range(0, n - 1, n - m):
            hi = min(lo + n - m, n - 1)
            src = np.arange(lo, hi)
            y = (mt[src] & self.UPPER) | (mt[src + 1] & self.LOWER)
            mt[lo:hi] = mt[(src + m) % n] ^ (y >> 1) ^ np.where(y & 1, self.MATRIX_A, 0).astype(self.dtype)
        y = (mt[n - 1] & self.UPPER) | (mt[0] & self.LOWER)
        mt[n - 1] = mt[m - 1] ^ (y >> 1) ^ (self.MATRIX_A if y & 1 else self.dtype(0))
        self.index = 0

    @staticmethod
    def temper(y: np.ndarray) -> np.ndarray:
        y = y ^ (y >> np.uint32(11))
        y = y ^ ((y << np.uint32(7)) & np.uint32(0x9D2C5680))
        y = y ^ ((y << np.uint32(15)) & np.uint32(0xEFC60000))
        return y ^ (y >> np.uint32(18))

    def random_raw(self, size: int) -> np.ndarray:
        out = np.empty(size, dtype=self.dtype)
        filled = 0
        while filled < size:
            if self.index >= self.N:
                self._twist()
            take = min(size - filled, self.N - self.index)
            out[filled : filled + take] = self.state[self.index : self.index + take]
            self.index += take
            filled += take
        return self.temper(out)

    def next(self) -> int:
        return int(self.random_raw(1)[0])


class MT19937_64(MT19937):
    """64-bit Mersenne Twister (MT19937-64)."""

    N = 312
    M = 156
    MATRIX_A = np.uint64(0xB5026F5AA96619E9)
    UPPER = np.uint64(0xFFFFFFFF80000000)
    LOWER = np.uint64(0x7FFFFFFF)
    dtype = np.uint64

    def seed(self, seed: int) -> None:
        seed &= _M64
        mt = [0] * self.N
        mt[0] = seed
        for i in range(1, self.N):
            mt[i] = (6364136223846793005 * (mt[i - 1] ^ (mt[i - 1] >> 62)) + i) & _M64
        self.state[:] = mt
        self.index = self.N

    def seed_by_array(self, key) -> None:
        raise NotImplementedError("MT19937-64 takes a single 64-bit seed")

    @staticmethod
    def temper(y: np.ndarray) -> np.ndarray:
        u = np.uint64
        y = y ^ ((y >> u(29)) & u(0x5555555555555555))
        y = y ^ ((y << u(17)) & u(0x71D67FFFEDA60000))
        y = y ^ ((y << u(37)) & u(0xFFF7EEE000000000))
        return y ^ (y >> u(43))


def mt_seed(seed: int, width: ElementWidth = ElementWidth.W32) -> MT19937:
    return MT19937(seed) if width is ElementWidth.W32 else MT19937_64(seed)


def mt_next(state: MT19937) -> int:
    return state.next()


class Distribution(enum.Enum):
    UNIFORM = "uniform"
    GAUSSIAN = "gaussian"
    ZERO = "zero"
    BUCKET = "bucket"
    SORTED = "sorted"
    SORTED_DESC = "sorted_desc"


@dataclass(frozen=True)
class DistributionSpec:
    kind: Distribution
    seed: int = 5489
    bucket_count: int = 16
    gaussian_samples: int = 4

    def __post_init__(self):
        if self.kind is Distribution.BUCKET and self.bucket_count < 2:
            raise ValueError("bucket_count must be at least 2")
        if self.kind is Distribution.GAUSSIAN and self.gaussian_samples < 2:
            raise ValueError("gaussian_samples must be at least 2")


def _mean_floor(draws: np.ndarray, g: int) -> np.ndarray:
    # floor(sum/g) without overflow: sum(x // g) + floor(sum(x % g) / g)
    gd = draws.dtype.type(g)
    q = (draws // gd).sum(axis=1, dtype=draws.dtype)
    r = (draws % gd).sum(axis=1, dtype=draws.dtype)
    return q + r // gd


def generate(
    spec: DistributionSpec,
    n: int,
    width: ElementWidth = ElementWidth.W32,
    payload: PayloadMode = PayloadMode.KEYS_ONLY,
) -> SortSequence:
    if n < 0:
        raise ValueError("n must be non-negative")
    rng = mt_seed(spec.seed, width)
    dt = width.dtype.type
    kind = spec.kind

    if kind is Distribution.ZERO:
        keys = np.zeros(n, dtype=width.dtype)
    elif kind is Distribution.GAUSSIAN:
        g = spec.gaussian_samples
        keys = _mean_floor(rng.random_raw(n * g).reshape(n, g), g)
    elif kind is Distribution.BUCKET:
        b = spec.bucket_count
        span = dt((1 << width.bits) // b)
        bucket = (np.arange(n, dtype=np.uint64) * np.uint64(b)) // np.uint64(max(n, 1))
        keys = bucket.astype(width.dtype) * span + rng.random_raw(n) % span
    else:
        keys = rng.random_raw(n)
        if kind is Distribution.SORTED:
            keys = np.sort(keys, kind="stable")
        elif kind is Distribution.SORTED_DESC:
            keys = np.sort(keys, kind="stable")[::-1].copy()

    values = np.arange(n, dtype=width.dtype) if payload is PayloadMode.KEY_VALUE else None
    return SortSequence(keys, values)
