"""Sample sort with equality buckets.

``k - 1`` splitters taken from an evenly spaced, sorted sample cut the keys
into ``2k - 1`` classes: the ``k`` open intervals between splitters and one
class per splitter value. An equality class needs no further work, and each
open class is strictly smaller than its parent range in key space, so the
recursion terminates even when every key is the same.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .core import ConfigurationError, Mode, SortOutcome, SortSequence, working_copy, wrap
from .mergesort import merge_sort_range
from .runtime import Phase, Runtime, chunk_bounds, exclusive_scan


@dataclass(frozen=True)
class SampleConfig:
    """``k`` buckets, oversampling ``a``; inputs under ``small_threshold`` go to merge sort."""

    k: int = 32
    a: int = 8
    small_threshold: int = 1024

    def __post_init__(self):
        if self.k < 2:
            raise ConfigurationError(f"bucket count k must be >= 2, got {self.k}")
        if self.a < 1:
            raise ConfigurationError(f"oversampling factor a must be >= 1, got {self.a}")
        if self.small_threshold < 1:
            raise ConfigurationError("small_threshold must be positive")

    @property
    def sample_size(self) -> int:
        return self.a * self.k


def choose_splitters(keys: np.ndarray, config: SampleConfig) -> np.ndarray:
    """Sorted sample of ``a*k`` evenly spaced keys; splitter ``i`` is sample ``a*(i+1)``."""
    n = keys.shape[0]
    s = config.sample_size
    idx = (np.arange(s, dtype=np.int64) * n) // s
    sample = np.sort(keys[idx], kind="stable")
    return sample[config.a * np.arange(1, config.k)]


@njit(cache=True, nogil=True, inline="always")
def classify(k, splitters):
    """Class of key ``k``: ``2*i`` for the interval below splitter ``i``, ``2*i+1`` for equality."""
    lo = 0
    hi = splitters.shape[0]
    while lo < hi:
        mid = (lo + hi) >> 1
        if splitters[mid] < k:
            lo = mid + 1
        else:
            hi = mid
    if lo < splitters.shape[0] and splitters[lo] == k:
        return 2 * lo + 1
    return 2 * lo


@njit(cache=True, nogil=True)
def _histogram(keys, cls, lo, splitters, bounds, hist, c_lo, c_hi):
    n_cls = hist.shape[1]
    for c in range(c_lo, c_hi):
        for b in range(n_cls):
            hist[c, b] = 0
        for i in range(bounds[c], bounds[c + 1]):
            b = classify(keys[lo + i], splitters)
            cls[lo + i] = b
            hist[c, b] += 1


@njit(cache=True, nogil=True)
def _scatter(keys, vals, dst_k, dst_v, cls, lo, bounds, offs, c_lo, c_hi):
    hv = vals.shape[0] != 0
    n_cls = offs.shape[1]
    cur = np.empty(n_cls, dtype=np.int64)
    for c in range(c_lo, c_hi):
        for b in range(n_cls):
            cur[b] = offs[c, b]
        for i in range(bounds[c], bounds[c + 1]):
            b = cls[lo + i]
            d = lo + cur[b]
            cur[b] += 1
            dst_k[d] = keys[lo + i]
            if hv:
                dst_v[d] = vals[lo + i]


@njit(cache=True, nogil=True)
def _copy_range(src_k, src_v, dst_k, dst_v, lo, hi):
    hv = src_v.shape[0] != 0
    for i in range(lo, hi):
        dst_k[i] = src_k[i]
        if hv:
            dst_v[i] = src_v[i]


@njit(cache=True, nogil=True)
def _merge_small(keys, vals, buf_k, buf_v, t_lo, t_hi, i_lo, i_hi):
    for t in range(i_lo, i_hi):
        merge_sort_range(keys, vals, buf_k, buf_v, t_lo[t], t_hi[t], 1)


@njit(cache=True, nogil=True)
def _local_sort(keys, vals, tmp_k, tmp_v, cls, lo, hi, k, a, small, depth0):
    """The whole pipeline on ``[lo, hi)`` inside one kernel; returns (passes, max depth).

    Same sampling, classification and scatter as the phase-level path, so
    the output does not depend on where a bucket was finished.
    """
    hv = vals.shape[0] != 0
    s = a * k
    n_cls = 2 * k - 1
    counts = np.empty(n_cls, dtype=np.int64)
    cursor = np.empty(n_cls, dtype=np.int64)
    sample = np.empty(s, dtype=keys.dtype)
    splitters = np.empty(k - 1, dtype=keys.dtype)
    st_lo = [lo]
    st_hi = [hi]
    st_d = [depth0]
    passes = 0
    max_depth = depth0
    while len(st_lo) > 0:
        b_lo = st_lo.pop()
        b_hi = st_hi.pop()
        d = st_d.pop()
        if d > max_depth:
            max_depth = d
        n = b_hi - b_lo
        if n < 2:
            continue
        if n < small or n < s:
            merge_sort_range(keys, vals, tmp_k, tmp_v, b_lo, b_hi, 1)
            continue
        for i in range(s):
            sample[i] = keys[b_lo + (i * n) // s]
        sample.sort()
        for i in range(k - 1):
            splitters[i] = sample[a * (i + 1)]
        counts[:] = 0
        for i in range(b_lo, b_hi):
            c = classify(keys[i], splitters)
            cls[i] = c
            counts[c] += 1
        acc = 0
        for c in range(n_cls):
            cursor[c] = b_lo + acc
            acc += counts[c]
        for i in range(b_lo, b_hi):
            c = cls[i]
            p = cursor[c]
            cursor[c] = p + 1
            tmp_k[p] = keys[i]
            if hv:
                tmp_v[p] = vals[i]
        for i in range(b_lo, b_hi):
            keys[i] = tmp_k[i]
            if hv:
                vals[i] = tmp_v[i]
        passes += 1
        start = b_lo
        for c in range(n_cls):
            if c % 2 == 0 and counts[c] > 0:
                st_lo.append(start)
                st_hi.append(start + counts[c])
                st_d.append(d + 1)
            start += counts[c]
    return passes, max_depth


LOCAL_LIMIT = 1 << 16  # buckets up to this size are finished by one kernel call each


class _Sorter:
    def __init__(self, keys, vals, config: SampleConfig, rt: Runtime):
        self.keys = keys
        self.vals = vals
        self.cfg = config
        self.rt = rt
        self.tmp_k = np.empty_like(keys)
        self.tmp_v = np.empty_like(vals)
        # class of every element, written while counting and reused by the scatter
        self.cls = np.empty(keys.shape[0], dtype=np.uint16 if 2 * config.k - 1 <= 0xFFFF else np.uint32)
        self.small: list[tuple[int, int]] = []
        self.local: list[tuple[int, int, int]] = []
        self.max_bucket = 0  # largest first-level bucket
        self.partition_passes = 0
        self.max_depth = 0

    def sort(self, lo: int, hi: int, depth: int = 0) -> None:
        stack = [(lo, hi, depth)]
        while stack:
            lo, hi, depth = stack.pop()
            self.max_depth = max(self.max_depth, depth)
            n = hi - lo
            if n < 2:
                continue
            if n < self.cfg.small_threshold or n < self.cfg.sample_size:
                self.small.append((lo, hi))
                continue
            if depth > 0 and n <= LOCAL_LIMIT:
                self.local.append((lo, hi, depth))
                continue
            for b_lo, b_hi, equal in self._partition(lo, hi):
                if depth == 0:
                    self.max_bucket = max(self.max_bucket, b_hi - b_lo)
                if not equal:
                    stack.append((b_lo, b_hi, depth + 1))

    def _partition(self, lo: int, hi: int):
        keys, vals, rt = self.keys, self.vals, self.rt
        n = hi - lo
        splitters = choose_splitters(keys[lo:hi], self.cfg)
        n_cls = 2 * self.cfg.k - 1
        bounds = chunk_bounds(n, rt.chunk_size)
        n_chunks = bounds.shape[0] - 1
        hist = np.empty((n_chunks, n_cls), dtype=np.uint64)
        cls = self.cls
        rt.run(n_chunks, lambda a, b: _histogram(keys, cls, lo, splitters, bounds, hist, a, b), chunk=1)
        # class-major order: every chunk's slot for class 0, then class 1, ...
        offs = exclusive_scan(np.ascontiguousarray(hist.T).ravel(), rt).astype(np.int64).reshape(n_cls, n_chunks).T.copy()
        tk, tv = self.tmp_k, self.tmp_v
        rt.run(n_chunks, lambda a, b: _scatter(keys, vals, tk, tv, cls, lo, bounds, offs, a, b), chunk=1)
        step = rt.chunk_size
        rt.run(n, lambda a, b: _copy_range(tk, tv, keys, vals, lo + a, lo + b), chunk=step)
        self.partition_passes += 1
        sizes = hist.sum(axis=0).astype(np.int64)
        starts = lo + np.concatenate(([0], np.cumsum(sizes)[:-1]))
        return [(int(s), int(s + z), bool(c & 1)) for c, (s, z) in enumerate(zip(starts, sizes))]

    def finish(self) -> None:
        k, v, bk, bv, cl = self.keys, self.vals, self.tmp_k, self.tmp_v, self.cls
        if self.local:
            cfg = self.cfg
            res = np.zeros((len(self.local), 2), dtype=np.int64)
            local = self.local

            def body(a, b):
                for t in range(a, b):
                    lo, hi, d = local[t]
                    res[t] = _local_sort(k, v, bk, bv, cl, lo, hi, cfg.k, cfg.a, cfg.small_threshold, d)

            self.rt.run(len(local), body, chunk=1)
            self.partition_passes += int(res[:, 0].sum())
            self.max_depth = max(self.max_depth, int(res[:, 1].max()))
        if self.small:
            t_lo = np.array([a for a, _ in self.small], dtype=np.int64)
            t_hi = np.array([b for _, b in self.small], dtype=np.int64)
            self.rt.run(len(self.small), lambda a, b: _merge_small(k, v, bk, bv, t_lo, t_hi, a, b), chunk=1)


def sample_sort(
    seq: SortSequence,
    runtime: Runtime | None = None,
    mode=Mode.SEQUENTIAL,
    config: SampleConfig = SampleConfig(),
    *,
    inplace: bool = False,
    **_,
) -> SortOutcome:
    """Stable: classification and scatter keep input order, and merge sort finishes the buckets."""
    keys, vals = working_copy(seq, inplace)
    rt = runtime if (runtime is not None and Mode.parse(mode) is Mode.PARALLEL) else None
    if rt is None:
        rt = Runtime() if Mode.parse(mode) is Mode.PARALLEL else Runtime(workers=1, chunk_size=runtime.chunk_size if runtime else 4096)
    s = _Sorter(keys, vals, config, rt)
    s.sort(0, seq.n)
    s.finish()
    stats = {"max_bucket": s.max_bucket, "max_depth": s.max_depth, "k": config.k, "a": config.a}
    return SortOutcome(wrap(keys, vals, seq), partition_pass_count=s.partition_passes, stats=stats)
