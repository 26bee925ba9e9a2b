"""LSD radix sort built from stable counting-sort passes over r-bit digits."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from numba import njit

from .core import ConfigurationError, ContractViolation, ElementWidth, Mode, SortOutcome, SortSequence, working_copy, wrap
from .runtime import Runtime, chunk_bounds, exclusive_scan, split_by_bit_into


@dataclass(frozen=True)
class RadixConfig:
    digit_bits: int = 8

    def __post_init__(self):
        if not 1 <= self.digit_bits <= 16:
            raise ConfigurationError(f"digit_bits must be in [1, 16], got {self.digit_bits}")

    def digit_count(self, width: ElementWidth | int) -> int:
        bits = width.bits if isinstance(width, ElementWidth) else int(width)
        return -(-bits // self.digit_bits)

    @property
    def radix(self) -> int:
        return 1 << self.digit_bits


@dataclass
class DigitHistogram:
    counts: np.ndarray
    offsets: np.ndarray

    @classmethod
    def of(cls, keys: np.ndarray, digit_index: int, r: int) -> "DigitHistogram":
        counts = np.zeros(1 << r, dtype=np.uint64)
        _hist_range(keys, np.uint64(digit_index * r), np.uint64((1 << r) - 1), counts, 0, keys.shape[0])
        return cls(counts, exclusive_scan(counts))


def extract_digit(key: int, digit_index: int, r: int, width: ElementWidth | int = ElementWidth.W64) -> int:
    """``(key >> i*r) & (2**r - 1)``; ``i`` must address one of the ``ceil(width/r)`` digits."""
    d = RadixConfig(r).digit_count(width)
    if not 0 <= digit_index < d:
        raise ContractViolation(f"digit index {digit_index} outside [0, {d})")
    return (int(key) >> (digit_index * r)) & ((1 << r) - 1)


@njit(cache=True, nogil=True)
def _hist_range(keys, shift, mask, counts, lo, hi):
    for i in range(lo, hi):
        counts[(np.uint64(keys[i]) >> shift) & mask] += 1


@njit(cache=True, nogil=True)
def _scatter_range(keys, vals, dst_k, dst_v, shift, mask, cursor, lo, hi):
    hv = vals.shape[0] != 0
    for i in range(lo, hi):
        k = keys[i]
        d = (np.uint64(k) >> shift) & mask
        p = cursor[d]
        cursor[d] = p + 1
        dst_k[p] = k
        if hv:
            dst_v[p] = vals[i]


@njit(cache=True, nogil=True)
def _chunk_hist(keys, shift, mask, bounds, hist, c_lo, c_hi):
    for c in range(c_lo, c_hi):
        row = hist[c]
        row[:] = 0
        _hist_range(keys, shift, mask, row, bounds[c], bounds[c + 1])


@njit(cache=True, nogil=True)
def _chunk_scatter(keys, vals, dst_k, dst_v, shift, mask, bounds, offs, c_lo, c_hi):
    cursor = np.empty(offs.shape[1], dtype=np.uint64)
    for c in range(c_lo, c_hi):
        cursor[:] = offs[c]
        _scatter_range(keys, vals, dst_k, dst_v, shift, mask, cursor, bounds[c], bounds[c + 1])


def _pass_into(keys, vals, dst_k, dst_v, digit_index: int, r: int, rt: Runtime | None) -> None:
    n = keys.shape[0]
    if n == 0:
        return
    shift = np.uint64(digit_index * r)
    mask = np.uint64((1 << r) - 1)
    if rt is None:
        counts = np.zeros(1 << r, dtype=np.uint64)
        _hist_range(keys, shift, mask, counts, 0, n)
        cursor = exclusive_scan(counts)
        _scatter_range(keys, vals, dst_k, dst_v, shift, mask, cursor, 0, n)
        return
    if r == 1:
        split_by_bit_into(keys, vals, dst_k, dst_v, digit_index, rt)
        return
    # a chunk should be large next to its 2**r-entry histogram row
    bounds = chunk_bounds(n, max(rt.chunk_size, 1 << (r + 2)))
    n_chunks = bounds.shape[0] - 1
    hist = np.empty((n_chunks, 1 << r), dtype=np.uint64)
    rt.run(n_chunks, lambda a, b: _chunk_hist(keys, shift, mask, bounds, hist, a, b), chunk=1)
    # digit-major: offset of (chunk c, digit d) = all smaller digits + digit d in chunks before c
    offs = exclusive_scan(np.ascontiguousarray(hist.T).ravel(), rt).reshape(1 << r, n_chunks).T.copy()
    rt.run(n_chunks, lambda a, b: _chunk_scatter(keys, vals, dst_k, dst_v, shift, mask, bounds, offs, a, b), chunk=1)


def _runtime_for(mode, runtime):
    if Mode.parse(mode) is Mode.SEQUENTIAL:
        return None
    return runtime if runtime is not None else Runtime()


def counting_sort_pass(
    seq: SortSequence,
    digit_index: int,
    config: RadixConfig = RadixConfig(),
    runtime: Runtime | None = None,
    mode=Mode.SEQUENTIAL,
) -> SortSequence:
    """Stable reorder of ``seq`` by digit ``digit_index``."""
    d = config.digit_count(seq.width)
    if not 0 <= digit_index < d:
        raise ContractViolation(f"digit index {digit_index} outside [0, {d})")
    vals = seq.value_buffer()
    dst_k = np.empty_like(seq.keys)
    dst_v = np.empty_like(vals)
    _pass_into(seq.keys, vals, dst_k, dst_v, digit_index, config.digit_bits, _runtime_for(mode, runtime))
    return wrap(dst_k, dst_v, seq)


def radix_sort(
    seq: SortSequence,
    runtime: Runtime | None = None,
    mode=Mode.SEQUENTIAL,
    config: RadixConfig = RadixConfig(),
    *,
    inplace: bool = False,
    pass_hook: Callable[[int, np.ndarray, np.ndarray], None] | None = None,
    **_,
) -> SortOutcome:
    """``pass_hook(i, keys, values)`` runs after pass ``i`` if given."""
    keys, vals = working_copy(seq, inplace)
    rt = _runtime_for(mode, runtime)
    d = config.digit_count(seq.width)
    src = (keys, vals)
    dst = (np.empty_like(keys), np.empty_like(vals))
    if seq.n > 0:
        for i in range(d):
            _pass_into(src[0], src[1], dst[0], dst[1], i, config.digit_bits, rt)
            src, dst = dst, src
            if pass_hook is not None:
                pass_hook(i, src[0], src[1])
    if inplace and src[0] is not keys:
        keys[:] = src[0]
        vals[:] = src[1]
        src = (keys, vals)
    return SortOutcome(wrap(src[0], src[1], seq), partition_pass_count=d, stats={"digit_bits": config.digit_bits, "passes": d})
