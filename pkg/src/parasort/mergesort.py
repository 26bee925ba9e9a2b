"""Stable merge sort: bottom-up sequential, tile-sort + co-rank parallel."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .core import ConfigurationError, Mode, SortOutcome, SortSequence, working_copy, wrap
from .runtime import Phase, Runtime


@dataclass(frozen=True)
class MergeConfig:
    tile_size: int = 512
    rank_stride: int = 256

    def __post_init__(self):
        for name in ("tile_size", "rank_stride"):
            v = getattr(self, name)
            if v < 1 or v & (v - 1):
                raise ConfigurationError(f"{name} must be a positive power of two, got {v}")
        if self.rank_stride > self.tile_size:
            raise ConfigurationError("rank_stride must not exceed tile_size")


@njit(cache=True, nogil=True)
def insertion_sort_range(keys, vals, lo, hi):
    hv = vals.shape[0] != 0
    for i in range(lo + 1, hi):
        k = keys[i]
        v = vals[i] if hv else keys[i]
        j = i - 1
        while j >= lo and keys[j] > k:
            keys[j + 1] = keys[j]
            if hv:
                vals[j + 1] = vals[j]
            j -= 1
        keys[j + 1] = k
        if hv:
            vals[j + 1] = v


@njit(cache=True, nogil=True, inline="always")
def _merge(sk, sv, dk, dv, hv, a, a_end, b, b_end, out):
    while a < a_end and b < b_end:
        if sk[b] < sk[a]:
            dk[out] = sk[b]
            if hv:
                dv[out] = sv[b]
            b += 1
        else:
            dk[out] = sk[a]
            if hv:
                dv[out] = sv[a]
            a += 1
        out += 1
    while a < a_end:
        dk[out] = sk[a]
        if hv:
            dv[out] = sv[a]
        a += 1
        out += 1
    while b < b_end:
        dk[out] = sk[b]
        if hv:
            dv[out] = sv[b]
        b += 1
        out += 1


@njit(cache=True, nogil=True)
def merge_sort_range(keys, vals, buf_k, buf_v, lo, hi, first_width):
    """Stable bottom-up merge sort of ``[lo, hi)``; result ends in ``keys``.

    Runs of ``first_width`` are assumed already sorted (1 for a plain sort).
    """
    hv = vals.shape[0] != 0
    sk, sv, dk, dv = keys, vals, buf_k, buf_v
    width = first_width
    swapped = False
    while width < hi - lo:
        for a in range(lo, hi, 2 * width):
            mid = min(a + width, hi)
            end = min(a + 2 * width, hi)
            _merge(sk, sv, dk, dv, hv, a, mid, mid, end, a)
        sk, sv, dk, dv = dk, dv, sk, sv
        swapped = not swapped
        width *= 2
    if swapped:
        for i in range(lo, hi):
            keys[i] = buf_k[i]
            if hv:
                vals[i] = buf_v[i]


@njit(cache=True, nogil=True)
def sort_tiles(keys, vals, buf_k, buf_v, n, tile, t_lo, t_hi):
    for t in range(t_lo, t_hi):
        lo = t * tile
        hi = min(lo + tile, n)
        if tile <= 64:
            insertion_sort_range(keys, vals, lo, hi)
        else:
            merge_sort_range(keys, vals, buf_k, buf_v, lo, hi, 1)


@njit(cache=True, nogil=True, inline="always")
def co_rank(k, sk, a_lo, a_len, b_lo, b_len):
    """Elements of run A among the first ``k`` outputs of a stable A/B merge."""
    i_lo = max(0, k - b_len)
    i_hi = min(k, a_len)
    while i_lo < i_hi:
        i = (i_lo + i_hi) // 2
        j = k - i
        # A[i] precedes B[j-1] when A[i] <= B[j-1] (ties favour A)
        if j > 0 and sk[a_lo + i] <= sk[b_lo + j - 1]:
            i_lo = i + 1
        else:
            i_hi = i
    return i_lo


@njit(cache=True, nogil=True)
def merge_segments(sk, sv, dk, dv, n, width, stride, seg_per_pair, s_lo, s_hi):
    hv = sv.shape[0] != 0
    for s in range(s_lo, s_hi):
        pair = s // seg_per_pair
        base = pair * 2 * width
        if base >= n:
            continue
        a_len = min(width, n - base)
        b_len = min(width, n - base - a_len)
        k0 = (s % seg_per_pair) * stride
        if k0 >= a_len + b_len:
            continue
        k1 = min(k0 + stride, a_len + b_len)
        i0 = co_rank(k0, sk, base, a_len, base + a_len, b_len)
        i1 = co_rank(k1, sk, base, a_len, base + a_len, b_len)
        _merge(sk, sv, dk, dv, hv, base + i0, base + i1, base + a_len + k0 - i0, base + a_len + k1 - i1, base + k0)


def merge_sort(
    seq: SortSequence,
    runtime: Runtime | None = None,
    mode=Mode.SEQUENTIAL,
    config: MergeConfig = MergeConfig(),
    *,
    inplace: bool = False,
    **_,
) -> SortOutcome:
    keys, vals = working_copy(seq, inplace)
    n = seq.n
    buf_k = np.empty_like(keys)
    buf_v = np.empty_like(vals)
    if n < 2:
        return SortOutcome(wrap(keys, vals, seq))
    if Mode.parse(mode) is Mode.SEQUENTIAL:
        merge_sort_range(keys, vals, buf_k, buf_v, 0, n, 1)
        return SortOutcome(wrap(keys, vals, seq))

    rt = runtime or Runtime()
    T, R = config.tile_size, config.rank_stride
    n_tiles = -(-n // T)
    rt.run_phases([Phase(n_tiles, lambda lo, hi: sort_tiles(keys, vals, buf_k, buf_v, n, T, lo, hi), chunk=max(1, rt.chunk_size // T))])
    phases = 1
    src = (keys, vals)
    dst = (buf_k, buf_v)
    width = T
    while width < n:
        pairs = -(-n // (2 * width))
        spp = (2 * width) // R
        chunk = max(1, rt.chunk_size // R)

        def body(lo, hi, src=src, dst=dst, width=width, spp=spp):
            merge_segments(src[0], src[1], dst[0], dst[1], n, width, R, spp, lo, hi)

        rt.run_phases([Phase(pairs * spp, body, chunk=chunk)])
        phases += 1
        src, dst = dst, src
        width *= 2
    out_k, out_v = src
    if inplace and out_k is not keys:
        keys[:] = out_k
        vals[:] = out_v
        out_k, out_v = keys, vals
    return SortOutcome(wrap(out_k, out_v, seq), phase_count=phases)
