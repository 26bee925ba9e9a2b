"""Quicksort with min/max-average pivots and three-way partitioning.

Both modes start with a min/max reduction; a constant input returns at
once. Each subsequence tracks its own key range so the next pivot is free.
Subsequences at or below ``small_threshold`` are finished by the bitonic
network.

The parallel form works level by level: every open subsequence at the
current level is cut into chunks, chunks count their ``<``/``==``/``>``
classes, one exclusive scan turns counts into destinations, and a stable
scatter moves everything. One such pass per level.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from numba import njit

from .bitonic import network_sort_range
from .core import ConfigurationError, Mode, SortOutcome, SortSequence, working_copy, wrap
from .runtime import Phase, Runtime, chunk_bounds, exclusive_scan, reduce_min_max

PIVOT_RULES = ("minmax", "median3")


def select_pivot(min_key: int, max_key: int) -> int:
    """Floor of the min/max average, without leaving the key width."""
    if min_key > max_key:
        raise ValueError("min_key must not exceed max_key")
    return min_key + (max_key - min_key) // 2


@njit(cache=True, nogil=True, inline="always")
def _avg(a, b):
    return a + ((b - a) >> 1)


@njit(cache=True, nogil=True, inline="always")
def _median3(keys, lo, hi):
    a = keys[lo]
    b = keys[(lo + hi) >> 1]
    c = keys[hi - 1]
    if a > b:
        a, b = b, a
    if b > c:
        b = c
    return a if a > b else b


@njit(cache=True, nogil=True)
def _quicksort_seq(keys, vals, mn, mx, threshold, median3):
    """In-place sort; returns (partition passes, max depth)."""
    hv = vals.shape[0] != 0
    cap = 256
    s_lo = np.empty(cap, dtype=np.int64)
    s_hi = np.empty(cap, dtype=np.int64)
    s_mn = np.empty(cap, dtype=keys.dtype)
    s_mx = np.empty(cap, dtype=keys.dtype)
    s_dp = np.empty(cap, dtype=np.int64)
    s_lo[0] = 0
    s_hi[0] = keys.shape[0]
    s_mn[0] = mn
    s_mx[0] = mx
    s_dp[0] = 0
    top = 1
    passes = 0
    max_depth = 0
    while top > 0:
        top -= 1
        lo = s_lo[top]
        hi = s_hi[top]
        mn = s_mn[top]
        mx = s_mx[top]
        depth = s_dp[top]
        while True:
            if depth > max_depth:
                max_depth = depth
            if hi - lo < 2 or mn == mx:
                break
            if hi - lo <= threshold:
                network_sort_range(keys, vals, lo, hi - lo)
                break
            pivot = _median3(keys, lo, hi) if median3 else _avg(mn, mx)
            passes += 1
            # Dijkstra three-way partition: [lo,lt) < pivot, [lt,i) == pivot, (gt,hi) > pivot
            lt = lo
            i = lo
            gt = hi - 1
            l_mn = mx
            l_mx = mn
            g_mn = mx
            g_mx = mn
            while i <= gt:
                k = keys[i]
                if k < pivot:
                    if k < l_mn:
                        l_mn = k
                    if k > l_mx:
                        l_mx = k
                    keys[i] = keys[lt]
                    keys[lt] = k
                    if hv:
                        v = vals[i]
                        vals[i] = vals[lt]
                        vals[lt] = v
                    lt += 1
                    i += 1
                elif k > pivot:
                    if k < g_mn:
                        g_mn = k
                    if k > g_mx:
                        g_mx = k
                    keys[i] = keys[gt]
                    keys[gt] = k
                    if hv:
                        v = vals[i]
                        vals[i] = vals[gt]
                        vals[gt] = v
                    gt -= 1
                else:
                    i += 1
            depth += 1
            # keep the larger side on the stack, loop on the smaller one
            if lt - lo > hi - gt - 1:
                s_lo[top] = lo
                s_hi[top] = lt
                s_mn[top] = l_mn
                s_mx[top] = l_mx
                s_dp[top] = depth
                top += 1
                lo = gt + 1
                mn = g_mn
                mx = g_mx
            else:
                s_lo[top] = gt + 1
                s_hi[top] = hi
                s_mn[top] = g_mn
                s_mx[top] = g_mx
                s_dp[top] = depth
                top += 1
                hi = lt
                mn = l_mn
                mx = l_mx
    return passes, max_depth


@njit(cache=True, nogil=True)
def _count_classes(keys, item_lo, item_hi, item_task, pivots, counts, cls_min, cls_max, i_lo, i_hi):
    """Per chunk: class counts (lt, eq, gt) and key ranges of the lt/gt classes."""
    for it in range(i_lo, i_hi):
        p = pivots[item_task[it]]
        c_lt = 0
        c_eq = 0
        c_gt = 0
        l_mn = keys[item_lo[it]]
        l_mx = l_mn
        g_mn = l_mn
        g_mx = l_mn
        first_l = True
        first_g = True
        for i in range(item_lo[it], item_hi[it]):
            k = keys[i]
            if k < p:
                c_lt += 1
                if first_l or k < l_mn:
                    l_mn = k
                if first_l or k > l_mx:
                    l_mx = k
                first_l = False
            elif k > p:
                c_gt += 1
                if first_g or k < g_mn:
                    g_mn = k
                if first_g or k > g_mx:
                    g_mx = k
                first_g = False
            else:
                c_eq += 1
        counts[it, 0] = c_lt
        counts[it, 1] = c_eq
        counts[it, 2] = c_gt
        cls_min[it, 0] = l_mn
        cls_max[it, 0] = l_mx
        cls_min[it, 1] = g_mn
        cls_max[it, 1] = g_mx


@njit(cache=True, nogil=True)
def _scatter_classes(keys, vals, dst_k, dst_v, item_lo, item_hi, item_task, pivots, dest, i_lo, i_hi):
    hv = vals.shape[0] != 0
    for it in range(i_lo, i_hi):
        p = pivots[item_task[it]]
        d_lt = dest[it, 0]
        d_eq = dest[it, 1]
        d_gt = dest[it, 2]
        for i in range(item_lo[it], item_hi[it]):
            k = keys[i]
            if k < p:
                d = d_lt
                d_lt += 1
            elif k > p:
                d = d_gt
                d_gt += 1
            else:
                d = d_eq
                d_eq += 1
            dst_k[d] = k
            if hv:
                dst_v[d] = vals[i]


@njit(cache=True, nogil=True)
def _copy_items(src_k, src_v, dst_k, dst_v, item_lo, item_hi, i_lo, i_hi):
    hv = src_v.shape[0] != 0
    for it in range(i_lo, i_hi):
        for i in range(item_lo[it], item_hi[it]):
            dst_k[i] = src_k[i]
            if hv:
                dst_v[i] = src_v[i]


@njit(cache=True, nogil=True)
def _finish_small(keys, vals, t_lo, t_hi, i_lo, i_hi):
    for t in range(i_lo, i_hi):
        network_sort_range(keys, vals, t_lo[t], t_hi[t] - t_lo[t])


@dataclass(frozen=True)
class QuicksortTask:
    lo: int
    hi: int
    min_key: int
    max_key: int
    depth: int = 0


@dataclass(frozen=True)
class PartitionRecord:
    """What one partition step did; handed to the debug hook."""

    task: QuicksortTask
    pivot: int
    n_lt: int
    n_eq: int
    n_gt: int


def _parallel(keys, vals, mn, mx, threshold, median3, rt: Runtime, hook):
    n = keys.shape[0]
    dtype = keys.dtype
    tmp_k = np.empty_like(keys)
    tmp_v = np.empty_like(vals)
    open_tasks = [QuicksortTask(0, n, mn, mx)]
    small: list[QuicksortTask] = []
    passes = 0
    max_depth = 0
    phases = 0
    while open_tasks:
        big = []
        for t in open_tasks:
            max_depth = max(max_depth, t.depth)
            if t.hi - t.lo < 2 or t.min_key == t.max_key:
                continue
            (small if t.hi - t.lo <= threshold else big).append(t)
        if not big:
            break
        passes += 1
        C = rt.chunk_size
        lo_l, hi_l, task_l = [], [], []
        for ti, t in enumerate(big):
            b = chunk_bounds(t.hi - t.lo, C) + t.lo
            lo_l.append(b[:-1])
            hi_l.append(b[1:])
            task_l.append(np.full(b.shape[0] - 1, ti, dtype=np.int64))
        item_lo = np.concatenate(lo_l)
        item_hi = np.concatenate(hi_l)
        item_task = np.concatenate(task_l)
        n_items = item_lo.shape[0]
        if median3:
            pivots = np.array([_median3(keys, t.lo, t.hi) for t in big], dtype=dtype)
        else:
            pivots = np.array([select_pivot(t.min_key, t.max_key) for t in big], dtype=dtype)
        counts = np.empty((n_items, 3), dtype=np.uint64)
        cls_min = np.empty((n_items, 2), dtype=dtype)
        cls_max = np.empty((n_items, 2), dtype=dtype)
        rt.run_phases([Phase(n_items, lambda a, b: _count_classes(keys, item_lo, item_hi, item_task, pivots, counts, cls_min, cls_max, a, b), chunk=1)])

        # task-major, then class, then chunk: one scan gives every destination
        starts = np.searchsorted(item_task, np.arange(len(big)))
        ends = np.append(starts[1:], n_items)
        order = np.concatenate([(np.arange(s, e)[None, :] * 3 + np.arange(3)[:, None]).ravel() for s, e in zip(starts, ends)])
        flat = counts.ravel()[order]
        scanned = exclusive_scan(flat, rt).astype(np.int64)
        dest_flat = np.empty(n_items * 3, dtype=np.int64)
        task_base = np.concatenate([np.full(3 * (e - s), big[i].lo - scanned[3 * s], dtype=np.int64) for i, (s, e) in enumerate(zip(starts, ends))])
        dest_flat[order] = scanned + task_base
        dest = dest_flat.reshape(n_items, 3)
        rt.run_phases(
            [
                Phase(n_items, lambda a, b: _scatter_classes(keys, vals, tmp_k, tmp_v, item_lo, item_hi, item_task, pivots, dest, a, b), chunk=1),
                Phase(n_items, lambda a, b: _copy_items(tmp_k, tmp_v, keys, vals, item_lo, item_hi, a, b), chunk=1),
            ]
        )
        phases += 3 + 3

        nxt = []
        for ti, t in enumerate(big):
            s, e = starts[ti], ends[ti]
            c = counts[s:e].sum(axis=0).astype(np.int64)
            n_lt, n_eq, n_gt = int(c[0]), int(c[1]), int(c[2])
            if hook is not None:
                hook(keys, vals, PartitionRecord(t, int(pivots[ti]), n_lt, n_eq, n_gt))
            if n_lt:
                has = counts[s:e, 0] > 0
                nxt.append(QuicksortTask(t.lo, t.lo + n_lt, int(cls_min[s:e, 0][has].min()), int(cls_max[s:e, 0][has].max()), t.depth + 1))
            if n_gt:
                has = counts[s:e, 2] > 0
                nxt.append(QuicksortTask(t.hi - n_gt, t.hi, int(cls_min[s:e, 1][has].min()), int(cls_max[s:e, 1][has].max()), t.depth + 1))
        open_tasks = nxt
    if small:
        t_lo = np.array([t.lo for t in small], dtype=np.int64)
        t_hi = np.array([t.hi for t in small], dtype=np.int64)
        rt.run_phases([Phase(len(small), lambda a, b: _finish_small(keys, vals, t_lo, t_hi, a, b), chunk=1)])
        phases += 1
    return passes, max_depth, phases


def quicksort(
    seq: SortSequence,
    runtime: Runtime | None = None,
    mode=Mode.SEQUENTIAL,
    *,
    pivot: str = "minmax",
    small_threshold: int = 1024,
    inplace: bool = False,
    partition_hook: Callable[[np.ndarray, np.ndarray, PartitionRecord], None] | None = None,
    **_,
) -> SortOutcome:
    """``partition_hook`` (parallel mode) sees the buffers after every partition step."""
    if pivot not in PIVOT_RULES:
        raise ConfigurationError(f"pivot must be one of {PIVOT_RULES}, got {pivot!r}")
    if small_threshold < 1:
        raise ConfigurationError("small_threshold must be positive")
    mode = Mode.parse(mode)
    keys, vals = working_copy(seq, inplace)
    n = seq.n
    stats = {"pivot": pivot}
    if n < 2:
        return SortOutcome(wrap(keys, vals, seq), stats=stats)
    rt = runtime if runtime is not None else (Runtime() if mode is Mode.PARALLEL else Runtime(workers=1))
    mn, mx = reduce_min_max(keys, rt if mode is Mode.PARALLEL else None)
    if mn == mx:
        stats["max_depth"] = 0
        return SortOutcome(wrap(keys, vals, seq), partition_pass_count=0, stats=stats)
    median3 = pivot == "median3"
    dt = keys.dtype.type
    if mode is Mode.SEQUENTIAL:
        passes, depth = _quicksort_seq(keys, vals, dt(mn), dt(mx), small_threshold, median3)
        phases = 0
    else:
        passes, depth, phases = _parallel(keys, vals, mn, mx, small_threshold, median3, rt, partition_hook)
    stats["max_depth"] = int(depth)
    return SortOutcome(wrap(keys, vals, seq), partition_pass_count=int(passes), phase_count=phases, stats=stats)
