"""Bitonic sorting network, parallel and multistep (fused-step) execution.

The network is written with every comparator pointing the same way (lower
index receives the smaller key). The first step of each merge phase pairs
``i`` with its mirror ``i ^ (2**p - 1)`` inside the block of size ``2**p``;
the remaining steps pair ``i`` with ``i ^ 2**(s-1)``. This is Batcher's
network with the descending blocks flipped in place, and it has the same
comparator count, ``N * k * (k + 1) / 4`` for ``N = 2**k``.

Arbitrary lengths are padded virtually to the next power of two with
``+inf`` keys. Because every comparator is ascending, a virtual key never
moves, so any comparator whose upper index is ``>= n`` is a no-op and no
memory outside ``[0, n)`` is read or written.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .core import ConfigurationError, Mode, SortOutcome, SortSequence, working_copy, wrap
from .runtime import Phase, Runtime

MAX_FUSION = 5


def next_pow2(n: int) -> int:
    return 1 if n <= 1 else 1 << (n - 1).bit_length()


@njit(cache=True, nogil=True, inline="always")
def _cmpx(keys, vals, hv, i, j):
    # branchless: random keys make a data-dependent branch mispredict half the time
    x = keys[i]
    y = keys[j]
    if hv:
        sw = x > y
        u = vals[i]
        w = vals[j]
        vals[i] = w if sw else u
        vals[j] = u if sw else w
    keys[i] = min(x, y)
    keys[j] = max(x, y)


@njit(cache=True, nogil=True)
def network_sort_range(keys, vals, lo, n):
    """Run the full network over ``keys[lo:lo+n]``; returns comparators applied."""
    hv = vals.shape[0] != 0
    N = 1
    while N < n:
        N <<= 1
    count = 0
    size = 2
    while size <= N:
        half = size >> 1
        for b in range(0, n, size):
            for t in range(half):
                j = b + size - 1 - t
                if j < n:
                    _cmpx(keys, vals, hv, lo + b + t, lo + j)
                    count += 1
        stride = half >> 1
        while stride > 0:
            for b in range(0, n, 2 * stride):
                for t in range(stride):
                    j = b + t + stride
                    if j < n:
                        _cmpx(keys, vals, hv, lo + b + t, lo + j)
                        count += 1
            stride >>= 1
        size <<= 1
    return count


@njit(cache=True, nogil=True)
def _fused_groups(keys, vals, n, masks, lead, g_lo, g_hi):
    """Apply ``len(masks)`` consecutive steps to groups ``[g_lo, g_hi)``.

    A group is the coset of indices reachable from its representative by
    XOR-ing any subset of ``masks``; its ``2**M`` members are loaded into a
    local window, all steps run there, and the window is written back.
    """
    hv = vals.shape[0] != 0
    M = masks.shape[0]
    G = 1 << M
    pos = np.empty(G, dtype=np.int64)
    wk = np.empty(G, dtype=keys.dtype)
    wv = np.empty(G, dtype=keys.dtype)
    live = np.empty(G, dtype=np.bool_)
    count = 0
    for g in range(g_lo, g_hi):
        # representative: g with a zero bit inserted at each leading position
        rep = g
        for b in range(M - 1, -1, -1):
            low = rep & ((1 << lead[b]) - 1)
            rep = ((rep >> lead[b]) << (lead[b] + 1)) | low
        if rep >= n:
            continue
        for t in range(G):
            p = rep
            for b in range(M):
                if (t >> b) & 1:
                    p ^= masks[b]
            pos[t] = p
            live[t] = p < n
            if live[t]:
                wk[t] = keys[p]
                if hv:
                    wv[t] = vals[p]
        for b in range(M):
            bit = 1 << b
            for t in range(G):
                if t & bit:
                    continue
                u = t | bit
                a, c = (t, u) if pos[t] < pos[u] else (u, t)
                if not live[c]:
                    continue
                count += 1
                if wk[a] > wk[c]:
                    x = wk[a]
                    wk[a] = wk[c]
                    wk[c] = x
                    if hv:
                        y = wv[a]
                        wv[a] = wv[c]
                        wv[c] = y
        for t in range(G):
            if live[t]:
                keys[pos[t]] = wk[t]
                if hv:
                    vals[pos[t]] = wv[t]
    return count


@dataclass(frozen=True)
class FusedPhase:
    masks: tuple[int, ...]

    @property
    def lead_bits(self) -> tuple[int, ...]:
        return tuple(m.bit_length() - 1 for m in self.masks)


@dataclass(frozen=True)
class MultistepPlan:
    n: int
    fusion: int
    schedule: tuple[FusedPhase, ...]

    @property
    def padded(self) -> int:
        return next_pow2(self.n)


def step_masks(n: int) -> list[int]:
    """Partner masks of the unfused network, in execution order."""
    k = next_pow2(n).bit_length() - 1
    out = []
    for p in range(1, k + 1):
        out.append((1 << p) - 1)
        out.extend(1 << s for s in range(p - 2, -1, -1))
    return out


def multistep_plan(n: int, fusion: int) -> MultistepPlan:
    if not 1 <= fusion <= MAX_FUSION:
        raise ConfigurationError(f"fusion degree must be in [1, {MAX_FUSION}], got {fusion}")
    k = next_pow2(n).bit_length() - 1
    schedule = []
    for p in range(1, k + 1):
        masks = [(1 << p) - 1] + [1 << s for s in range(p - 2, -1, -1)]
        for i in range(0, len(masks), fusion):
            schedule.append(FusedPhase(tuple(masks[i : i + fusion])))
    return MultistepPlan(n, fusion, tuple(schedule))


def comparator_schedule(n: int) -> list[np.ndarray]:
    """Comparator pairs ``(i, j)``, ``i < j < n``, one array per step."""
    N = next_pow2(n)
    idx = np.arange(N, dtype=np.int64)
    steps = []
    for mask in step_masks(n):
        lead = 1 << (mask.bit_length() - 1)
        i = idx[(idx & lead) == 0]
        j = i ^ mask
        keep = j < n
        steps.append(np.stack([i[keep], j[keep]], axis=1))
    return steps


def _run_plan(seq: SortSequence, plan: MultistepPlan, runtime: Runtime, inplace: bool) -> SortOutcome:
    keys, vals = working_copy(seq, inplace)
    n = seq.n
    if n < 2:
        return SortOutcome(wrap(keys, vals, seq), stats={"fusion": plan.fusion})
    phases = []
    tallies = []
    for fused in plan.schedule:
        masks = np.array(fused.masks, dtype=np.int64)
        lead = np.array(fused.lead_bits, dtype=np.int64)
        groups = plan.padded >> masks.shape[0]
        chunk = _group_chunk(runtime, masks.shape[0])
        tally = np.zeros(-(-groups // chunk), dtype=np.int64)
        tallies.append(tally)

        def body(lo, hi, masks=masks, lead=lead, tally=tally, chunk=chunk):
            tally[lo // chunk] = _fused_groups(keys, vals, n, masks, lead, lo, hi)

        phases.append(Phase(groups, body, chunk=chunk))
    runtime.run_phases(phases)
    return SortOutcome(
        wrap(keys, vals, seq),
        comparator_count=int(sum(int(t.sum()) for t in tallies)),
        phase_count=len(phases),
        stats={"fusion": plan.fusion},
    )


def _group_chunk(runtime: Runtime, fusion: int) -> int:
    # keep roughly chunk_size elements per work item regardless of fusion
    return max(1, runtime.chunk_size >> fusion)


def bitonic_sort_seq(seq: SortSequence, *, inplace: bool = False) -> SortOutcome:
    keys, vals = working_copy(seq, inplace)
    count = network_sort_range(keys, vals, 0, seq.n) if seq.n > 1 else 0
    return SortOutcome(wrap(keys, vals, seq), comparator_count=int(count))


def bitonic_sort_par(seq: SortSequence, runtime: Runtime | None = None, *, inplace: bool = False) -> SortOutcome:
    """One barrier-separated phase per network step."""
    return _run_plan(seq, multistep_plan(seq.n, 1), runtime or Runtime(), inplace)


def multistep_bitonic_sort(
    seq: SortSequence, runtime: Runtime | None = None, fusion: int = 4, *, inplace: bool = False
) -> SortOutcome:
    """Fuse ``fusion`` consecutive steps into one phase of ``2**fusion``-element windows."""
    return _run_plan(seq, multistep_plan(seq.n, fusion), runtime or Runtime(), inplace)


def bitonic_sort(seq, runtime=None, mode=Mode.SEQUENTIAL, *, inplace=False, **_):
    if Mode.parse(mode) is Mode.SEQUENTIAL:
        return bitonic_sort_seq(seq, inplace=inplace)
    return bitonic_sort_par(seq, runtime, inplace=inplace)


def multistep_sort(seq, runtime=None, mode=Mode.SEQUENTIAL, *, fusion=4, inplace=False, **_):
    """Sequential mode runs the fused schedule on the calling thread."""
    if Mode.parse(mode) is Mode.SEQUENTIAL:
        runtime = Runtime(workers=1, chunk_size=runtime.chunk_size if runtime else 4096)
    return multistep_bitonic_sort(seq, runtime, fusion, inplace=inplace)
