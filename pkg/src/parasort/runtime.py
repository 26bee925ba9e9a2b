"""Barrier-phase execution substrate and the scan/reduction primitives.

A parallel sort is a list of :class:`Phase` objects. Each phase covers an
index range split into fixed-size chunks; workers pull chunks until the
range is exhausted, then everyone meets at a barrier before the next phase
starts. Chunking never depends on the worker count, so results are
bit-identical for any ``workers``.

Phase bodies are expected to call ``nogil`` numba kernels; that is what
lets the Python threads actually overlap.
"""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np
from numba import njit

from .core import ContractViolation, SortSequence

DEFAULT_CHUNK = 4096
WORKERS_ENV = "PARASORT_WORKERS"


def resolve_workers(workers: int | None = None) -> int:
    if workers is None:
        env = os.environ.get(WORKERS_ENV)
        if env is not None:
            try:
                workers = int(env)
            except ValueError:
                raise ValueError(f"{WORKERS_ENV} must be an integer, got {env!r}") from None
        else:
            workers = os.cpu_count() or 1
    if workers < 1:
        raise ValueError(f"worker count must be >= 1, got {workers}")
    return workers


@dataclass
class Phase:
    """``body(lo, hi)`` is called once per chunk of ``range(size)``.

    Distinct chunks must write disjoint locations.
    """

    size: int
    body: Callable[[int, int], None]
    chunk: int | None = None
    name: str = ""


class _Pool:
    def __init__(self, size: int):
        self.size = size
        self._start = threading.Barrier(size + 1)
        self._done = threading.Barrier(size + 1)
        self._job: Callable[[], None] | None = None
        self._errors: list[BaseException] = []
        self._lock = threading.Lock()
        self._threads = [
            threading.Thread(target=self._loop, name=f"parasort-{w}", daemon=True)
            for w in range(size)
        ]
        for t in self._threads:
            t.start()

    def _loop(self):
        while True:
            try:
                self._start.wait()
            except threading.BrokenBarrierError:
                return
            try:
                self._job()
            except BaseException as exc:  # re-raised by execute()
                with self._lock:
                    self._errors.append(exc)
            try:
                self._done.wait()
            except threading.BrokenBarrierError:
                return

    def execute(self, job: Callable[[], None]) -> None:
        self._job = job
        self._errors = []
        self._start.wait()
        self._done.wait()
        if self._errors:
            raise self._errors[0]

    def close(self):
        # Workers idle at the start barrier; aborting it releases them.
        self._start.abort()


class Runtime:
    """Fixed pool of ``workers`` threads executing barrier-separated phases."""

    def __init__(self, workers: int | None = None, chunk_size: int = DEFAULT_CHUNK):
        if chunk_size < 1:
            raise ValueError("chunk_size must be positive")
        self.workers = resolve_workers(workers)
        self.chunk_size = chunk_size
        self.phases_run = 0
        self._pool: _Pool | None = None
        self._busy = threading.Lock()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def close(self):
        if self._pool is not None:
            self._pool.close()
            self._pool = None

    def __del__(self):
        try:
            self.close()
        except Exception:
            pass

    def run_phases(self, plan: Iterable[Phase]) -> None:
        with self._busy:
            for phase in plan:
                self._run_one(phase)

    def run(self, size: int, body: Callable[[int, int], None], chunk: int | None = None) -> None:
        self.run_phases([Phase(size, body, chunk)])

    def _run_one(self, phase: Phase) -> None:
        self.phases_run += 1
        size = int(phase.size)
        if size <= 0:
            return
        chunk = int(phase.chunk or self.chunk_size)
        n_chunks = -(-size // chunk)
        body = phase.body
        if self.workers == 1 or n_chunks == 1:
            for c in range(n_chunks):
                body(c * chunk, min(size, (c + 1) * chunk))
            return
        if self._pool is None:
            self._pool = _Pool(self.workers)
        counter = iter(range(n_chunks))
        lock = threading.Lock()

        def job():
            while True:
                with lock:
                    c = next(counter, None)
                if c is None:
                    return
                body(c * chunk, min(size, (c + 1) * chunk))

        self._pool.execute(job)


def serial_runtime() -> Runtime:
    return Runtime(workers=1)


def run_phases(plan: Iterable[Phase], runtime: Runtime | None = None) -> None:
    (runtime or serial_runtime()).run_phases(plan)


def chunk_bounds(n: int, chunk: int) -> np.ndarray:
    """Start offsets of each chunk plus ``n`` as the final sentinel."""
    return np.append(np.arange(0, n, chunk, dtype=np.int64), np.int64(n))


@njit(cache=True, nogil=True)
def _chunk_min_max(keys, bounds, out_min, out_max, c_lo, c_hi):
    for c in range(c_lo, c_hi):
        lo = bounds[c]
        hi = bounds[c + 1]
        mn = keys[lo]
        mx = keys[lo]
        for i in range(lo + 1, hi):
            k = keys[i]
            if k < mn:
                mn = k
            if k > mx:
                mx = k
        out_min[c] = mn
        out_max[c] = mx


def reduce_min_max(keys: np.ndarray, runtime: Runtime | None = None) -> tuple[int, int]:
    """Exact (min, max) by per-chunk reduction, then a tree over chunk results."""
    n = keys.shape[0]
    if n == 0:
        raise ContractViolation("min/max of an empty array is undefined")
    rt = runtime or serial_runtime()
    bounds = chunk_bounds(n, rt.chunk_size)
    mins = np.empty(bounds.shape[0] - 1, dtype=keys.dtype)
    maxs = np.empty_like(mins)
    rt.run(mins.shape[0], lambda lo, hi: _chunk_min_max(keys, bounds, mins, maxs, lo, hi), chunk=1)
    while mins.shape[0] > 1:
        if mins.shape[0] % 2:
            mins = np.append(mins, mins[-1])
            maxs = np.append(maxs, maxs[-1])
        mins = np.minimum(mins[0::2], mins[1::2])
        maxs = np.maximum(maxs[0::2], maxs[1::2])
    return int(mins[0]), int(maxs[0])


@njit(cache=True, nogil=True)
def _chunk_scan(counts, out, totals, bounds, limit, c_lo, c_hi):
    overflow = False
    for c in range(c_lo, c_hi):
        acc = np.uint64(0)
        for i in range(bounds[c], bounds[c + 1]):
            out[i] = acc
            nxt = acc + np.uint64(counts[i])
            if nxt < acc or nxt > limit:
                overflow = True
            acc = nxt
        totals[c] = acc
    return overflow


@njit(cache=True, nogil=True)
def _chunk_add(out, offsets, bounds, c_lo, c_hi):
    for c in range(c_lo, c_hi):
        off = offsets[c]
        for i in range(bounds[c], bounds[c + 1]):
            out[i] += off


def exclusive_scan(counts: np.ndarray, runtime: Runtime | None = None) -> np.ndarray:
    """Exclusive prefix sum: chunk scans, scan of chunk totals, offset fix-up.

    Output dtype equals the input dtype; a sum that does not fit raises
    ``OverflowError``.
    """
    counts = np.ascontiguousarray(counts)
    if counts.dtype.kind != "u":
        raise ContractViolation("exclusive_scan expects an unsigned integer array")
    n = counts.shape[0]
    out = np.empty_like(counts)
    if n == 0:
        return out
    rt = runtime or serial_runtime()
    bounds = chunk_bounds(n, rt.chunk_size)
    n_chunks = bounds.shape[0] - 1
    totals = np.empty(n_chunks, dtype=counts.dtype)
    flags = np.zeros(n_chunks, dtype=np.bool_)
    limit = np.uint64(np.iinfo(counts.dtype).max)

    def scan_body(lo, hi):
        flags[lo] = _chunk_scan(counts, out, totals, bounds, limit, lo, hi)

    offsets = np.empty_like(totals)
    grand = np.empty(1, dtype=counts.dtype)
    whole = np.array([0, n_chunks], dtype=np.int64)

    def offsets_body(lo, hi):
        flags[0] |= _chunk_scan(totals, offsets, grand, whole, limit, 0, 1)

    rt.run_phases(
        [
            Phase(n_chunks, scan_body, chunk=1, name="chunk-scan"),
            Phase(1, offsets_body, chunk=1, name="total-scan"),
            Phase(n_chunks, lambda lo, hi: _chunk_add(out, offsets, bounds, lo, hi), chunk=1, name="fix-up"),
        ]
    )
    if flags.any():
        raise OverflowError("exclusive_scan: total does not fit the counter width")
    return out


@njit(cache=True, nogil=True)
def _count_zero_bits(keys, bit, bounds, zeros, c_lo, c_hi):
    for c in range(c_lo, c_hi):
        z = 0
        for i in range(bounds[c], bounds[c + 1]):
            if (keys[i] >> bit) & 1 == 0:
                z += 1
        zeros[c] = z


@njit(cache=True, nogil=True)
def _split_scatter(keys, vals, dst_k, dst_v, bit, bounds, zero_off, total_zeros, c_lo, c_hi):
    hv = vals.shape[0] != 0
    for c in range(c_lo, c_hi):
        lo = bounds[c]
        z = zero_off[c]
        # ones before this chunk = elements before it minus zeros before it
        o = total_zeros + (lo - z)
        for i in range(lo, bounds[c + 1]):
            if (keys[i] >> bit) & 1 == 0:
                d = z
                z += 1
            else:
                d = o
                o += 1
            dst_k[d] = keys[i]
            if hv:
                dst_v[d] = vals[i]


def split_by_bit_into(keys, vals, dst_k, dst_v, bit: int, runtime: Runtime | None = None) -> None:
    """Stable 0/1 split of ``keys`` on ``bit`` written to ``dst``, via a binary scan."""
    n = keys.shape[0]
    if n == 0:
        return
    rt = runtime or serial_runtime()
    bounds = chunk_bounds(n, rt.chunk_size)
    n_chunks = bounds.shape[0] - 1
    zeros = np.empty(n_chunks, dtype=np.uint64)
    sbit = keys.dtype.type(bit)
    rt.run(n_chunks, lambda lo, hi: _count_zero_bits(keys, sbit, bounds, zeros, lo, hi), chunk=1)
    zero_off = exclusive_scan(zeros, rt).astype(np.int64)
    total = int(zero_off[-1] + zeros[-1])
    rt.run(
        n_chunks,
        lambda lo, hi: _split_scatter(keys, vals, dst_k, dst_v, sbit, bounds, zero_off, total, lo, hi),
        chunk=1,
    )


def split_by_bit(seq: SortSequence, bit: int, runtime: Runtime | None = None) -> SortSequence:
    """Stable partition: keys with ``bit`` clear first, then keys with it set."""
    if not 0 <= bit < seq.width.bits:
        raise ContractViolation(f"bit {bit} outside a {seq.width.bits}-bit key")
    vals = seq.value_buffer()
    dst_k = np.empty_like(seq.keys)
    dst_v = np.empty_like(vals)
    split_by_bit_into(seq.keys, vals, dst_k, dst_v, bit, runtime)
    return SortSequence(dst_k, dst_v if seq.values is not None else None)
