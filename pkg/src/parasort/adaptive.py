"""Adaptive bitonic sorting over bitonic trees (interval based rearrangement).

A sequence of length ``N = 2**k`` is held as a complete binary tree of
``N - 1`` nodes whose in-order traversal gives the first ``N - 1`` elements,
plus one spare node for the last element. Nodes live in index-addressed
arrays; ``left``/``right`` are node indices (``-1`` for none).

Merging a bitonic sequence splits it into halves ``p`` (left subtree + root)
and ``r`` (right subtree + spare). The positions where ``p[t] > r[t]`` form
either a suffix ``[q, m)`` (when root > spare) or a prefix ``[0, q)``.
Walking both subtrees in lockstep from the top finds ``q`` by binary search
and performs the exchange with one value swap and one subtree-pointer swap
per level, so a merge step costs ``O(log n)`` node touches.

All comparisons are on ``(padding flag, key, tiebreak)`` so elements are
pairwise distinct. The prefix/suffix property only holds for distinct
elements; the tiebreak removes the ambiguity duplicates would cause.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numba import njit

from .core import ContractViolation, Mode, SortOutcome, SortSequence, working_copy, wrap
from .runtime import Phase, Runtime


@njit(cache=True, nogil=True, inline="always")
def _gt(key, pad, tb, a, b):
    if pad[a] != pad[b]:
        return pad[a] > pad[b]
    if key[a] != key[b]:
        return key[a] > key[b]
    return tb[a] > tb[b]


@njit(cache=True, nogil=True, inline="always")
def _swap_payload(key, val, pad, tb, hv, a, b):
    t = key[a]
    key[a] = key[b]
    key[b] = t
    if hv:
        u = val[a]
        val[a] = val[b]
        val[b] = u
    f = pad[a]
    pad[a] = pad[b]
    pad[b] = f
    w = tb[a]
    tb[a] = tb[b]
    tb[b] = w


@njit(cache=True, nogil=True)
def _merge_step(key, val, pad, tb, left, right, root, spare, descending):
    """q-search and interval exchange for one bitonic (root, spare) pair.

    Returns the number of nodes touched.
    """
    hv = val.shape[0] != 0
    touched = 2
    suffix = _gt(key, pad, tb, root, spare) != descending
    if suffix:
        _swap_payload(key, val, pad, tb, hv, root, spare)
    p = left[root]
    q = right[root]
    while p >= 0:
        touched += 2
        exch = _gt(key, pad, tb, p, q) != descending
        if exch:
            _swap_payload(key, val, pad, tb, hv, p, q)
        if suffix:
            if exch:
                t = right[p]
                right[p] = right[q]
                right[q] = t
                p = left[p]
                q = left[q]
            else:
                p = right[p]
                q = right[q]
        else:
            if exch:
                t = left[p]
                left[p] = left[q]
                left[q] = t
                p = right[p]
                q = right[q]
            else:
                p = left[p]
                q = left[q]
    return touched


@njit(cache=True, nogil=True)
def _merge_level(key, val, pad, tb, left, right, roots, spares, desc, out_roots, out_spares, out_desc, lo, hi):
    """Merge steps for pairs ``[lo, hi)``; writes the child pairs for the next depth."""
    touched = 0
    has_children = out_roots.shape[0] != 0
    for i in range(lo, hi):
        r = roots[i]
        s = spares[i]
        d = desc[i]
        touched += _merge_step(key, val, pad, tb, left, right, r, s, d)
        if has_children:
            out_roots[2 * i] = left[r]
            out_spares[2 * i] = r
            out_roots[2 * i + 1] = right[r]
            out_spares[2 * i + 1] = s
            out_desc[2 * i] = d
            out_desc[2 * i + 1] = d
    return touched


@njit(cache=True, nogil=True)
def _full_merge(key, val, pad, tb, left, right, root, spare, descending, depth_touch):
    """Sequential recursive merge of one tree; touches accumulated per depth."""
    stack_r = np.empty(128, dtype=np.int64)
    stack_s = np.empty(128, dtype=np.int64)
    stack_d = np.empty(128, dtype=np.int64)
    top = 0
    stack_r[0] = root
    stack_s[0] = spare
    stack_d[0] = 0
    top = 1
    while top > 0:
        top -= 1
        r = stack_r[top]
        s = stack_s[top]
        d = stack_d[top]
        depth_touch[d] += _merge_step(key, val, pad, tb, left, right, r, s, descending)
        if left[r] >= 0:
            stack_r[top] = right[r]
            stack_s[top] = s
            stack_d[top] = d + 1
            stack_r[top + 1] = left[r]
            stack_s[top + 1] = r
            stack_d[top + 1] = d + 1
            top += 2


@njit(cache=True, nogil=True)
def _sort_blocks_seq(key, val, pad, tb, left, right, N, k, touch):
    for j in range(1, k + 1):
        size = 1 << j
        for b in range(N >> j):
            root = b * size + (size >> 1) - 1
            spare = b * size + size - 1
            descending = j < k and (b & 1) == 1
            _full_merge(key, val, pad, tb, left, right, root, spare, descending, touch[j])


@njit(cache=True, nogil=True)
def _in_order(left, right, root, spare, out):
    """Node ids in represented order: in-order traversal, then the spare."""
    stack = np.empty(128, dtype=np.int64)
    top = 0
    node = root
    i = 0
    while top > 0 or node >= 0:
        while node >= 0:
            stack[top] = node
            top += 1
            node = left[node]
        top -= 1
        node = stack[top]
        out[i] = node
        i += 1
        node = right[node]
    out[i] = spare


def initial_links(N: int) -> tuple[np.ndarray, np.ndarray]:
    """Child links of the complete in-order tree over positions ``0..N-2``."""
    left = np.full(N, -1, dtype=np.int64)
    right = np.full(N, -1, dtype=np.int64)
    if N < 4:
        return left, right
    pos = np.arange(N - 1, dtype=np.int64)
    low = (pos + 1) & -(pos + 1)
    inner = low > 1
    left[:-1][inner] = pos[inner] - low[inner] // 2
    right[:-1][inner] = pos[inner] + low[inner] // 2
    return left, right


@dataclass
class BitonicTree:
    key: np.ndarray
    val: np.ndarray
    pad: np.ndarray
    tiebreak: np.ndarray
    left: np.ndarray
    right: np.ndarray
    root: int
    spare: int
    has_values: bool = False

    @property
    def n(self) -> int:
        return int(self.key.shape[0])

    def order(self) -> np.ndarray:
        out = np.empty(self.n, dtype=np.int64)
        if self.n == 1:
            out[0] = self.spare
        else:
            _in_order(self.left, self.right, self.root, self.spare, out)
        return out


def bitonic_tiebreak(keys: np.ndarray) -> np.ndarray | None:
    """Ranks that make a (cyclic) bitonic key sequence strictly bitonic.

    Ties are ordered along the run they sit in: increasing along the
    ascending run, decreasing along the descending one. Returns ``None``
    when ``keys`` is not bitonic.
    """
    n = keys.shape[0]
    tb = np.zeros(n, dtype=np.int64)
    if n <= 1:
        return tb
    k = keys.tolist()
    kmin = min(k)
    start = next((i for i in range(n) if k[i] == kmin and k[i - 1] > kmin), 0)
    asc = [start]
    i = start
    while len(asc) < n and k[(i + 1) % n] >= k[i]:
        i = (i + 1) % n
        asc.append(i)
    desc = [(start + len(asc) + j) % n for j in range(n - len(asc))]
    for a, b in zip(desc, desc[1:]):
        if k[b] > k[a]:
            return None
    for r, i in enumerate(asc):
        tb[i] = 2 * r
    for r, i in enumerate(desc):
        tb[i] = 2 * (len(desc) - r) + 1
    return tb


def build_bitonic_tree(seq: SortSequence, tiebreak: np.ndarray | None = None) -> BitonicTree:
    """Tree whose in-order traversal plus spare reproduces ``seq``.

    Without an explicit ``tiebreak`` one is derived with
    :func:`bitonic_tiebreak` (positions if the keys are not bitonic).
    """
    n = seq.n
    if n < 2 or n & (n - 1):
        raise ContractViolation(f"bitonic tree needs a power-of-two length >= 2, got {n}")
    if tiebreak is None:
        tiebreak = bitonic_tiebreak(seq.keys)
        if tiebreak is None:
            tiebreak = np.arange(n, dtype=np.int64)
    left, right = initial_links(n)
    return BitonicTree(
        key=seq.keys.copy(),
        val=seq.value_buffer().copy(),
        pad=np.zeros(n, dtype=np.bool_),
        tiebreak=np.asarray(tiebreak, dtype=np.int64).copy(),
        left=left,
        right=right,
        root=n // 2 - 1,
        spare=n - 1,
        has_values=seq.values is not None,
    )


def tree_to_array(tree: BitonicTree) -> SortSequence:
    order = tree.order()
    return SortSequence(tree.key[order], tree.val[order] if tree.has_values else None)


def adaptive_bitonic_merge(tree: BitonicTree, descending: bool = False) -> np.ndarray:
    """Merge a tree holding a bitonic sequence, in place.

    Returns the node-touch count per recursion depth.
    """
    k = tree.n.bit_length() - 1
    touch = np.zeros(max(k, 1), dtype=np.int64)
    _full_merge(
        tree.key, tree.val, tree.pad, tree.tiebreak, tree.left, tree.right,
        tree.root, tree.spare, descending, touch,
    )
    return touch


class QShift(NamedTuple):
    """Exchange positions ``[q, m)`` when ``suffix`` else ``[0, q)``."""

    q: int
    suffix: bool


def find_q(half1, half2, tiebreak: np.ndarray | None = None, descending: bool = False) -> QShift:
    """Binary search for the exchange interval of a bitonic ``half1 ++ half2``."""
    a = np.asarray(half1)
    b = np.asarray(half2)
    m = a.shape[0]
    if m == 0 or b.shape[0] != m:
        raise ContractViolation("halves must be non-empty and of equal length")
    if tiebreak is None:
        tiebreak = bitonic_tiebreak(np.concatenate([a, b]))
        if tiebreak is None:
            raise ContractViolation("half1 ++ half2 is not bitonic")
    ta, tb_ = tiebreak[:m], tiebreak[m:]

    def exch(t):
        gt = (a[t], ta[t]) > (b[t], tb_[t])
        return gt != descending

    suffix = exch(m - 1)
    lo, hi = 0, m - 1
    # first t with exch(t) == suffix; position m - 1 satisfies it by construction
    while lo < hi:
        mid = (lo + hi) // 2
        if exch(mid) == suffix:
            hi = mid
        else:
            lo = mid + 1
    return QShift(int(lo), bool(suffix))


def rearrange(half1, half2, shift: QShift) -> tuple[np.ndarray, np.ndarray]:
    a = np.array(half1, copy=True)
    b = np.array(half2, copy=True)
    sl = slice(shift.q, None) if shift.suffix else slice(0, shift.q)
    a[sl], b[sl] = b[sl].copy(), a[sl].copy()
    return a, b


def _padded_tree(seq: SortSequence, keys, vals):
    n = seq.n
    N = 1 << max(1, (n - 1).bit_length())
    key = np.zeros(N, dtype=keys.dtype)
    key[:n] = keys
    val = np.zeros(N if seq.values is not None else 0, dtype=keys.dtype)
    val[:n] = vals[:n] if seq.values is not None else val[:0]
    pad = np.zeros(N, dtype=np.bool_)
    pad[n:] = True
    tb = np.arange(N, dtype=np.int64)
    left, right = initial_links(N)
    return key, val, pad, tb, left, right, N


def ibr_sort(seq: SortSequence, runtime: Runtime | None = None, mode=Mode.SEQUENTIAL, *, inplace: bool = False, **_) -> SortOutcome:
    """Adaptive bitonic sort; lengths are padded with virtual ``+inf`` nodes."""
    mode = Mode.parse(mode)
    keys, vals = working_copy(seq, inplace)
    n = seq.n
    if n < 2:
        return SortOutcome(wrap(keys, vals, seq))
    key, val, pad, tb, left, right, N = _padded_tree(seq, keys, vals)
    k = N.bit_length() - 1
    touch = np.zeros((k + 1, k), dtype=np.int64)
    phases = 0
    if mode is Mode.SEQUENTIAL:
        _sort_blocks_seq(key, val, pad, tb, left, right, N, k, touch)
    else:
        rt = runtime or Runtime()
        phases = _sort_blocks_par(key, val, pad, tb, left, right, N, k, touch, rt)
    order = np.empty(N, dtype=np.int64)
    _in_order(left, right, N // 2 - 1, N - 1, order)
    order = order[:n]
    keys[:] = key[order]
    if seq.values is not None:
        vals[:] = val[order]
    merges = np.array([[(N >> j) << d for d in range(k)] for j in range(k + 1)], dtype=np.int64)
    with np.errstate(divide="ignore", invalid="ignore"):
        per_merge = np.where(merges > 0, touch / np.maximum(merges, 1), 0.0)
    return SortOutcome(
        wrap(keys, vals, seq),
        phase_count=phases,
        stats={"touch_per_level": touch, "touch_per_merge_step": per_merge},
    )


def _sort_blocks_par(key, val, pad, tb, left, right, N, k, touch, rt: Runtime) -> int:
    """One phase per (block size, recursion depth); work item = one subtree pair."""
    phases = 0
    for j in range(1, k + 1):
        size = 1 << j
        nb = N >> j
        b = np.arange(nb, dtype=np.int64)
        roots = b * size + (size >> 1) - 1
        spares = b * size + size - 1
        desc = (b & 1).astype(np.bool_) if j < k else np.zeros(nb, dtype=np.bool_)
        for d in range(j):
            count = roots.shape[0]
            last = d == j - 1
            nxt_r = np.empty(0 if last else 2 * count, dtype=np.int64)
            nxt_s = np.empty_like(nxt_r)
            nxt_d = np.empty(nxt_r.shape[0], dtype=np.bool_)
            chunk = max(1, rt.chunk_size >> (j - d))
            tally = np.zeros(-(-count // chunk), dtype=np.int64)

            def body(lo, hi, roots=roots, spares=spares, desc=desc, nxt_r=nxt_r, nxt_s=nxt_s, nxt_d=nxt_d, tally=tally, chunk=chunk):
                tally[lo // chunk] = _merge_level(
                    key, val, pad, tb, left, right, roots, spares, desc, nxt_r, nxt_s, nxt_d, lo, hi
                )

            rt.run_phases([Phase(count, body, chunk=chunk)])
            phases += 1
            touch[j, d] = tally.sum()
            roots, spares, desc = nxt_r, nxt_s, nxt_d
    return phases
