"""Sequence data model, correctness oracles and the ground-truth sort.

Keys are unsigned 32- or 64-bit integers sorted ascending. Key-value
sequences keep keys and values in two parallel arrays of the same dtype.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any

import numpy as np


class ContractViolation(ValueError):
    """An operation was called outside its documented precondition."""


class ConfigurationError(ValueError):
    """An algorithm parameter is out of range."""


class ElementWidth(enum.Enum):
    W32 = 32
    W64 = 64

    @property
    def dtype(self) -> np.dtype:
        return np.dtype(np.uint32) if self is ElementWidth.W32 else np.dtype(np.uint64)

    @property
    def bits(self) -> int:
        return self.value

    @classmethod
    def of(cls, dtype) -> "ElementWidth":
        dtype = np.dtype(dtype)
        if dtype == np.uint32:
            return cls.W32
        if dtype == np.uint64:
            return cls.W64
        raise ContractViolation(f"unsupported key dtype {dtype}; expected uint32 or uint64")


class PayloadMode(enum.Enum):
    KEYS_ONLY = "keys"
    KEY_VALUE = "pairs"


class Mode(enum.Enum):
    SEQUENTIAL = "sequential"
    PARALLEL = "parallel"

    @classmethod
    def parse(cls, mode) -> "Mode":
        if isinstance(mode, cls):
            return mode
        aliases = {"seq": cls.SEQUENTIAL, "par": cls.PARALLEL}
        try:
            return aliases.get(mode) or cls(mode)
        except ValueError:
            raise ConfigurationError(f"unknown mode {mode!r}") from None


@dataclass
class SortSequence:
    keys: np.ndarray
    values: np.ndarray | None = None

    def __post_init__(self):
        self.keys = np.ascontiguousarray(self.keys)
        if self.keys.ndim != 1:
            raise ContractViolation("keys must be one-dimensional")
        ElementWidth.of(self.keys.dtype)
        if self.values is not None:
            self.values = np.ascontiguousarray(self.values)
            if self.values.dtype != self.keys.dtype:
                raise ContractViolation("values must have the same width as keys")
            if self.values.shape != self.keys.shape:
                raise ContractViolation("values must have one entry per key")

    @classmethod
    def from_keys(cls, keys, width: ElementWidth = ElementWidth.W32, values=None) -> "SortSequence":
        keys = np.asarray(keys, dtype=width.dtype)
        if values is not None:
            values = np.asarray(values, dtype=width.dtype)
        return cls(keys, values)

    @property
    def n(self) -> int:
        return int(self.keys.shape[0])

    def __len__(self) -> int:
        return self.n

    @property
    def width(self) -> ElementWidth:
        return ElementWidth.of(self.keys.dtype)

    @property
    def payload(self) -> PayloadMode:
        return PayloadMode.KEYS_ONLY if self.values is None else PayloadMode.KEY_VALUE

    def copy(self) -> "SortSequence":
        return SortSequence(self.keys.copy(), None if self.values is None else self.values.copy())

    def value_buffer(self) -> np.ndarray:
        """Values, or an empty array of the key dtype for keys-only sequences.

        Kernels take both arrays unconditionally and test ``vals.shape[0]``.
        """
        if self.values is None:
            return np.empty(0, dtype=self.keys.dtype)
        return self.values


@dataclass
class SortOutcome:
    sequence: SortSequence
    comparator_count: int = 0
    partition_pass_count: int = 0
    phase_count: int = 0
    stats: dict[str, Any] = field(default_factory=dict)


def working_copy(seq: SortSequence, inplace: bool) -> tuple[np.ndarray, np.ndarray]:
    """Key and value buffers a sort may overwrite."""
    keys = seq.keys if inplace else seq.keys.copy()
    vals = seq.value_buffer()
    if seq.values is not None and not inplace:
        vals = vals.copy()
    return keys, vals


def wrap(keys: np.ndarray, vals: np.ndarray, like: SortSequence) -> SortSequence:
    return SortSequence(keys, vals if like.values is not None else None)


def verify_sorted(seq: SortSequence) -> bool:
    k = seq.keys
    return bool(np.all(k[:-1] <= k[1:])) if k.shape[0] > 1 else True


def _check_compatible(a: SortSequence, b: SortSequence) -> None:
    if a.width is not b.width:
        raise ContractViolation(f"width mismatch: {a.width.name} vs {b.width.name}")
    if a.payload is not b.payload:
        raise ContractViolation(f"payload mismatch: {a.payload.name} vs {b.payload.name}")


def multiset_equal(a: SortSequence, b: SortSequence) -> bool:
    _check_compatible(a, b)
    if a.n != b.n:
        return False
    if a.values is None:
        return bool(np.array_equal(np.sort(a.keys), np.sort(b.keys)))
    oa = np.lexsort((a.values, a.keys))
    ob = np.lexsort((b.values, b.keys))
    return bool(
        np.array_equal(a.keys[oa], b.keys[ob]) and np.array_equal(a.values[oa], b.values[ob])
    )


def check_stability(input: SortSequence, output: SortSequence) -> bool:
    """True iff equal keys in ``output`` carry increasing original indices.

    Both sequences must carry values equal to a permutation of 0..n-1, with
    ``input`` holding them in order.
    """
    _check_compatible(input, output)
    if input.values is None:
        raise ContractViolation("stability check needs index values")
    n = input.n
    ramp = np.arange(n, dtype=input.values.dtype)
    if not np.array_equal(input.values, ramp):
        raise ContractViolation("input values must be the original indices 0..n-1")
    if output.n != n or not np.array_equal(np.sort(output.values), ramp):
        raise ContractViolation("output values are not a permutation of 0..n-1")
    if n < 2:
        return True
    same = output.keys[1:] == output.keys[:-1]
    return bool(np.all(output.values[1:][same] > output.values[:-1][same]))


def reference_sort(seq: SortSequence) -> SortSequence:
    order = np.argsort(seq.keys, kind="stable")
    values = None if seq.values is None else seq.values[order]
    return SortSequence(seq.keys[order], values)


def index_values(seq: SortSequence) -> SortSequence:
    """Same keys, values replaced by original positions (for stability checks)."""
    return SortSequence(seq.keys.copy(), np.arange(seq.n, dtype=seq.keys.dtype))
