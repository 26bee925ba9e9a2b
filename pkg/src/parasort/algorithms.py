"""Registry of the seven sorts behind one calling convention.

Every entry is called as ``sort(seq, runtime, mode, options, inplace=...)``
and returns a :class:`SortOutcome`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .adaptive import ibr_sort
from .bitonic import bitonic_sort, multistep_sort
from .core import ConfigurationError, Mode, SortOutcome, SortSequence
from .mergesort import MergeConfig, merge_sort
from .quicksort import quicksort
from .radix import RadixConfig, radix_sort
from .runtime import Runtime
from .samplesort import SampleConfig, sample_sort


@dataclass(frozen=True)
class SortOptions:
    """Tuning knobs shared by the CLI, the harness and the tests."""

    fusion: int = 4
    pivot: str = "minmax"
    radix_bits: int = 8
    tile: int = 512
    rank_stride: int = 256
    buckets: int = 32
    oversample: int = 8
    small_threshold: int = 1024

    def merge_config(self) -> MergeConfig:
        return MergeConfig(self.tile, min(self.rank_stride, self.tile))

    def sample_config(self) -> SampleConfig:
        return SampleConfig(self.buckets, self.oversample, self.small_threshold)

    def radix_config(self) -> RadixConfig:
        return RadixConfig(self.radix_bits)

    def validate(self) -> "SortOptions":
        self.merge_config()
        self.sample_config()
        self.radix_config()
        if not 1 <= self.fusion <= 5:
            raise ConfigurationError(f"fusion must be in [1, 5], got {self.fusion}")
        if self.pivot not in ("minmax", "median3"):
            raise ConfigurationError(f"pivot must be minmax or median3, got {self.pivot!r}")
        return self


@dataclass(frozen=True)
class Algorithm:
    id: str
    legend: str
    stable: bool
    run: Callable[[SortSequence, Runtime | None, Mode, SortOptions, bool], SortOutcome]

    def __call__(self, seq, runtime=None, mode=Mode.SEQUENTIAL, options: SortOptions | None = None, *, inplace=False):
        return self.run(seq, runtime, Mode.parse(mode), options or SortOptions(), inplace)


ALGORITHMS: dict[str, Algorithm] = {
    a.id: a
    for a in (
        Algorithm("bitonic", "Bitonic sort", False, lambda s, rt, m, o, ip: bitonic_sort(s, rt, m, inplace=ip)),
        Algorithm("multistep", "Multistep bitonic sort", False, lambda s, rt, m, o, ip: multistep_sort(s, rt, m, fusion=o.fusion, inplace=ip)),
        Algorithm("ibr", "IBR bitonic sort", False, lambda s, rt, m, o, ip: ibr_sort(s, rt, m, inplace=ip)),
        Algorithm("merge", "Merge sort", True, lambda s, rt, m, o, ip: merge_sort(s, rt, m, o.merge_config(), inplace=ip)),
        Algorithm(
            "quick",
            "Quicksort",
            False,
            lambda s, rt, m, o, ip: quicksort(s, rt, m, pivot=o.pivot, small_threshold=o.small_threshold, inplace=ip),
        ),
        Algorithm("radix", "Radix sort", True, lambda s, rt, m, o, ip: radix_sort(s, rt, m, o.radix_config(), inplace=ip)),
        Algorithm("sample", "Sample sort", False, lambda s, rt, m, o, ip: sample_sort(s, rt, m, o.sample_config(), inplace=ip)),
    )
}

ALGORITHM_IDS = tuple(ALGORITHMS)


def get_algorithm(name: str) -> Algorithm:
    try:
        return ALGORITHMS[name]
    except KeyError:
        raise ConfigurationError(f"unknown algorithm {name!r}; choose from {', '.join(ALGORITHM_IDS)}") from None


def sort(seq: SortSequence, algorithm: str = "radix", mode=Mode.SEQUENTIAL, runtime: Runtime | None = None, options: SortOptions | None = None) -> SortOutcome:
    """Convenience front door: sort a copy of ``seq`` with the named algorithm."""
    return get_algorithm(algorithm)(seq, runtime, mode, options)
