"""Measurement protocol: length schedule, timed repetitions, sort rate, speedup."""

from __future__ import annotations

import hashlib
import math
import statistics
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Iterator

from .algorithms import ALGORITHM_IDS, SortOptions, get_algorithm
from .core import ElementWidth, Mode, PayloadMode, multiset_equal, verify_sorted
from .rng import Distribution, DistributionSpec, generate
from .runtime import Runtime, resolve_workers


def sequence_lengths(min_exp: int, max_exp: int, include_nonregular: bool = True) -> list[int]:
    """All ``2**e`` plus, optionally, ``2**e + 2**(e-1)`` below the largest power."""
    if min_exp > max_exp:
        raise ValueError(f"min_exp {min_exp} exceeds max_exp {max_exp}")
    if min_exp < 1:
        raise ValueError("exponents start at 1")
    out = [1 << e for e in range(min_exp, max_exp + 1)]
    if include_nonregular:
        out += [(1 << e) + (1 << (e - 1)) for e in range(min_exp, max_exp)]
    return sorted(out)


def sort_rate(n: int, mean_time: float) -> float:
    """Millions of elements per second."""
    if not mean_time > 0:
        raise ValueError(f"mean time must be positive, got {mean_time}")
    return n / mean_time / 1e6


def speedup(parallel_rate: float, sequential_rate: float) -> float:
    if not (parallel_rate > 0 and sequential_rate > 0):
        raise ValueError("rates must be positive")
    return parallel_rate / sequential_rate


@dataclass(frozen=True)
class BenchmarkConfig:
    algorithms: tuple[str, ...] = ALGORITHM_IDS
    modes: tuple[Mode, ...] = (Mode.SEQUENTIAL, Mode.PARALLEL)
    widths: tuple[ElementWidth, ...] = (ElementWidth.W32, ElementWidth.W64)
    payloads: tuple[PayloadMode, ...] = (PayloadMode.KEYS_ONLY,)
    distributions: tuple[DistributionSpec, ...] = tuple(DistributionSpec(d) for d in Distribution)
    min_exp: int = 15
    max_exp: int = 18
    include_nonregular: bool = True
    repetitions: int = 50
    warmup_runs: int = 1
    seed: int = 5489
    workers: int | None = None
    chunk_size: int = 4096
    fixed_input: bool = False
    w64_max_exp: int = 24  # 64-bit sweeps stop one exponent earlier by default
    options: SortOptions = field(default_factory=SortOptions)

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.warmup_runs < 0:
            raise ValueError("warmup_runs must be >= 0")
        for a in self.algorithms:
            get_algorithm(a)
        self.options.validate()
        sequence_lengths(self.min_exp, self.max_exp, False)

    def lengths(self, width: ElementWidth) -> list[int]:
        hi = self.max_exp
        if width is ElementWidth.W64:
            hi = max(self.min_exp, min(hi, self.w64_max_exp))
        return sequence_lengths(self.min_exp, hi, self.include_nonregular)

    def cells(self) -> Iterator["Cell"]:
        for algo in self.algorithms:
            for mode in self.modes:
                for width in self.widths:
                    for payload in self.payloads:
                        for dist in self.distributions:
                            for n in self.lengths(width):
                                yield Cell(algo, mode, width, payload, dist, n)


@dataclass(frozen=True)
class Cell:
    algorithm: str
    mode: Mode
    width: ElementWidth
    payload: PayloadMode
    distribution: DistributionSpec
    n: int

    @property
    def key(self) -> tuple:
        """Identity of a cell without its mode, used to pair seq/par rows."""
        return (self.algorithm, self.width, self.payload, self.distribution.kind, self.n)


@dataclass(frozen=True)
class Measurement:
    algorithm: str
    mode: Mode
    width: ElementWidth
    payload: PayloadMode
    distribution: Distribution
    n: int
    repetitions: int
    mean_time: float
    stddev_time: float
    workers: int
    pivot: str
    fusion: int
    radix_bits: int
    valid: bool = True
    error: str = ""

    @property
    def sort_rate(self) -> float:
        return sort_rate(self.n, self.mean_time) if self.valid else math.nan

    @property
    def cell_key(self) -> tuple:
        return (self.algorithm, self.width, self.payload, self.distribution, self.n)


def repetition_seed(base: int, cell: Cell, rep: int) -> int:
    """Deterministic 32-bit seed for one repetition of one cell."""
    text = f"{base}|{cell.algorithm}|{cell.width.bits}|{cell.payload.value}|{cell.distribution.kind.value}|{cell.n}|{rep}"
    return int.from_bytes(hashlib.blake2b(text.encode(), digest_size=4).digest(), "little")


def measure_cell(
    cell: Cell,
    config: BenchmarkConfig,
    runtime: Runtime,
    clock: Callable[[], int] = time.perf_counter_ns,
) -> Measurement:
    algo = get_algorithm(cell.algorithm)
    opts = config.options
    samples: list[float] = []
    error = ""
    for rep in range(config.warmup_runs + config.repetitions):
        seed = repetition_seed(config.seed, cell, 0 if config.fixed_input else rep)
        source = generate(replace(cell.distribution, seed=seed), cell.n, cell.width, cell.payload)
        work = source.copy()
        t0 = clock()
        out = algo(work, runtime, cell.mode, opts, inplace=True)
        t1 = clock()
        if not (verify_sorted(out.sequence) and multiset_equal(source, out.sequence)):
            error = f"incorrect output on repetition {rep}"
            break
        if rep >= config.warmup_runs:
            samples.append((t1 - t0) / 1e9)
    valid = not error
    mean = statistics.fmean(samples) if valid else math.nan
    std = statistics.pstdev(samples) if valid else math.nan
    return Measurement(
        cell.algorithm,
        cell.mode,
        cell.width,
        cell.payload,
        cell.distribution.kind,
        cell.n,
        config.repetitions,
        mean,
        std,
        runtime.workers if cell.mode is Mode.PARALLEL else 1,
        opts.pivot,
        opts.fusion,
        opts.radix_bits,
        valid,
        error,
    )


def run_benchmark(
    config: BenchmarkConfig,
    progress: Callable[[Measurement], None] | None = None,
) -> list[Measurement]:
    """Cells run one at a time; a parallel sort owns every worker while timed."""
    out = []
    with Runtime(resolve_workers(config.workers), config.chunk_size) as rt:
        for cell in config.cells():
            m = measure_cell(cell, config, rt)
            out.append(m)
            if progress is not None:
                progress(m)
    return out


@dataclass(frozen=True)
class SpeedupRow:
    algorithm: str
    width: ElementWidth
    payload: PayloadMode
    distribution: Distribution
    n: int
    speedup: float


def join_speedups(measurements: Iterable[Measurement], require_all: bool = True) -> list[SpeedupRow]:
    """Pair every parallel row with its sequential counterpart.

    With ``require_all`` a row lacking a counterpart raises ``KeyError``
    naming the cell; otherwise such rows are skipped.
    """
    seq, par = {}, {}
    for m in measurements:
        if not m.valid:
            continue
        (seq if m.mode is Mode.SEQUENTIAL else par)[m.cell_key] = m
    rows = []
    for key in sorted(set(seq) | set(par), key=_key_order):
        if key not in seq or key not in par:
            if require_all:
                missing = "sequential" if key not in seq else "parallel"
                raise KeyError(f"no {missing} counterpart for cell {_describe(key)}")
            continue
        rows.append(SpeedupRow(*key, speedup(par[key].sort_rate, seq[key].sort_rate)))
    return rows


def _key_order(key):
    a, w, p, d, n = key
    return (a, w.bits, p.value, d.value, n)


def _describe(key) -> str:
    a, w, p, d, n = key
    return f"algorithm={a} width={w.bits} payload={p.value} distribution={d.value} n={n}"
