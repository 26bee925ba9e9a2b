"""Seven sorting algorithms in sequential and data-parallel form, with a benchmark harness."""

from .adaptive import BitonicTree, QShift, adaptive_bitonic_merge, build_bitonic_tree, find_q, ibr_sort
from .algorithms import ALGORITHM_IDS, ALGORITHMS, Algorithm, SortOptions, get_algorithm, sort
from .bench import (
    BenchmarkConfig,
    Measurement,
    join_speedups,
    run_benchmark,
    sequence_lengths,
    sort_rate,
    speedup,
)
from .bitonic import (
    MultistepPlan,
    bitonic_sort,
    bitonic_sort_par,
    bitonic_sort_seq,
    comparator_schedule,
    multistep_bitonic_sort,
    multistep_plan,
)
from .core import (
    ConfigurationError,
    ContractViolation,
    ElementWidth,
    Mode,
    PayloadMode,
    SortOutcome,
    SortSequence,
    check_stability,
    index_values,
    multiset_equal,
    reference_sort,
    verify_sorted,
)
from .mergesort import MergeConfig, merge_sort
from .quicksort import QuicksortTask, quicksort, select_pivot
from .radix import DigitHistogram, RadixConfig, counting_sort_pass, extract_digit, radix_sort
from .report import PlotSpec, emit_plot, read_csv, write_csv
from .rng import MT19937, MT19937_64, Distribution, DistributionSpec, generate, mt_next, mt_seed
from .runtime import Phase, Runtime, exclusive_scan, reduce_min_max, run_phases, split_by_bit
from .samplesort import SampleConfig, sample_sort

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
