"""``parasort`` command line: run a benchmark grid, write CSV and SVG.

Exit codes: 0 success, 1 runtime or I/O failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from typing import Sequence

from .algorithms import ALGORITHM_IDS, SortOptions
from .bench import BenchmarkConfig, Measurement, run_benchmark
from .core import ConfigurationError, ElementWidth, Mode, PayloadMode
from .report import emit_all_plots, render_csv, write_csv
from .rng import Distribution, DistributionSpec

DESK_NOTICE = (
    "parasort: no arguments given; running the default desk-scale grid "
    "(all algorithms, both modes, both widths, all distributions, exponents 15..18). "
    "Use --min-exp/--max-exp for other sizes, --help for all options."
)


@dataclass
class OutputOptions:
    csv_path: str | None
    plot_prefix: str | None
    quiet: bool


def _csv_choice(allowed: Sequence[str], what: str):
    def parse(text: str) -> tuple[str, ...]:
        if text == "all":
            return tuple(allowed)
        items = tuple(t.strip() for t in text.split(",") if t.strip())
        bad = [t for t in items if t not in allowed]
        if not items or bad:
            raise argparse.ArgumentTypeError(f"unknown {what} {', '.join(bad) or repr(text)}; choose from {', '.join(allowed)} or 'all'")
        return tuple(dict.fromkeys(items))

    return parse


def _int_in(lo: int, hi: int | None = None, pow2: bool = False):
    def parse(text: str) -> int:
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
        if v < lo or (hi is not None and v > hi):
            rng = f">= {lo}" if hi is None else f"in [{lo}, {hi}]"
            raise argparse.ArgumentTypeError(f"must be {rng}, got {v}")
        if pow2 and v & (v - 1):
            raise argparse.ArgumentTypeError(f"must be a power of two, got {v}")
        return v

    return parse


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="parasort", description="Benchmark sequential and parallel sorting algorithms.")
    dists = tuple(d.value for d in Distribution)
    p.add_argument("--algo", type=_csv_choice(ALGORITHM_IDS, "algorithm"), default=ALGORITHM_IDS, help=f"comma list of {', '.join(ALGORITHM_IDS)} or 'all'")
    p.add_argument("--mode", choices=("seq", "par", "both"), default="both")
    p.add_argument("--width", choices=("32", "64", "both"), default="both")
    p.add_argument("--pairs", action="store_true", help="sort key-value pairs instead of bare keys")
    p.add_argument("--dist", type=_csv_choice(dists, "distribution"), default=dists, help=f"comma list of {', '.join(dists)} or 'all'")
    p.add_argument("--min-exp", type=_int_in(1, 40), default=15)
    p.add_argument("--max-exp", type=_int_in(1, 40), default=18)
    p.add_argument("--nonregular", action="store_true", help="also run lengths 2^e + 2^(e-1)")
    p.add_argument("--reps", type=_int_in(1), default=50)
    p.add_argument("--warmup", type=_int_in(0), default=1)
    p.add_argument("--seed", type=_int_in(0, 2**64 - 1), default=5489)
    p.add_argument("--workers", type=_int_in(1), default=None, help="worker threads (default: PARASORT_WORKERS or CPU count)")
    p.add_argument("--fusion", type=_int_in(1, 5), default=4, help="steps fused per multistep phase")
    p.add_argument("--pivot", choices=("minmax", "median3"), default="minmax")
    p.add_argument("--radix-bits", type=int, choices=(4, 8, 16), default=8)
    p.add_argument("--tile", type=_int_in(1, pow2=True), default=512, help="merge sort tile size")
    p.add_argument("--buckets", type=_int_in(2), default=32, help="sample sort bucket count k")
    p.add_argument("--oversample", type=_int_in(1), default=8, help="sample sort oversampling factor a")
    p.add_argument("--small-threshold", type=_int_in(1), default=1024)
    p.add_argument("--fixed-input", action="store_true", help="sort the same input on every repetition")
    p.add_argument("--out", metavar="CSV", help="CSV output path (default: standard output)")
    p.add_argument("--plot", metavar="PREFIX", help="write SVG figures as PREFIX<figure>.svg")
    p.add_argument("--quiet", action="store_true", help="no progress lines on stderr")
    return p


def parse_cli(argv: Sequence[str]) -> tuple[BenchmarkConfig, OutputOptions]:
    parser = build_parser()
    a = parser.parse_args(list(argv))
    if a.min_exp > a.max_exp:
        parser.error(f"argument --min-exp: {a.min_exp} exceeds --max-exp {a.max_exp}")
    modes = {"seq": (Mode.SEQUENTIAL,), "par": (Mode.PARALLEL,), "both": (Mode.SEQUENTIAL, Mode.PARALLEL)}[a.mode]
    widths = {"32": (ElementWidth.W32,), "64": (ElementWidth.W64,), "both": (ElementWidth.W32, ElementWidth.W64)}[a.width]
    opts = SortOptions(
        fusion=a.fusion,
        pivot=a.pivot,
        radix_bits=a.radix_bits,
        tile=a.tile,
        rank_stride=min(256, a.tile),
        buckets=a.buckets,
        oversample=a.oversample,
        small_threshold=a.small_threshold,
    )
    try:
        cfg = BenchmarkConfig(
            algorithms=a.algo,
            modes=modes,
            widths=widths,
            payloads=(PayloadMode.KEY_VALUE if a.pairs else PayloadMode.KEYS_ONLY,),
            distributions=tuple(DistributionSpec(Distribution(d), seed=a.seed) for d in a.dist),
            min_exp=a.min_exp,
            max_exp=a.max_exp,
            include_nonregular=a.nonregular,
            repetitions=a.reps,
            warmup_runs=a.warmup,
            seed=a.seed,
            workers=a.workers,
            fixed_input=a.fixed_input,
            options=opts,
        )
    except (ConfigurationError, ValueError) as exc:
        parser.error(str(exc))
    return cfg, OutputOptions(a.out, a.plot, a.quiet)


def _progress(m: Measurement) -> None:
    mode = "seq" if m.mode is Mode.SEQUENTIAL else "par"
    status = f"{m.sort_rate:10.3f} M/s" if m.valid else f"INVALID ({m.error})"
    print(f"{m.algorithm:9s} {mode} w{m.width.bits} {m.payload.value:5s} {m.distribution.value:11s} n={m.n:<9d} {status}", file=sys.stderr)


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg, out = parse_cli(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if not argv:
        print(DESK_NOTICE, file=sys.stderr)
    try:
        results = run_benchmark(cfg, None if out.quiet else _progress)
        if out.csv_path:
            write_csv(results, out.csv_path)
        else:
            sys.stdout.write(render_csv(results))
        if out.plot_prefix:
            for path in emit_all_plots(results, out.plot_prefix):
                if not out.quiet:
                    print(f"wrote {path}", file=sys.stderr)
    except OSError as exc:
        print(f"parasort: I/O error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - any failure during a run is exit 1
        print(f"parasort: error: {exc}", file=sys.stderr)
        return 1
    invalid = [m for m in results if not m.valid]
    if invalid:
        print(f"parasort: {len(invalid)} cell(s) produced incorrect output", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
