"""CSV rows and standalone SVG line charts for benchmark results."""

from __future__ import annotations

import csv
import io
import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .algorithms import ALGORITHM_IDS, ALGORITHMS
from .bench import Measurement, join_speedups
from .core import ElementWidth, Mode, PayloadMode
from .rng import Distribution

CSV_COLUMNS = (
    "algorithm",
    "mode",
    "width",
    "payload",
    "distribution",
    "n",
    "reps",
    "mean_ms",
    "stddev_ms",
    "sort_rate_mps",
    "workers",
    "pivot",
    "fusion",
    "radix_bits",
)


def _fmt(x: float, places: int) -> str:
    return "nan" if math.isnan(x) else f"{x:.{places}f}"


def csv_rows(measurements: Iterable[Measurement]) -> list[list[str]]:
    rows = []
    for m in measurements:
        rows.append(
            [
                m.algorithm,
                "seq" if m.mode is Mode.SEQUENTIAL else "par",
                str(m.width.bits),
                m.payload.value,
                m.distribution.value,
                str(m.n),
                str(m.repetitions),
                _fmt(m.mean_time * 1e3, 6),
                _fmt(m.stddev_time * 1e3, 6),
                _fmt(m.sort_rate, 3),
                str(m.workers),
                m.pivot,
                str(m.fusion),
                str(m.radix_bits),
            ]
        )
    return rows


def render_csv(measurements: Iterable[Measurement]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    w.writerows(csv_rows(measurements))
    return buf.getvalue()


def write_csv(measurements: Iterable[Measurement], path: str | Path) -> Path:
    path = Path(path)
    path.write_text(render_csv(measurements), encoding="utf-8")
    return path


def read_csv(path: str | Path) -> list[Measurement]:
    """Inverse of :func:`write_csv`, up to the printed precision."""
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV header: {reader.fieldnames}")
        for r in reader:
            mean = float(r["mean_ms"]) / 1e3
            out.append(
                Measurement(
                    r["algorithm"],
                    Mode.parse(r["mode"]),
                    ElementWidth.W32 if r["width"] == "32" else ElementWidth.W64,
                    PayloadMode(r["payload"]),
                    Distribution(r["distribution"]),
                    int(r["n"]),
                    int(r["reps"]),
                    mean,
                    float(r["stddev_ms"]) / 1e3,
                    int(r["workers"]),
                    r["pivot"],
                    int(r["fusion"]),
                    int(r["radix_bits"]),
                    valid=not math.isnan(mean),
                )
            )
    return out


@dataclass(frozen=True)
class PlotSpec:
    """Which rows a figure shows. ``kind`` is ``sort_rate`` or ``speedup``."""

    kind: str = "sort_rate"
    mode: Mode = Mode.SEQUENTIAL
    width: ElementWidth = ElementWidth.W32
    payload: PayloadMode = PayloadMode.KEYS_ONLY
    distribution: Distribution = Distribution.UNIFORM

    def __post_init__(self):
        if self.kind not in ("sort_rate", "speedup"):
            raise ValueError(f"plot kind must be sort_rate or speedup, got {self.kind!r}")

    def describe(self) -> str:
        parts = [f"width={self.width.bits}", f"payload={self.payload.value}", f"distribution={self.distribution.value}"]
        if self.kind == "sort_rate":
            parts.insert(0, f"mode={self.mode.value}")
        return f"{self.kind} [{', '.join(parts)}]"

    def slug(self) -> str:
        mode = "" if self.kind == "speedup" else f"-{'seq' if self.mode is Mode.SEQUENTIAL else 'par'}"
        return f"{self.kind}{mode}-w{self.width.bits}-{self.payload.value}-{self.distribution.value}"


@dataclass
class Series:
    algorithm: str
    points: list[tuple[float, float]]  # (log2 n, y)


def plot_series(measurements: Sequence[Measurement], spec: PlotSpec) -> tuple[list[Series], bool]:
    """Series to draw and whether a quicksort series was dropped (zero distribution)."""
    rows = [
        m
        for m in measurements
        if m.valid and m.width is spec.width and m.payload is spec.payload and m.distribution is spec.distribution
    ]
    if spec.kind == "sort_rate":
        rows = [m for m in rows if m.mode is spec.mode]
        pts = {}
        for m in rows:
            pts.setdefault(m.algorithm, []).append((math.log2(m.n), m.sort_rate))
    else:
        pts = {}
        for s in join_speedups(rows, require_all=False):
            pts.setdefault(s.algorithm, []).append((math.log2(s.n), s.speedup))
    dropped = False
    if spec.distribution is Distribution.ZERO and "quick" in pts:
        # the constant-input fast path is off the scale of every other series
        del pts["quick"]
        dropped = True
    order = {a: i for i, a in enumerate(ALGORITHM_IDS)}
    series = [Series(a, sorted(p)) for a, p in sorted(pts.items(), key=lambda kv: order.get(kv[0], 99))]
    return series, dropped


_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")
_MARKERS = ("circle", "square", "triangle", "diamond", "cross", "triangle-down", "star")


def _marker(kind: str, x: float, y: float, color: str) -> ET.Element:
    r = 4.0
    if kind == "circle":
        return ET.Element("circle", cx=f"{x:.2f}", cy=f"{y:.2f}", r=f"{r}", fill=color)
    if kind == "square":
        return ET.Element("rect", x=f"{x - r:.2f}", y=f"{y - r:.2f}", width=f"{2 * r}", height=f"{2 * r}", fill=color)
    shapes = {
        "triangle": [(0, -r), (r, r), (-r, r)],
        "triangle-down": [(0, r), (r, -r), (-r, -r)],
        "diamond": [(0, -r), (r, 0), (0, r), (-r, 0)],
        "cross": [(-r, -r / 3), (-r / 3, -r / 3), (-r / 3, -r), (r / 3, -r), (r / 3, -r / 3), (r, -r / 3),
                  (r, r / 3), (r / 3, r / 3), (r / 3, r), (-r / 3, r), (-r / 3, r / 3), (-r, r / 3)],
        "star": [(0, -r), (r / 3, -r / 3), (r, 0), (r / 3, r / 3), (0, r), (-r / 3, r / 3), (-r, 0), (-r / 3, -r / 3)],
    }
    pts = " ".join(f"{x + dx:.2f},{y + dy:.2f}" for dx, dy in shapes[kind])
    return ET.Element("polygon", points=pts, fill=color)


def _nice_step(top: float) -> float:
    raw = top / 5
    mag = 10 ** math.floor(math.log10(raw))
    for m in (1, 2, 2.5, 5, 10):
        if raw <= m * mag:
            return m * mag
    return 10 * mag


def render_svg(measurements: Sequence[Measurement], spec: PlotSpec, title: str | None = None) -> str:
    series, dropped = plot_series(measurements, spec)
    if not series:
        raise ValueError(f"no measurements left after filtering for {spec.describe()}")

    W, H = 760, 460
    left, right, top, bottom = 70, 200, 40, 70
    pw, ph = W - left - right, H - top - bottom
    xs = sorted({x for s in series for x, _ in s.points})
    x_lo, x_hi = math.floor(xs[0]), math.ceil(xs[-1])
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 1, x_hi + 1
    y_max = max(y for s in series for _, y in s.points)
    step = _nice_step(y_max if y_max > 0 else 1.0)
    y_hi = step * max(1, math.ceil(y_max / step))

    def sx(x):
        return left + (x - x_lo) / (x_hi - x_lo) * pw

    def sy(y):
        return top + ph - y / y_hi * ph

    svg = ET.Element("svg", xmlns="http://www.w3.org/2000/svg", width=str(W), height=str(H), viewBox=f"0 0 {W} {H}", version="1.1")
    svg.set("font-family", "sans-serif")
    svg.set("font-size", "12")
    ET.SubElement(svg, "rect", x="0", y="0", width=str(W), height=str(H), fill="white")
    t = ET.SubElement(svg, "text", x=str(left), y="22")
    t.set("font-size", "14")
    t.text = title or spec.describe()

    axes = ET.SubElement(svg, "g", stroke="black")
    ET.SubElement(axes, "line", x1=str(left), y1=str(top + ph), x2=str(left + pw), y2=str(top + ph))
    ET.SubElement(axes, "line", x1=str(left), y1=str(top), x2=str(left), y2=str(top + ph))
    ticks = ET.SubElement(svg, "g", id="x-ticks")
    for e in range(x_lo, x_hi + 1):
        g = ET.SubElement(ticks, "g", {"class": "x-tick"})
        ET.SubElement(g, "line", x1=f"{sx(e):.2f}", y1=str(top + ph), x2=f"{sx(e):.2f}", y2=str(top + ph + 5), stroke="black")
        lab = ET.SubElement(g, "text", x=f"{sx(e):.2f}", y=str(top + ph + 20))
        lab.set("text-anchor", "middle")
        lab.text = str(e)
    yt = ET.SubElement(svg, "g", id="y-ticks")
    k = 0
    while k * step <= y_hi + 1e-12:
        y = k * step
        ET.SubElement(yt, "line", x1=str(left), y1=f"{sy(y):.2f}", x2=str(left + pw), y2=f"{sy(y):.2f}", stroke="#dddddd")
        lab = ET.SubElement(yt, "text", x=str(left - 8), y=f"{sy(y) + 4:.2f}")
        lab.set("text-anchor", "end")
        lab.text = f"{y:g}"
        k += 1
    xl = ET.SubElement(svg, "text", x=f"{left + pw / 2:.1f}", y=str(H - 30))
    xl.set("text-anchor", "middle")
    xl.text = "log2(sequence length)"
    yl = ET.SubElement(svg, "text", x="18", y=f"{top + ph / 2:.1f}", transform=f"rotate(-90 18 {top + ph / 2:.1f})")
    yl.set("text-anchor", "middle")
    yl.text = "sort rate [M/s]" if spec.kind == "sort_rate" else "speedup (parallel / sequential)"

    legend = ET.SubElement(svg, "g", id="legend")
    for i, s in enumerate(series):
        idx = ALGORITHM_IDS.index(s.algorithm) if s.algorithm in ALGORITHM_IDS else i
        color, marker = _COLORS[idx % len(_COLORS)], _MARKERS[idx % len(_MARKERS)]
        g = ET.SubElement(svg, "g", {"class": "series", "data-algorithm": s.algorithm})
        ET.SubElement(
            g,
            "polyline",
            points=" ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in s.points),
            fill="none",
            stroke=color,
            **{"stroke-width": "2"},
        )
        for x, y in s.points:
            m = _marker(marker, sx(x), sy(y), color)
            m.set("data-x", repr(x))
            m.set("data-y", repr(y))
            g.append(m)
        ly = top + 10 + 20 * i
        lx = left + pw + 20
        ET.SubElement(legend, "line", x1=str(lx), y1=str(ly), x2=str(lx + 24), y2=str(ly), stroke=color, **{"stroke-width": "2"})
        legend.append(_marker(marker, lx + 12, ly, color))
        lt = ET.SubElement(legend, "text", x=str(lx + 32), y=str(ly + 4))
        lt.text = ALGORITHMS[s.algorithm].legend if s.algorithm in ALGORITHMS else s.algorithm
    if dropped:
        fn = ET.SubElement(svg, "text", x=str(left), y=str(H - 8), id="footnote")
        fn.set("font-size", "11")
        fn.text = "Quicksort omitted: on constant input it only finds the minimum and maximum, far off this scale."
    ET.indent(svg)
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(svg, encoding="unicode") + "\n"


def emit_plot(measurements: Sequence[Measurement], spec: PlotSpec, path: str | Path, title: str | None = None) -> Path:
    path = Path(path)
    path.write_text(render_svg(measurements, spec, title), encoding="utf-8")
    return path


def emit_all_plots(measurements: Sequence[Measurement], prefix: str | Path) -> list[Path]:
    """One sort-rate figure per (mode, width, payload, distribution) present, plus speedups."""
    seen = sorted(
        {(m.mode, m.width, m.payload, m.distribution) for m in measurements if m.valid},
        key=lambda t: (t[0].value, t[1].bits, t[2].value, t[3].value),
    )
    out = []
    for mode, width, payload, dist in seen:
        spec = PlotSpec("sort_rate", mode, width, payload, dist)
        if plot_series(measurements, spec)[0]:
            out.append(emit_plot(measurements, spec, f"{prefix}{spec.slug()}.svg"))
    for width, payload, dist in sorted({t[1:] for t in seen}, key=lambda t: (t[0].bits, t[1].value, t[2].value)):
        spec = PlotSpec("speedup", Mode.PARALLEL, width, payload, dist)
        if plot_series(measurements, spec)[0]:
            out.append(emit_plot(measurements, spec, f"{prefix}{spec.slug()}.svg"))
    return out
