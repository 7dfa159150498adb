"""Reliability diagrams: the standard form and the test-based form.

The test-based form augments the standard per-bin summary with the within-bin
prediction distribution (quartiles plus a small density histogram, drawn as a
mirrored violin) and the percentage of predictions the statistical test
rejects in each bin. Rendering is plain SVG text with fixed float formatting,
so identical specs produce byte-identical documents.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .core import Bin, BinSet, Dataset, partition
from .metrics import MetricReport, tce
from .stattest import TestConfig

__all__ = ["DiagramBin", "DiagramSpec", "build_diagram", "render_svg"]

GLOBAL_HIST_BUCKETS = 50
VIOLIN_BUCKETS = 20


@dataclass(frozen=True)
class DiagramBin:
    bin: Bin
    count: int
    empirical_prob: float
    mean_prediction: float
    rejection_pct: float | None = None
    quartiles: tuple[float, float, float] | None = None
    density: tuple[int, ...] | None = None


@dataclass(frozen=True)
class DiagramSpec:
    kind: str
    n: int
    bins: tuple[DiagramBin, ...]
    histogram_edges: tuple[float, ...]
    histogram_counts: tuple[int, ...]
    config: dict

    def to_json(self) -> str:
        def none_if_nan(v):
            if v is None or (isinstance(v, float) and np.isnan(v)):
                return None
            return v

        payload = {
            "schema_version": 1,
            "kind": self.kind,
            "n": self.n,
            "bins": [
                {
                    "lower": b.bin.lower,
                    "upper": b.bin.upper,
                    "closed_upper": b.bin.closed_upper,
                    "count": b.count,
                    "empirical_prob": none_if_nan(b.empirical_prob),
                    "mean_prediction": none_if_nan(b.mean_prediction),
                    "rejection_pct": none_if_nan(b.rejection_pct),
                    "quartiles": None if b.quartiles is None else list(b.quartiles),
                    "density": None if b.density is None else list(b.density),
                }
                for b in self.bins
            ],
            "histogram_edges": list(self.histogram_edges),
            "histogram_counts": list(self.histogram_counts),
            "config": self.config,
        }
        return json.dumps(payload, indent=2, sort_keys=True)


def build_diagram(
    dataset: Dataset,
    bins: BinSet,
    cfg: TestConfig | None = None,
    kind: str = "standard",
) -> DiagramSpec:
    """Assemble the renderable description of a reliability diagram.

    The numbers are taken straight from the partition (and, for the
    test-based kind, from the test-based metric report), so the diagram can
    never drift from the reported metrics.
    """
    if kind not in ("standard", "test_based"):
        raise ValueError(f"unknown diagram kind {kind!r}")
    if kind == "test_based" and cfg is None:
        raise ValueError("test_based diagrams need a TestConfig")
    binned = partition(dataset, bins)
    report: MetricReport | None = None
    if kind == "test_based":
        report = tce(dataset, bins, cfg)

    entries = []
    for b in range(len(bins)):
        interval = bins.bins[b]
        rejection = quartiles = density = None
        if kind == "test_based":
            rejection = report.per_bin[b].loss
            preds_b = binned.predictions_in(b)
            if preds_b.size > 0:
                quartiles = tuple(float(v) for v in np.percentile(preds_b, [25, 50, 75]))
                counts, _ = np.histogram(
                    preds_b, bins=VIOLIN_BUCKETS, range=(interval.lower, interval.upper)
                )
                density = tuple(int(c) for c in counts)
        entries.append(
            DiagramBin(
                bin=interval,
                count=int(binned.counts[b]),
                empirical_prob=float(binned.empirical_prob[b]),
                mean_prediction=float(binned.mean_prediction[b]),
                rejection_pct=rejection,
                quartiles=quartiles,
                density=density,
            )
        )

    hist_counts, hist_edges = np.histogram(
        dataset.predictions, bins=GLOBAL_HIST_BUCKETS, range=(0.0, 1.0)
    )
    config: dict = {"num_bins": len(bins)}
    if cfg is not None:
        config.update({"test": cfg.kind, "alpha": cfg.alpha})
    return DiagramSpec(
        kind=kind,
        n=dataset.n,
        bins=tuple(entries),
        histogram_edges=tuple(float(e) for e in hist_edges),
        histogram_counts=tuple(int(c) for c in hist_counts),
        config=config,
    )


def _f(v: float) -> str:
    return f"{v:.2f}"


def _esc(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


class _Canvas:
    """Collects SVG elements with fixed-precision coordinates."""

    def __init__(self) -> None:
        self.parts: list[str] = []

    def line(self, x1, y1, x2, y2, stroke, width=1.0, dash=None):
        d = f' stroke-dasharray="{dash}"' if dash else ""
        self.parts.append(
            f'<line x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" y2="{_f(y2)}" '
            f'stroke="{stroke}" stroke-width="{_f(width)}"{d}/>'
        )

    def rect(self, x, y, w, h, fill):
        self.parts.append(
            f'<rect x="{_f(x)}" y="{_f(y)}" width="{_f(w)}" height="{_f(h)}" fill="{fill}"/>'
        )

    def polygon(self, points, fill, stroke="none"):
        pts = " ".join(f"{_f(x)},{_f(y)}" for x, y in points)
        self.parts.append(f'<polygon points="{pts}" fill="{fill}" stroke="{stroke}"/>')

    def circle(self, cx, cy, r, fill):
        self.parts.append(f'<circle cx="{_f(cx)}" cy="{_f(cy)}" r="{_f(r)}" fill="{fill}"/>')

    def text(self, x, y, content, size=10, anchor="middle", fill="#333333"):
        self.parts.append(
            f'<text x="{_f(x)}" y="{_f(y)}" text-anchor="{anchor}" font-size="{size}" '
            f'font-family="Helvetica, Arial, sans-serif" fill="{fill}">{_esc(content)}</text>'
        )


def render_svg(spec: DiagramSpec, width: int = 640, height: int = 480) -> str:
    """Render a diagram spec to a standalone SVG 1.1 document.

    Layout: main panel with the per-bin content, a bottom panel with grey
    size bars (plus red rejection bars for the test-based kind), and a right
    panel with the global prediction histogram.
    """
    if width <= 0 or height <= 0:
        raise ValueError("dimensions must be positive")
    margin = 42
    gap = 10
    bottom_h = 0.18 * (height - 2 * margin - gap)
    right_w = 0.16 * (width - 2 * margin - gap)
    main_w = (width - 2 * margin - gap) - right_w
    main_h = (height - 2 * margin - gap) - bottom_h
    mx0, my0 = margin, margin
    mx1, my1 = margin + main_w, margin + main_h
    bx0, by0 = mx0, my1 + gap
    by1 = by0 + bottom_h
    rx0 = mx1 + gap

    def sx(v: float) -> float:
        return mx0 + v * main_w

    def sy(v: float) -> float:
        return my1 - v * main_h

    c = _Canvas()
    c.rect(0, 0, width, height, "#ffffff")

    # Main panel frame, diagonal, and axis ticks.
    c.rect(mx0, my0, main_w, main_h, "none")
    c.line(mx0, my0, mx0, my1, "#333333")
    c.line(mx0, my1, mx1, my1, "#333333")
    c.line(sx(0.0), sy(0.0), sx(1.0), sy(1.0), "#999999", dash="4,3")
    for tick in (0.0, 0.25, 0.5, 0.75, 1.0):
        c.line(sx(tick), my1, sx(tick), my1 + 3, "#333333")
        c.text(sx(tick), my1 + 13, f"{tick:g}", size=9)
        c.line(mx0 - 3, sy(tick), mx0, sy(tick), "#333333")
        c.text(mx0 - 6, sy(tick) + 3, f"{tick:g}", size=9, anchor="end")
    c.text((mx0 + mx1) / 2, my0 - 8, "prediction vs estimated probability", size=11)

    max_count = max((b.count for b in spec.bins), default=0)
    for entry in spec.bins:
        interval = entry.bin
        x_left, x_right = sx(interval.lower), sx(interval.upper)
        c.line(x_right, my0, x_right, my1, "#dddddd", width=0.5, dash="2,3")

        if spec.kind == "test_based" and entry.density is not None and entry.count > 0:
            # Violin: the 20-bucket density mirrored around the bin centre.
            centre = (x_left + x_right) / 2
            peak = max(entry.density)
            if peak > 0:
                half = 0.42 * (x_right - x_left)
                step = (interval.upper - interval.lower) / len(entry.density)
                points = []
                for i, d in enumerate(entry.density):
                    yv = interval.lower + (i + 0.5) * step
                    points.append((centre + half * d / peak, sy(yv)))
                for i, d in reversed(list(enumerate(entry.density))):
                    yv = interval.lower + (i + 0.5) * step
                    points.append((centre - half * d / peak, sy(yv)))
                c.polygon(points, "#b8cbe4")
            if entry.quartiles is not None:
                q1, q2, q3 = entry.quartiles
                c.line(centre, sy(q1), centre, sy(q3), "#5577aa", width=1.5)
                c.circle(centre, sy(q2), 1.8, "#5577aa")
        if entry.count > 0 and not np.isnan(entry.empirical_prob):
            c.line(x_left, sy(entry.empirical_prob), x_right, sy(entry.empirical_prob), "#cc2222", width=2.0)
        if spec.kind == "standard" and entry.count > 0 and not np.isnan(entry.mean_prediction):
            c.circle(sx(entry.mean_prediction), sy(entry.empirical_prob), 2.5, "#224488")

    # Bottom panel: grey size bars, red rejection bars for the test-based kind.
    c.line(bx0, by1, mx1, by1, "#333333")
    for entry in spec.bins:
        x_left, x_right = sx(entry.bin.lower), sx(entry.bin.upper)
        span = x_right - x_left
        if max_count > 0 and entry.count > 0:
            h = (entry.count / max_count) * (by1 - by0)
            c.rect(x_left + 0.08 * span, by1 - h, 0.38 * span, h, "#aaaaaa")
        if spec.kind == "test_based" and entry.rejection_pct is not None and entry.count > 0:
            h = (entry.rejection_pct / 100.0) * (by1 - by0)
            c.rect(x_left + 0.54 * span, by1 - h, 0.38 * span, h, "#cc2222")
    c.text((bx0 + mx1) / 2, by1 + 13, "bin size (grey) / rejected % (red)", size=9)

    # Right panel: global prediction histogram, drawn sideways.
    hist_max = max(spec.histogram_counts, default=0)
    if hist_max > 0:
        for i, count in enumerate(spec.histogram_counts):
            lo = spec.histogram_edges[i]
            hi = spec.histogram_edges[i + 1]
            bar = (count / hist_max) * right_w
            c.rect(rx0, sy(hi), bar, sy(lo) - sy(hi), "#aaaaaa")
    c.line(rx0, my0, rx0, my1, "#333333")

    title = "test-based reliability diagram" if spec.kind == "test_based" else "reliability diagram"
    c.text(width / 2, height - 8, f"{title} (n={spec.n})", size=10)

    body = "\n".join(c.parts)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" viewBox="0 0 {width} {height}">\n'
        f"{body}\n</svg>\n"
    )
